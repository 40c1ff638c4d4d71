#pragma once

// Dense zero-sum matrix game solver used as the master problem of the
// cutting-plane hull-distance solver.

#include <cstddef>
#include <vector>

namespace usd2p::detail {

struct GameSolution {
    std::vector<double> column_strategy;  // minimizer's mixed strategy over columns
    std::vector<double> row_strategy;     // maximizer's mixed strategy over rows
    double value = 0.0;                   // min_col max_row of the payoff
    bool optimal = false;
};

/// Solves min over column distributions lambda of max_r (A lambda)_r for a
/// row-major payoff `a` with `rows` x `cols` entries, via the standard LP
/// reduction and a Bland-rule tableau simplex.
GameSolution solve_matrix_game(const std::vector<double>& a, std::size_t rows, std::size_t cols);

}  // namespace usd2p::detail
