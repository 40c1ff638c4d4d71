#include "matrix_game.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace usd2p::detail {

namespace {

// Tableau for  max sum(y)  s.t.  M y + s = 1, y, s >= 0  in dense row-major form.
// Columns: y (cols), slack (rows), rhs. The last row holds reduced costs.
class Tableau {
public:
    Tableau(std::vector<double> m, std::size_t rows, std::size_t cols)
        : m_(std::move(m)), rows_(rows), cols_(cols), width_(cols + rows + 1), t_((rows + 1) * width_, 0.0),
          basis_(rows) {
        for (std::size_t r = 0; r < rows_; ++r) {
            basis_[r] = cols_ + r;
            for (std::size_t c = 0; c < width_; ++c) at(r, c) = original(r, c);
        }
        for (std::size_t c = 0; c < cols_; ++c) at(rows_, c) = -1.0;
    }

    // Bland-rule pivoting until optimal or the pivot budget is spent.
    bool pivot_to_optimum(std::size_t budget) {
        constexpr double kTol = 1e-13;
        for (std::size_t p = 0; p < budget; ++p) {
            std::size_t enter = width_;
            for (std::size_t c = 0; c + 1 < width_; ++c)
                if (at(rows_, c) < -kTol) {
                    enter = c;
                    break;
                }
            if (enter == width_) return true;
            std::size_t leave = rows_;
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t r = 0; r < rows_; ++r) {
                const double coef = at(r, enter);
                if (coef <= kTol) continue;
                const double ratio = std::max(at(r, width_ - 1), 0.0) / coef;
                if (ratio < best - 1e-15 ||
                    (std::abs(ratio - best) <= 1e-15 && leave < rows_ && basis_[r] < basis_[leave])) {
                    best = ratio;
                    leave = r;
                }
            }
            if (leave == rows_) return false;  // unbounded: impossible for a shifted game
            pivot(leave, enter);
        }
        return false;
    }

    // Dual simplex: restores primal feasibility while keeping the reduced costs
    // non-negative. Used after reinversion exposes small negative basics.
    bool dual_pivot_to_feasible(std::size_t budget) {
        constexpr double kTol = 1e-14;
        for (std::size_t p = 0; p < budget; ++p) {
            std::size_t leave = rows_;
            double worst = -kTol;
            for (std::size_t r = 0; r < rows_; ++r)
                if (at(r, width_ - 1) < worst) {
                    worst = at(r, width_ - 1);
                    leave = r;
                }
            if (leave == rows_) return true;
            std::size_t enter = width_;
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c + 1 < width_; ++c) {
                const double coef = at(leave, c);
                if (coef >= -kTol) continue;
                const double ratio = std::max(at(rows_, c), 0.0) / -coef;
                if (ratio < best) {
                    best = ratio;
                    enter = c;
                }
            }
            if (enter == width_) return false;
            pivot(leave, enter);
        }
        return false;
    }

    bool optimal(double tol) {
        for (std::size_t r = 0; r < rows_; ++r)
            if (at(r, width_ - 1) < -tol) return false;
        for (std::size_t c = 0; c + 1 < width_; ++c)
            if (at(rows_, c) < -tol) return false;
        return true;
    }

    // Rebuilds the tableau as B^{-1} [M I 1] from the original data, removing
    // the drift accumulated by pivoting. Returns false if B is singular.
    bool reinvert() {
        const std::size_t n = rows_;
        // Augmented system [B | M I 1].
        std::vector<double> aug(n * (n + width_));
        const std::size_t aw = n + width_;
        for (std::size_t r = 0; r < n; ++r) {
            for (std::size_t k = 0; k < n; ++k) aug[r * aw + k] = original(r, basis_[k]);
            for (std::size_t c = 0; c < width_; ++c) aug[r * aw + n + c] = original(r, c);
        }
        for (std::size_t k = 0; k < n; ++k) {
            std::size_t piv = k;
            for (std::size_t r = k + 1; r < n; ++r)
                if (std::abs(aug[r * aw + k]) > std::abs(aug[piv * aw + k])) piv = r;
            if (std::abs(aug[piv * aw + k]) < 1e-14) return false;
            if (piv != k)
                for (std::size_t c = 0; c < aw; ++c) std::swap(aug[k * aw + c], aug[piv * aw + c]);
            const double d = aug[k * aw + k];
            for (std::size_t c = k; c < aw; ++c) aug[k * aw + c] /= d;
            for (std::size_t r = 0; r < n; ++r) {
                if (r == k) continue;
                const double f = aug[r * aw + k];
                if (f == 0.0) continue;
                for (std::size_t c = k; c < aw; ++c) aug[r * aw + c] -= f * aug[k * aw + c];
            }
        }
        // Row k of the reduced system belongs to basic variable basis_[k].
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t c = 0; c < width_; ++c) at(k, c) = aug[k * aw + n + c];
        for (std::size_t c = 0; c < width_; ++c) {
            double v = c < cols_ ? -1.0 : 0.0;
            for (std::size_t k = 0; k < n; ++k)
                if (basis_[k] < cols_) v += at(k, c);
            at(rows_, c) = v;
        }
        return true;
    }

    double& at(std::size_t r, std::size_t c) { return t_[r * width_ + c]; }
    std::size_t basic(std::size_t r) const { return basis_[r]; }

private:
    double original(std::size_t r, std::size_t c) const {
        if (c < cols_) return m_[r * cols_ + c];
        if (c + 1 < width_) return c - cols_ == r ? 1.0 : 0.0;
        return 1.0;
    }

    void pivot(std::size_t leave, std::size_t enter) {
        const double piv = at(leave, enter);
        for (std::size_t c = 0; c < width_; ++c) at(leave, c) /= piv;
        for (std::size_t r = 0; r <= rows_; ++r) {
            if (r == leave) continue;
            const double f = at(r, enter);
            if (f == 0.0) continue;
            for (std::size_t c = 0; c < width_; ++c) at(r, c) -= f * at(leave, c);
        }
        basis_[leave] = enter;
    }

    std::vector<double> m_;
    std::size_t rows_, cols_, width_;
    std::vector<double> t_;
    std::vector<std::size_t> basis_;
};

}  // namespace

GameSolution solve_matrix_game(const std::vector<double>& a, std::size_t rows, std::size_t cols) {
    GameSolution out;
    out.column_strategy.assign(cols, 0.0);
    out.row_strategy.assign(rows, 0.0);
    if (rows == 0 || cols == 0) return out;

    // Shift the payoff so every entry is >= 1; then
    //   max sum(y)  s.t.  A' y <= 1, y >= 0
    // has value 1/v' and lambda = y / sum(y). The slack reduced costs give the
    // row strategy.
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (double x : a) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    const double span = std::max(hi - lo, 1e-300);
    // Scale to keep the tableau well conditioned.
    const double scale = 1.0 / span;
    const double shift = 1.0 - lo * scale;
    std::vector<double> m(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) m[i] = a[i] * scale + shift;

    Tableau tab(std::move(m), rows, cols);
    const std::size_t budget = 50 * (rows + cols) + 1000;
    bool optimal = false;
    // Pivot, rebuild from the original data, repair with dual pivots, and
    // resume until the rebuilt tableau is optimal.
    for (int round = 0; round < 8; ++round) {
        tab.pivot_to_optimum(budget);
        if (!tab.reinvert()) break;
        if (tab.optimal(1e-13)) {
            optimal = true;
            break;
        }
        tab.dual_pivot_to_feasible(budget);
        if (!tab.reinvert()) break;
        if (tab.optimal(1e-13)) {
            optimal = true;
            break;
        }
    }

    double ysum = 0.0;
    for (std::size_t r = 0; r < rows; ++r)
        if (tab.basic(r) < cols) {
            const double y = std::max(0.0, tab.at(r, cols + rows));
            out.column_strategy[tab.basic(r)] = y;
            ysum += y;
        }
    double usum = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
        const double u = std::max(0.0, tab.at(rows, cols + r));
        out.row_strategy[r] = u;
        usum += u;
    }
    if (ysum <= 0.0) {
        out.column_strategy.assign(cols, 1.0 / static_cast<double>(cols));
    } else {
        for (double& x : out.column_strategy) x /= ysum;
    }
    if (usum <= 0.0) {
        out.row_strategy.assign(rows, 1.0 / static_cast<double>(rows));
    } else {
        for (double& x : out.row_strategy) x /= usum;
    }
    out.value = ysum > 0.0 ? (1.0 / ysum - shift) / scale : hi;
    out.optimal = optimal;
    return out;
}

}  // namespace usd2p::detail
