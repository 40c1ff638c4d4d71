#pragma once

// Finite pointed metric spaces and Lipschitz functions on them.
//
// The seminorm is the one of the quotient Lip(M) = {Lipschitz f}/constants:
// constants have seminorm 0 and no base-point normalization is ever applied.
// The base point is index 0.

#include "usd2p/spaces.hpp"

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace usd2p {

class FiniteMetricSpace {
public:
    /// Validates the full N x N matrix (row-major): zero diagonal, exact
    /// symmetry, positive off-diagonal entries, triangle inequality up to a
    /// relative rounding allowance of 1e-12. Throws ParameterError.
    FiniteMetricSpace(std::size_t size, std::vector<double> dist);

    std::size_t size() const noexcept { return n_; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return dist_[i * n_ + j]; }
    std::span<const double> row(std::size_t i) const { return {dist_.data() + i * n_, n_}; }
    const std::vector<double>& matrix() const noexcept { return dist_; }
    double diameter() const noexcept;

private:
    std::size_t n_;
    std::vector<double> dist_;
};

/// Text format: first line N, then N lines of N whitespace-separated reals.
/// Blank lines and lines starting with '#' are ignored.
/// Throws ParseError carrying the 1-based line number, or ParameterError
/// when the numbers parse but do not form a metric.
FiniteMetricSpace read_metric(std::istream& in);
/// Shortest round-trip decimal representation of every entry.
void write_metric(std::ostream& out, const FiniteMetricSpace& m);

/// Points {0, q, q^2, ..., q^(L-1)} of the real line; base point 0.
FiniteMetricSpace geometric_chain(double q, std::size_t levels);
/// Points {0, a, a^2, ..., a^(L-1)} of the real line; base point 0.
FiniteMetricSpace integer_ray(std::size_t levels, double growth);

struct LipFunction {
    std::vector<double> values;                 // one per point of M
    std::optional<std::vector<std::size_t>> domain;  // restricting mask; nullopt = all of M

    std::vector<std::size_t> points(std::size_t space_size) const;
};

/// max |f(x) - f(y)| / d(x, y) over unordered pairs of the domain.
/// Throws DegenerateDomainError for domains with fewer than two points.
double lip_seminorm(const FiniteMetricSpace& m, const LipFunction& f);
double lip_seminorm(const FiniteMetricSpace& m, std::span<const double> values);

/// Inf-convolution f~(x) = min_p f(p) + L d(x, p) over the domain of f; agrees
/// with f on the domain. Throws PreconditionError if L is below the
/// restricted seminorm (relative allowance 1e-12).
LipFunction mcshane_extend(const FiniteMetricSpace& m, const LipFunction& f, double lipschitz_constant);
/// Sup-convolution g(x) = max_p f(p) - L d(x, p); the smallest L-Lipschitz extension.
LipFunction whitney_extend(const FiniteMetricSpace& m, const LipFunction& f, double lipschitz_constant);

/// Number of unordered pairs, i.e. the dimension of the isometric image of Lip(M).
std::size_t pair_count(const FiniteMetricSpace& m);
/// Lip(M) embeds isometrically into l_inf^{pairs} by f -> ((f(i)-f(j))/d(i,j))_{i<j}.
Space lip_image_space(const FiniteMetricSpace& m);
std::vector<double> lip_embed(const FiniteMetricSpace& m, std::span<const double> values);

}  // namespace usd2p
