#pragma once

// Distances from a tuple z in l_inf^n(X) to the sets
//
//   C_m^{n,eps,alpha}(X) = co_m { g : ||g|| <= alpha, ||mean of blocks of g|| > 1 - eps }
//
// reported as brackets. The strict inequality is handled through a
// strictness tolerance; every distance is a statement about the closure.

#include "usd2p/spaces.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace usd2p {

struct CmParams {
    std::size_t n = 1;      // arity of the tuples
    double epsilon = 0.1;   // in (0, 1)
    double alpha = 1.0;     // tuple norm bound; 1 is the plain set, 1 + eps the "plus" set
    std::size_t m = 1;      // at most m generators per convex combination

    static CmParams plain(std::size_t n, double epsilon, std::size_t m) { return {n, epsilon, 1.0, m}; }
    static CmParams plus(std::size_t n, double epsilon, std::size_t m) { return {n, epsilon, 1.0 + epsilon, m}; }

    /// Throws ParameterError unless n, m >= 1, eps in (0,1) and alpha > 1 - eps
    /// (for alpha <= 1 - eps the generating set is empty).
    void validate() const;
    /// Lower threshold for the mean-block norm.
    double mean_threshold() const { return 1.0 - epsilon; }
};

/// l_inf^n(X).
Space tuple_space(const Space& x, std::size_t n);

inline constexpr double kDefaultStrictness = 1e-9;

struct MembershipReport {
    double norm = 0.0;
    double mean_norm = 0.0;
    bool norm_ok = false;  // norm <= alpha + tol
    bool mean_ok = false;  // mean_norm > 1 - eps - tol
    bool pass() const { return norm_ok && mean_ok; }
};

/// Membership of one generator g in the generating set of C^{n,eps,alpha}(X).
/// Throws StructuralError if g is not in l_inf^n(X).
MembershipReport cm_member_check(const Space& x, const CmParams& params, std::span<const double> g,
                                 double tol = kDefaultStrictness);

struct ConvexDecomposition {
    std::vector<double> weights;
    std::vector<std::vector<double>> generators;  // each in l_inf^n(X)

    std::vector<double> point() const;
    /// Weights nonnegative, summing to 1 within 1e-12, at most params.m terms,
    /// every generator a member at tolerance tol.
    bool valid(const Space& x, const CmParams& params, double tol = kDefaultStrictness) const;
};

/// Finite generator family, possibly implicit (grids).
class GeneratorSource {
public:
    virtual ~GeneratorSource() = default;
    virtual std::size_t size() const = 0;
    virtual std::size_t dim() const = 0;
    virtual void fetch(std::size_t i, std::span<double> out) const = 0;
    /// argmax_i <phi, s_i> and its value. Default is a linear scan through fetch().
    virtual std::pair<std::size_t, double> maximize(std::span<const double> phi) const;
};

class GeneratorList final : public GeneratorSource {
public:
    explicit GeneratorList(std::vector<std::vector<double>> items);
    std::size_t size() const override { return items_.size(); }
    std::size_t dim() const override { return dim_; }
    void fetch(std::size_t i, std::span<double> out) const override;
    const std::vector<double>& operator[](std::size_t i) const { return items_[i]; }

private:
    std::vector<std::vector<double>> items_;
    std::size_t dim_ = 0;
};

struct MinNormOptions {
    double gap_tolerance = 1e-10;
    std::size_t max_iterations = 2000;
    /// Columns loaded before pricing; sources at most this large are loaded whole.
    std::size_t initial_columns = 64;
    /// 0 = unlimited. Otherwise the working set is truncated to this many
    /// columns (smallest weight dropped), giving a co_k upper bound.
    std::size_t max_columns = 0;
    /// Stop as soon as the distance is at most this value (negative: never).
    double stop_below = -1.0;
};

struct MinNormResult {
    double distance = 0.0;             // ||z - hull_point|| (true norm)
    double lower = 0.0;                // certified lower bound on d(z, co S)
    double gap = 0.0;                  // distance - lower
    std::vector<double> hull_point;
    std::vector<std::size_t> support;  // generator indices with positive weight
    std::vector<double> weights;       // aligned with support
    std::vector<double> certificate;   // dual functional phi, dual norm <= 1
    std::size_t iterations = 0;
    bool converged = false;

    std::vector<double> dense_weights(std::size_t count) const;
};

/// Distance from z to co(S) in `space`, by cutting planes on the dual ball
/// (norming functionals) with column generation over S. The lower bound is
/// phi(z) - max_s phi(s) for a functional phi with dual norm <= 1, so
/// distance - lower is a true duality gap. Throws PreconditionError when S is empty.
MinNormResult min_norm_point(const Space& space, std::span<const double> z, const GeneratorSource& s,
                             const MinNormOptions& options = {});
MinNormResult min_norm_point(const Space& space, std::span<const double> z,
                             const std::vector<std::vector<double>>& s, const MinNormOptions& options = {});

struct DistanceBracket {
    double lower = 0.0;
    double upper = 0.0;
    std::string lower_method = "none";
    std::string upper_method = "none";
    std::optional<ConvexDecomposition> witness;  // realizes `upper`
    double solver_gap = 0.0;                     // inner solver gap at the witness
    double resolution = 0.0;                     // grid step, 0 if no grid was used
    double covering_constant = 0.0;              // grid rounding radius / resolution
    std::uint64_t seed = 0;
};

struct DescentOptions {
    std::size_t budget = 200;  // inner min_norm_point solves in the local phase
    std::uint64_t seed = 0;
    /// Decompositions tried first; kept only if feasible for the new parameters.
    std::vector<ConvexDecomposition> warm_starts;
};

/// Clips every block to the alpha-ball, then blends toward a constant tuple
/// (a u, ..., a u) along the mean direction until the mean-block norm
/// reaches 1 - eps. `hint` (unit vector of X) is used when the mean vanishes.
void project_feasible(const Space& x, const CmParams& params, std::span<double> g, std::span<const double> hint);

/// Upper bound on d(z, C_m) by alternating local descent. lower is 0.
DistanceBracket dist_to_cm_upper(const Space& x, std::span<const double> z, const CmParams& params,
                                 const DescentOptions& options = {});

struct GridOptions {
    double resolution = 0.01;
    std::size_t max_points = 10'000'000;
    std::size_t pair_budget = 50'000'000;
};

/// Enumerates the resolution-h grid of the alpha-ball of l_inf^n(X) and
/// returns a certified bracket on d(z, C_m). Throws CapabilityRefusal when
/// the grid exceeds max_points; the message names the finest admissible h.
DistanceBracket dist_to_cm_grid(const Space& x, std::span<const double> z, const CmParams& params,
                                const GridOptions& options = {});

/// Number of grid points dist_to_cm_grid would enumerate, saturating.
std::size_t grid_point_count(const Space& x, const CmParams& params, double resolution);
/// Finest admissible step: the least h with grid_point_count <= max_points.
double required_resolution(const Space& x, const CmParams& params, std::size_t max_points);

}  // namespace usd2p
