#pragma once

// Constructive certificates: ring families on finite metric spaces with the
// Lipschitz-space construction built on them, and the centralizer
// construction on finite function modules. Every construction comes with a
// verifier that recomputes the claimed bounds from scratch.

#include "usd2p/lipmetric.hpp"
#include "usd2p/spaces.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace usd2p {

struct CertificateCheck {
    std::string name;
    double value = 0.0;
    double bound = 0.0;
    double slack = 0.0;  // >= 0 exactly when the check passes (strict checks excepted)
    bool pass = false;
};

struct CertificateReport {
    std::vector<CertificateCheck> checks;

    /// value <= bound.
    void require_at_most(std::string name, double value, double bound);
    /// value >= bound.
    void require_at_least(std::string name, double value, double bound);
    /// value > bound.
    void require_above(std::string name, double value, double bound);
    void append(const CertificateReport& other);

    /// True when every check passes (and vacuously for an empty report).
    bool pass() const;
    /// First failing check, if any.
    const CertificateCheck* first_failure() const;
};

struct RingEntry {
    std::size_t t = 0;
    std::size_t tau = 0;
    double r = 0.0;
    double rho = 0.0;
    double R = 0.0;
};

/// Rings B(t, R) \ B(t, r) with closed balls: the points s with r < d(t, s) <= R.
struct RingFamily {
    double epsilon = 0.0;
    std::vector<RingEntry> entries;

    std::size_t size() const noexcept { return entries.size(); }
};

/// Point mask of one ring.
std::vector<char> ring_points(const FiniteMetricSpace& m, const RingEntry& e);

/// Re-checks every family invariant: indices in range, rho == d(t, tau),
/// R > rho > r > 0, 2 rho/(R - rho) <= eps, 2 r/(rho - r) <= eps, and pairwise
/// disjoint rings.
CertificateReport validate_ring_family(const FiniteMetricSpace& m, const RingFamily& family);

/// Searches pairs (t, tau) with canonical radii r = r*/2 and R = 2 R* (r*, R*
/// the extremal admissible radii), R snapped down to a realized distance.
/// Both orientations of a pair are candidates but a family uses each
/// unordered pair at most once. Greedy passes first, then a bounded
/// exhaustive search; nullopt means no family of k_target rings was found.
std::optional<RingFamily> find_ring_family(const FiniteMetricSpace& m, double epsilon, std::size_t k_target);

/// n functions on M, each a list of point values.
using LipTuple = std::vector<std::vector<double>>;

/// For each ring j: restricts z to N_j = (M minus the ring) plus tau_j, sets
/// the value z^i(t_j) + rho_j at tau_j and extends with constant 1 + eps.
/// Throws PreconditionError if some seminorm of z exceeds 1 + 1e-12, and
/// InternalInconsistency if a restricted seminorm exceeds 1 + eps.
std::vector<LipTuple> ivakhno_construct(const FiniteMetricSpace& m, const LipTuple& z, const RingFamily& family);

/// Checks, for the first k constructed tuples: seminorms <= 1 + eps,
/// (1/n) lip(sum_i z_j^i) >= 1 with the pair (t_j, tau_j) evaluated
/// explicitly, and lip(z^i - mean_j z_j^i) <= (4 + 2 eps)/k.
CertificateReport ivakhno_verify(const FiniteMetricSpace& m, const LipTuple& z, const std::vector<LipTuple>& built,
                                 const RingFamily& family, std::size_t k);

/// n functions with seminorm exactly 1 (up to rounding), reproducible per seed.
LipTuple sample_unit_lipschitz(const FiniteMetricSpace& m, std::size_t n, std::uint64_t seed);

/// Nonempty subset of the base with a distinguished point.
struct BaseSet {
    std::vector<std::size_t> points;
    std::size_t pick = 0;
};

/// Checks the module is fmod(N, fiber) and that e, z have the right sizes;
/// z is a flat k-tuple of sections. Returns the m tuples z_j whose components
/// equal e on O_j and the corresponding component of z elsewhere.
/// Throws ParameterError for overlapping or empty sets or a pick outside its
/// set, PreconditionError naming t if ||e(t)|| != 1 or if ||z|| > 1.
std::vector<std::vector<double>> centralizer_construct(const Space& module, std::size_t k,
                                                       const std::vector<double>& z, const std::vector<double>& e,
                                                       const std::vector<BaseSet>& sets);

/// Checks ||z_j|| <= 1, (1/k)||sum_i z_j^i|| >= 1 (with the value at pick_j
/// reported as witness) and ||z - mean_j z_j|| <= 2/m, all with slack 1e-12.
CertificateReport centralizer_verify(const Space& module, std::size_t k, const std::vector<double>& z,
                                     const std::vector<std::vector<double>>& built, const std::vector<BaseSet>& sets);

/// Singleton sets {0}, {1}, ..., {m-1} with picks at their only point.
std::vector<BaseSet> singleton_sets(std::size_t m);

}  // namespace usd2p
