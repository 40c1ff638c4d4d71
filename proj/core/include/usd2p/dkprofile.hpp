#pragma once

// Profiles k -> D_k^{n,eps,alpha}(X), the sup over the unit ball of
// l_inf^n(X) of d(z, C_k). Every entry is a bracket with provenance:
//
//   lower  certified: max over candidates z of a grid-certified lower bound
//          on d(z, C_k) (0 when no grid applies);
//   upper  heuristic: max over the sampled candidates of the best upper bound
//          found for d(z, C_k). It estimates D_k but does not bound it, since
//          only finitely many z are visited. Rigorous upper bounds come from
//          constructive_dk_upper.

#include "usd2p/certificates.hpp"
#include "usd2p/hullgeom.hpp"
#include "usd2p/lipmetric.hpp"
#include "usd2p/spaces.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace usd2p {

struct DkEntry {
    std::size_t k = 0;
    DistanceBracket bracket;         // lower certified, upper heuristic (see above)
    std::size_t witness_id = 0;      // candidate index attaining the upper side
    std::vector<double> witness_z;
    bool certified = false;          // false: lower side is 0 and carries no information
};

/// Per-candidate record, kept so later runs can warm-start from it.
struct CandidateTrace {
    std::vector<double> z;
    std::vector<double> upper;                       // aligned with DkProfile::entries
    std::vector<ConvexDecomposition> decomposition;  // aligned with DkProfile::entries
};

struct DkProfile {
    Space space = Space::lp(Exponent(2.0), 1);  // X
    std::size_t n = 1;
    double epsilon = 0.1;
    double alpha = 1.0;
    std::uint64_t seed = 0;
    std::vector<DkEntry> entries;  // ascending k
    std::vector<CandidateTrace> traces;

    const DkEntry* at(std::size_t k) const;
};

struct DkOptions {
    std::size_t candidates = 24;    // random candidates besides the structured ones
    std::size_t budget = 60;        // descent budget per (z, k)
    std::uint64_t seed = 0;
    double resolution = 0.0;        // grid step; 0 disables the grid oracle
    std::size_t grid_top = 4;       // candidates per k that receive a grid bracket
    std::size_t grid_max_points = 10'000'000;
    /// With a positive resolution: throw CapabilityRefusal instead of
    /// silently skipping the grid when it exceeds grid_max_points.
    bool require_grid = false;
    /// Seed each z with the centralizer decomposition when X is a function
    /// module or l_inf^d.
    bool constructive_seeds = true;
    /// Profile over the same candidates whose decompositions are feasible here
    /// (smaller eps or alpha); used as warm starts so this profile never
    /// exceeds it on any candidate.
    const DkProfile* dominating = nullptr;
};

/// Structured adversaries (alternating-sign block tuples, ball vertices)
/// followed by `random` seeded samples of the unit ball of l_inf^n(X).
/// Independent of eps and alpha.
std::vector<std::vector<double>> dk_candidates(const Space& x, std::size_t n, std::size_t random, std::uint64_t seed);

/// Throws ParameterError for an empty k range or invalid parameters.
DkProfile estimate_dk(const Space& x, std::size_t n, double epsilon, double alpha, const std::vector<std::size_t>& ks,
                      const DkOptions& options = {});

enum class ConstructiveRoute { Centralizer, Ivakhno };

struct ConstructiveConfig {
    ConstructiveRoute route = ConstructiveRoute::Centralizer;
    std::size_t k_max = 8;
    std::size_t panel = 16;  // random z per k, besides the adversarial ones
    std::uint64_t seed = 0;
    // Ivakhno route only.
    const FiniteMetricSpace* metric = nullptr;
    std::optional<RingFamily> family;  // searched with target k_max when absent
};

struct ConstructiveBound {
    std::string route;
    std::map<std::size_t, double> upper;  // k -> rigorous upper bound on D_k
    std::size_t capacity = 0;             // base size or family size
    CertificateReport panel;              // every verification that backs `upper`
};

/// Centralizer route: X = fmod(N, fiber) or lp(inf, d) (as fmod(d, R)) gives
/// D_k <= 2/k for k <= N. Ivakhno route: X = Lip(M) with a ring family of size
/// K gives the plus-set bound D_k^{eps+} <= (4 + 2 eps)/k for k <= K.
/// Entries past the capacity are absent. Throws InternalInconsistency
/// naming the check if any panel verification fails, NotFoundError when no
/// ring family exists.
ConstructiveBound constructive_dk_upper(const Space& x, std::size_t n, double epsilon,
                                       const ConstructiveConfig& config);

struct FloorReport {
    std::vector<DkEntry> entries;  // k = 1..k_max, lowers monotonized
    double floor = 0.0;            // certified lower bound valid for every D_k, k <= k_max
    double resolution = 0.0;
    double resolution_error = 0.0;  // covering constant * resolution
    bool conclusive = false;        // floor > 0 (beyond 1e-9)
};

/// Certified floor of the profile over k = 1..k_max from the grid oracle.
/// resolution 0 picks 0.01, or the finest admissible step when coarser. k_max = 0 gives an empty
/// report. Grid refusals propagate as CapabilityRefusal.
FloorReport dk_floor_check(const Space& x, std::size_t n, double epsilon, std::size_t k_max,
                           DkOptions options = {});

}  // namespace usd2p
