#include "usd2p/dkprofile.hpp"

#include "usd2p/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>
#include <string>

namespace usd2p {

namespace {

using Coords = std::vector<double>;

void normalize(const Space& s, Coords& v) {
    const double nv = s.norm(v);
    if (nv > 0.0)
        for (double& c : v) c /= nv;
}

// Function-module view of X: fmod(N, F) as is, lp(inf, d) as fmod(d, lp(inf, 1)).
std::optional<Space> module_view(const Space& x) {
    if (x.kind() == Space::Kind::FunctionModule) return x;
    if (x.kind() == Space::Kind::Lp && x.exponent().is_infinite())
        return Space::function_module(x.dim(), Space::lp(Exponent::infinity(), 1));
    return std::nullopt;
}

Coords unit_section(const Space& module) {
    const Space& fiber = module.inner();
    Coords u = extreme_candidates(fiber, 1).front();
    normalize(fiber, u);
    Coords e;
    for (std::size_t t = 0; t < module.count(); ++t) e.insert(e.end(), u.begin(), u.end());
    return e;
}

// Base points split round-robin into k nonempty sets.
std::vector<BaseSet> partition_base(std::size_t base, std::size_t k) {
    std::vector<BaseSet> sets(k);
    for (std::size_t t = 0; t < base; ++t) sets[t % k].points.push_back(t);
    for (auto& s : sets) s.pick = s.points.front();
    return sets;
}

std::vector<ConvexDecomposition> centralizer_seeds(const Space& module, std::size_t n, const Coords& z,
                                                   std::size_t k) {
    std::vector<ConvexDecomposition> out;
    if (k > module.count()) return out;
    const Coords e = unit_section(module);
    Coords minus_e(e);
    for (double& c : minus_e) c = -c;
    for (const Coords* sec : std::array<const Coords*, 2>{&e, &minus_e}) {
        for (const auto& sets : {partition_base(module.count(), k), singleton_sets(k)}) {
            ConvexDecomposition d;
            d.generators = centralizer_construct(module, n, z, *sec, sets);
            d.weights.assign(k, 1.0 / static_cast<double>(k));
            out.push_back(std::move(d));
        }
    }
    return out;
}

std::string io_num(double x) {
    char buf[64];
    const int len = std::snprintf(buf, sizeof buf, "%.6g", x);
    return std::string(buf, static_cast<std::size_t>(len));
}

CapabilityRefusal grid_refusal(const Space& x, const CmParams& params, double h, std::size_t limit) {
    const double finest = required_resolution(x, params, limit);
    return CapabilityRefusal("grid oracle refused: resolution " + io_num(h) + " in dimension " +
                             std::to_string(params.n * x.dim()) + " needs more than " + std::to_string(limit) +
                             " points; " +
                             (std::isfinite(finest) ? "the finest admissible resolution is " + io_num(finest)
                                                    : std::string("no resolution fits this point cap")));
}

std::uint64_t mix(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    std::uint64_t h = seed ^ 0x9e3779b97f4a7c15ULL;
    for (std::uint64_t v : {a, b}) {
        h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        h *= 0xbf58476d1ce4e5b9ULL;
    }
    return h;
}

}  // namespace

const DkEntry* DkProfile::at(std::size_t k) const {
    for (const auto& e : entries)
        if (e.k == k) return &e;
    return nullptr;
}

std::vector<std::vector<double>> dk_candidates(const Space& x, std::size_t n, std::size_t random, std::uint64_t seed) {
    const Space t = tuple_space(x, n);
    std::vector<Coords> out;
    std::set<Coords> seen;
    auto push = [&](Coords v) {
        if (seen.insert(v).second) out.push_back(std::move(v));
    };
    for (Coords u : extreme_candidates(x, 8)) {
        normalize(x, u);
        Coords alt, split;
        for (std::size_t b = 0; b < n; ++b)
            for (double c : u) {
                alt.push_back(b % 2 == 0 ? c : -c);
                split.push_back(2 * b < n ? c : -c);
            }
        push(std::move(alt));
        push(std::move(split));
    }
    for (Coords v : extreme_candidates(t, 16)) {
        normalize(t, v);
        push(std::move(v));
    }
    for (auto& v : sample_unit_ball(t, random, seed)) push(std::move(v.coords));
    return out;
}

DkProfile estimate_dk(const Space& x, std::size_t n, double epsilon, double alpha, const std::vector<std::size_t>& ks,
                      const DkOptions& options) {
    if (ks.empty()) throw ParameterError("k range is empty");
    std::vector<std::size_t> sorted(ks);
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    for (std::size_t k : sorted) CmParams{n, epsilon, alpha, k}.validate();

    DkProfile prof;
    prof.space = x;
    prof.n = n;
    prof.epsilon = epsilon;
    prof.alpha = alpha;
    prof.seed = options.seed;

    const auto cands = dk_candidates(x, n, options.candidates, options.seed);
    const DkProfile* dom = options.dominating;
    if (dom && (dom->traces.size() != cands.size() || !(dom->space == x) || dom->n != n))
        throw ParameterError("dominating profile was computed over different candidates");
    const auto module = options.constructive_seeds ? module_view(x) : std::nullopt;

    prof.traces.resize(cands.size());
    for (std::size_t zi = 0; zi < cands.size(); ++zi) {
        CandidateTrace& tr = prof.traces[zi];
        tr.z = cands[zi];
        if (dom && dom->traces[zi].z != tr.z) throw ParameterError("dominating profile candidate mismatch");
        std::optional<ConvexDecomposition> previous;
        for (std::size_t ki = 0; ki < sorted.size(); ++ki) {
            const std::size_t k = sorted[ki];
            const CmParams params{n, epsilon, alpha, k};
            DescentOptions dopt;
            dopt.budget = options.budget;
            dopt.seed = mix(options.seed, zi, k);
            if (previous) dopt.warm_starts.push_back(*previous);
            if (dom)
                for (std::size_t dk = 0; dk < dom->entries.size(); ++dk)
                    if (dom->entries[dk].k == k) dopt.warm_starts.push_back(dom->traces[zi].decomposition[dk]);
            if (module)
                for (auto& s : centralizer_seeds(*module, n, tr.z, k)) dopt.warm_starts.push_back(std::move(s));
            auto br = dist_to_cm_upper(x, tr.z, params, dopt);
            tr.upper.push_back(br.upper);
            tr.decomposition.push_back(*br.witness);
            previous = *br.witness;
        }
    }

    for (std::size_t ki = 0; ki < sorted.size(); ++ki) {
        const std::size_t k = sorted[ki];
        const CmParams params{n, epsilon, alpha, k};
        DkEntry entry;
        entry.k = k;
        entry.bracket.seed = options.seed;
        entry.bracket.upper_method = "descent";

        const bool grid_ok = options.resolution > 0.0 &&
                             grid_point_count(x, params, options.resolution) <= options.grid_max_points;
        if (options.require_grid && options.resolution > 0.0 && !grid_ok)
            throw grid_refusal(x, params, options.resolution, options.grid_max_points);
        if (grid_ok) {
            std::vector<std::size_t> order(cands.size());
            std::iota(order.begin(), order.end(), 0);
            std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                return prof.traces[a].upper[ki] > prof.traces[b].upper[ki];
            });
            GridOptions gopt;
            gopt.resolution = options.resolution;
            gopt.max_points = options.grid_max_points;
            double best_lower = 0.0;
            std::string lower_method = "none";
            for (std::size_t r = 0; r < std::min(options.grid_top, order.size()); ++r) {
                CandidateTrace& tr = prof.traces[order[r]];
                const auto g = dist_to_cm_grid(x, tr.z, params, gopt);
                if (g.lower > best_lower || lower_method == "none") {
                    best_lower = std::max(best_lower, g.lower);
                    lower_method = g.lower_method;
                }
                if (g.upper < tr.upper[ki]) {
                    tr.upper[ki] = g.upper;
                    tr.decomposition[ki] = *g.witness;
                }
                entry.bracket.resolution = g.resolution;
                entry.bracket.covering_constant = g.covering_constant;
            }
            entry.bracket.lower = best_lower;
            entry.bracket.lower_method = lower_method;
            entry.certified = true;
        } else {
            entry.bracket.lower = 0.0;
            entry.bracket.lower_method = "heuristic-only";
        }

        std::size_t arg = 0;
        for (std::size_t zi = 1; zi < cands.size(); ++zi)
            if (prof.traces[zi].upper[ki] > prof.traces[arg].upper[ki]) arg = zi;
        entry.bracket.upper = prof.traces[arg].upper[ki];
        entry.bracket.witness = prof.traces[arg].decomposition[ki];
        entry.witness_id = arg;
        entry.witness_z = prof.traces[arg].z;
        if (!prof.entries.empty() && prof.entries.back().bracket.upper < entry.bracket.upper) {
            // D_k is nonincreasing in k.
            entry.bracket.upper = prof.entries.back().bracket.upper;
            entry.bracket.upper_method = "descent+running-min";
        }
        prof.entries.push_back(std::move(entry));
    }
    return prof;
}

ConstructiveBound constructive_dk_upper(const Space& x, std::size_t n, double epsilon,
                                       const ConstructiveConfig& config) {
    if (n < 1) throw ParameterError("arity n must be >= 1");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw ParameterError("epsilon must lie in (0,1)");
    ConstructiveBound out;

    auto fail = [](const CertificateReport& rep, const std::string& where) {
        const auto* f = rep.first_failure();
        throw InternalInconsistency(where + ": check " + f->name + " failed (value " + std::to_string(f->value) +
                                    ", bound " + std::to_string(f->bound) + ")");
    };

    if (config.route == ConstructiveRoute::Centralizer) {
        out.route = "centralizer";
        const auto module = module_view(x);
        if (!module)
            throw StructuralError("centralizer route needs fmod(N, fiber) or lp(inf, d), got " + x.to_string());
        out.capacity = module->count();
        const Coords e = unit_section(*module);
        const Space tuple = Space::sup_tuple(n, *module);
        std::vector<Coords> panel;
        {
            Coords neg, alt;
            for (std::size_t i = 0; i < n; ++i)
                for (double c : e) {
                    neg.push_back(-c);
                    alt.push_back(i % 2 == 0 ? -c : c);
                }
            panel.push_back(std::move(neg));
            panel.push_back(std::move(alt));
            for (auto& v : sample_unit_ball(tuple, config.panel, config.seed)) panel.push_back(std::move(v.coords));
        }
        for (std::size_t k = 1; k <= std::min(config.k_max, out.capacity); ++k) {
            const auto sets = singleton_sets(k);
            for (std::size_t p = 0; p < panel.size(); ++p) {
                const auto built = centralizer_construct(*module, n, panel[p], e, sets);
                auto rep = centralizer_verify(*module, n, panel[p], built, sets);
                if (!rep.pass()) fail(rep, "centralizer panel z[" + std::to_string(p) + "], k=" + std::to_string(k));
                out.panel.append(rep);
            }
            out.upper[k] = 2.0 / static_cast<double>(k);
        }
        return out;
    }

    out.route = "ivakhno";
    if (!config.metric) throw ParameterError("the ring-family route needs a metric space");
    const FiniteMetricSpace& m = *config.metric;
    if (x.dim() != pair_count(m))
        throw StructuralError("space " + x.to_string() + " is not the Lipschitz space of the " +
                              std::to_string(m.size()) + "-point metric");
    RingFamily family;
    if (config.family) {
        family = *config.family;
        if (family.epsilon != epsilon) throw ParameterError("ring family certifies a different epsilon");
    } else {
        auto found = find_ring_family(m, epsilon, std::max<std::size_t>(config.k_max, 1));
        if (!found) throw NotFoundError("no ring family of size " + std::to_string(config.k_max) + " found");
        family = std::move(*found);
    }
    auto valid = validate_ring_family(m, family);
    if (!valid.pass()) fail(valid, "ring family");
    out.panel.append(valid);
    out.capacity = family.size();
    const std::size_t kmax = std::min(config.k_max, out.capacity);
    for (std::size_t p = 0; p < std::max<std::size_t>(config.panel, 1); ++p) {
        const auto z = sample_unit_lipschitz(m, n, mix(config.seed, p, n));
        const auto built = ivakhno_construct(m, z, family);
        for (std::size_t k = 1; k <= kmax; ++k) {
            auto rep = ivakhno_verify(m, z, built, family, k);
            if (!rep.pass()) fail(rep, "ring panel z[" + std::to_string(p) + "], k=" + std::to_string(k));
            out.panel.append(rep);
        }
    }
    for (std::size_t k = 1; k <= kmax; ++k) out.upper[k] = (4.0 + 2.0 * epsilon) / static_cast<double>(k);
    return out;
}

FloorReport dk_floor_check(const Space& x, std::size_t n, double epsilon, std::size_t k_max, DkOptions options) {
    FloorReport rep;
    if (k_max == 0) return rep;
    const CmParams widest{n, epsilon, 1.0, k_max};
    widest.validate();
    const std::size_t limit = options.grid_max_points;
    if (options.resolution <= 0.0) {
        options.resolution = std::max(0.01, required_resolution(x, widest, limit));
        if (!std::isfinite(options.resolution))
            throw CapabilityRefusal("grid oracle refused: dimension " + std::to_string(n * x.dim()) +
                                    " admits no grid within " + std::to_string(limit) + " points");
    } else if (grid_point_count(x, widest, options.resolution) > limit) {
        throw grid_refusal(x, widest, options.resolution, limit);
    }
    std::vector<std::size_t> ks(k_max);
    std::iota(ks.begin(), ks.end(), 1);
    auto prof = estimate_dk(x, n, epsilon, 1.0, ks, options);
    rep.entries = std::move(prof.entries);
    for (std::size_t i = rep.entries.size() - 1; i-- > 0;) {
        auto& cur = rep.entries[i].bracket;
        const auto& next = rep.entries[i + 1].bracket;
        if (next.lower > cur.lower) {
            // D_k >= D_{k+1}.
            cur.lower = next.lower;
            cur.lower_method = next.lower_method + "+monotone";
        }
    }
    rep.floor = rep.entries.back().bracket.lower;
    rep.resolution = options.resolution;
    const Coords halves(n * x.dim(), 0.5);
    rep.resolution_error = tuple_space(x, n).norm(halves) * options.resolution;
    rep.conclusive = rep.floor > 1e-9;
    return rep;
}

}  // namespace usd2p
