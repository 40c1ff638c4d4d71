#include "usd2p/certificates.hpp"

#include "usd2p/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

namespace usd2p {

namespace {

std::string idx(const char* prefix, std::size_t i) { return std::string(prefix) + "[" + std::to_string(i) + "]"; }

}  // namespace

void CertificateReport::require_at_most(std::string name, double value, double bound) {
    checks.push_back({std::move(name), value, bound, bound - value, value <= bound});
}

void CertificateReport::require_at_least(std::string name, double value, double bound) {
    checks.push_back({std::move(name), value, bound, value - bound, value >= bound});
}

void CertificateReport::require_above(std::string name, double value, double bound) {
    checks.push_back({std::move(name), value, bound, value - bound, value > bound});
}

void CertificateReport::append(const CertificateReport& other) {
    checks.insert(checks.end(), other.checks.begin(), other.checks.end());
}

bool CertificateReport::pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const CertificateCheck& c) { return c.pass; });
}

const CertificateCheck* CertificateReport::first_failure() const {
    for (const auto& c : checks)
        if (!c.pass) return &c;
    return nullptr;
}

// --- ring families -------------------------------------------------------------

std::vector<char> ring_points(const FiniteMetricSpace& m, const RingEntry& e) {
    std::vector<char> in(m.size(), 0);
    for (std::size_t s = 0; s < m.size(); ++s) {
        const double d = m(e.t, s);
        in[s] = (d > e.r && d <= e.R) ? 1 : 0;
    }
    return in;
}

CertificateReport validate_ring_family(const FiniteMetricSpace& m, const RingFamily& family) {
    CertificateReport rep;
    const double eps = family.epsilon;
    rep.require_above("epsilon", eps, 0.0);
    std::vector<std::vector<char>> rings;
    for (std::size_t j = 0; j < family.entries.size(); ++j) {
        const RingEntry& e = family.entries[j];
        const std::string p = idx("ring", j);
        const bool in_range = e.t < m.size() && e.tau < m.size() && e.t != e.tau;
        rep.require_at_most(p + ".indices", in_range ? 0.0 : 1.0, 0.0);
        if (!in_range) continue;
        rep.require_at_most(p + ".rho_is_distance", std::abs(e.rho - m(e.t, e.tau)), 0.0);
        rep.require_above(p + ".r_positive", e.r, 0.0);
        rep.require_above(p + ".rho_above_r", e.rho - e.r, 0.0);
        rep.require_above(p + ".R_above_rho", e.R - e.rho, 0.0);
        const double outer = e.R > e.rho ? 2.0 * e.rho / (e.R - e.rho) : INFINITY;
        const double inner = e.rho > e.r ? 2.0 * e.r / (e.rho - e.r) : INFINITY;
        rep.require_at_most(p + ".outer_ratio", outer, eps);
        rep.require_at_most(p + ".inner_ratio", inner, eps);
        rings.push_back(ring_points(m, e));
    }
    for (std::size_t a = 0; a < rings.size(); ++a)
        for (std::size_t b = a + 1; b < rings.size(); ++b) {
            std::size_t shared = 0;
            for (std::size_t s = 0; s < m.size(); ++s) shared += (rings[a][s] && rings[b][s]) ? 1 : 0;
            rep.require_at_most("rings[" + std::to_string(a) + "," + std::to_string(b) + "].shared_points",
                                static_cast<double>(shared), 0.0);
        }
    return rep;
}

namespace {

struct Candidate {
    RingEntry entry;
    std::vector<std::uint64_t> bits;
    std::size_t count = 0;
    std::size_t pair = 0;  // unordered {t, tau}; a family uses each pair once
};

bool disjoint(const Candidate& a, const Candidate& b) {
    if (a.pair == b.pair) return false;
    for (std::size_t w = 0; w < a.bits.size(); ++w)
        if (a.bits[w] & b.bits[w]) return false;
    return true;
}

std::vector<std::size_t> greedy(const std::vector<Candidate>& cands, const std::vector<std::size_t>& order) {
    std::vector<std::size_t> chosen;
    for (std::size_t c : order) {
        bool ok = true;
        for (std::size_t prev : chosen)
            if (!disjoint(cands[c], cands[prev])) {
                ok = false;
                break;
            }
        if (ok) chosen.push_back(c);
    }
    return chosen;
}

class Backtrack {
public:
    Backtrack(const std::vector<Candidate>& cands, std::vector<std::size_t> order, std::size_t target)
        : cands_(cands), order_(std::move(order)), target_(target) {}

    std::vector<std::size_t> run() {
        dfs(0);
        return found_;
    }

private:
    bool dfs(std::size_t from) {
        if (current_.size() == target_) {
            found_ = current_;
            return true;
        }
        if (++nodes_ > kNodeBudget) return false;
        if (order_.size() - from < target_ - current_.size()) return false;
        for (std::size_t p = from; p < order_.size(); ++p) {
            const std::size_t c = order_[p];
            bool ok = true;
            for (std::size_t prev : current_)
                if (!disjoint(cands_[c], cands_[prev])) {
                    ok = false;
                    break;
                }
            if (!ok) continue;
            current_.push_back(c);
            if (dfs(p + 1)) return true;
            current_.pop_back();
            if (nodes_ > kNodeBudget) return false;
        }
        return false;
    }

    static constexpr std::size_t kNodeBudget = 2'000'000;
    const std::vector<Candidate>& cands_;
    std::vector<std::size_t> order_;
    std::size_t target_;
    std::vector<std::size_t> current_, found_;
    std::size_t nodes_ = 0;
};

}  // namespace

std::optional<RingFamily> find_ring_family(const FiniteMetricSpace& m, double epsilon, std::size_t k_target) {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw ParameterError("ring search needs epsilon > 0");
    if (k_target < 1) throw ParameterError("ring search needs k_target >= 1");
    const std::size_t n = m.size();
    const std::size_t words = (n + 63) / 64;

    std::vector<Candidate> cands;
    cands.reserve(n * (n - 1));
    for (std::size_t t = 0; t < n; ++t)
        for (std::size_t tau = 0; tau < n; ++tau) {
            if (t == tau) continue;
            Candidate c;
            RingEntry& e = c.entry;
            e.t = t;
            e.tau = tau;
            e.rho = m(t, tau);
            c.pair = std::min(t, tau) * n + std::max(t, tau);
            const double r_star = e.rho * epsilon / (2.0 + epsilon);
            const double R_star = e.rho * (2.0 + epsilon) / epsilon;
            e.r = 0.5 * r_star;
            double realized = e.rho;
            for (std::size_t s = 0; s < n; ++s) {
                const double d = m(t, s);
                if (d <= 2.0 * R_star) realized = std::max(realized, d);
            }
            e.R = std::max(R_star * (1.0 + 1e-9), realized);
            c.bits.assign(words, 0);
            for (std::size_t s = 0; s < n; ++s) {
                const double d = m(t, s);
                if (d > e.r && d <= e.R) {
                    c.bits[s / 64] |= std::uint64_t{1} << (s % 64);
                    ++c.count;
                }
            }
            cands.push_back(std::move(c));
        }

    std::vector<std::size_t> by_rho(cands.size());
    std::iota(by_rho.begin(), by_rho.end(), 0);
    std::stable_sort(by_rho.begin(), by_rho.end(), [&](std::size_t a, std::size_t b) {
        if (cands[a].entry.rho != cands[b].entry.rho) return cands[a].entry.rho > cands[b].entry.rho;
        return cands[a].count < cands[b].count;
    });
    std::vector<std::size_t> by_size(cands.size());
    std::iota(by_size.begin(), by_size.end(), 0);
    std::stable_sort(by_size.begin(), by_size.end(), [&](std::size_t a, std::size_t b) {
        if (cands[a].count != cands[b].count) return cands[a].count < cands[b].count;
        return cands[a].entry.rho > cands[b].entry.rho;
    });

    std::vector<std::size_t> chosen = greedy(cands, by_rho);
    if (chosen.size() < k_target) {
        auto second = greedy(cands, by_size);
        if (second.size() > chosen.size()) chosen = std::move(second);
    }
    if (chosen.size() < k_target) {
        auto exact = Backtrack(cands, by_size, k_target).run();
        if (exact.empty()) return std::nullopt;
        chosen = std::move(exact);
    }

    RingFamily fam;
    fam.epsilon = epsilon;
    for (std::size_t c : chosen) fam.entries.push_back(cands[c].entry);
    return fam;
}

// --- Lipschitz construction -------------------------------------------------------

std::vector<LipTuple> ivakhno_construct(const FiniteMetricSpace& m, const LipTuple& z, const RingFamily& family) {
    const double eps = family.epsilon;
    for (std::size_t i = 0; i < z.size(); ++i) {
        const double s = lip_seminorm(m, z[i]);
        if (s > 1.0 + 1e-12)
            throw PreconditionError("component " + std::to_string(i) + " has seminorm " + std::to_string(s) +
                                    " > 1");
    }
    std::vector<LipTuple> out;
    out.reserve(family.size());
    for (std::size_t j = 0; j < family.size(); ++j) {
        const RingEntry& e = family.entries[j];
        if (e.t >= m.size() || e.tau >= m.size())
            throw StructuralError("ring " + std::to_string(j) + " references a point outside the space");
        const auto ring = ring_points(m, e);
        std::vector<std::size_t> mask;
        for (std::size_t s = 0; s < m.size(); ++s)
            if (!ring[s] || s == e.tau) mask.push_back(s);

        LipTuple built;
        for (std::size_t i = 0; i < z.size(); ++i) {
            LipFunction f{z[i], mask};
            f.values[e.tau] = z[i][e.t] + e.rho;
            const double restricted = lip_seminorm(m, f);
            if (restricted > 1.0 + eps + 1e-9)
                throw InternalInconsistency("ring " + std::to_string(j) + ", component " + std::to_string(i) +
                                            ": restricted seminorm " + std::to_string(restricted) +
                                            " exceeds 1 + eps; the ring family is not admissible");
            built.push_back(mcshane_extend(m, f, std::max(1.0 + eps, restricted)).values);
        }
        out.push_back(std::move(built));
    }
    return out;
}

CertificateReport ivakhno_verify(const FiniteMetricSpace& m, const LipTuple& z, const std::vector<LipTuple>& built,
                                 const RingFamily& family, std::size_t k) {
    CertificateReport rep;
    const double eps = family.epsilon;
    const std::size_t n = z.size();
    if (k > built.size() || k > family.size())
        throw ParameterError("k = " + std::to_string(k) + " exceeds the " + std::to_string(built.size()) +
                             " constructed tuples");
    if (k == 0 || n == 0) return rep;

    for (std::size_t j = 0; j < k; ++j) {
        const std::string p = idx("tuple", j);
        if (built[j].size() != n) throw StructuralError(p + " has the wrong arity");
        std::vector<double> sum(m.size(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            rep.require_at_most(p + idx(".seminorm", i), lip_seminorm(m, built[j][i]), 1.0 + eps + 1e-9);
            for (std::size_t s = 0; s < m.size(); ++s) sum[s] += built[j][i][s];
        }
        const RingEntry& e = family.entries[j];
        const double witness = std::abs(sum[e.t] - sum[e.tau]) / (static_cast<double>(n) * m(e.t, e.tau));
        rep.require_at_least(p + ".witness_pair", witness, 1.0 - 1e-9);
        rep.require_at_least(p + ".mean_seminorm", lip_seminorm(m, sum) / static_cast<double>(n), 1.0 - 1e-9);
    }
    const double bound = (4.0 + 2.0 * eps) / static_cast<double>(k) + 1e-9;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> diff(z[i]);
        for (std::size_t j = 0; j < k; ++j)
            for (std::size_t s = 0; s < m.size(); ++s) diff[s] -= built[j][i][s] / static_cast<double>(k);
        rep.require_at_most("approximation[k=" + std::to_string(k) + "]" + idx("", i), lip_seminorm(m, diff), bound);
    }
    return rep;
}

LipTuple sample_unit_lipschitz(const FiniteMetricSpace& m, std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    LipTuple out;
    for (std::size_t i = 0; i < n; ++i) {
        // Distance-scaled random values, so every scale of M carries some slope.
        std::vector<double> v(m.size());
        const std::size_t anchor = std::uniform_int_distribution<std::size_t>(0, m.size() - 1)(rng);
        for (std::size_t s = 0; s < m.size(); ++s) v[s] = m(anchor, s) * unit(rng) + 1e-3 * m.diameter() * unit(rng);
        double sn = lip_seminorm(m, v);
        if (sn == 0.0) {
            for (std::size_t s = 0; s < m.size(); ++s) v[s] = m(0, s);
            sn = lip_seminorm(m, v);
        }
        for (double& x : v) x /= sn;
        // Guard against the quotient rounding to slightly above 1.
        const double after = lip_seminorm(m, v);
        if (after > 1.0)
            for (double& x : v) x /= after * (1.0 + 1e-15);
        out.push_back(std::move(v));
    }
    return out;
}

// --- centralizer construction ---------------------------------------------------------

namespace {

void check_module(const Space& module) {
    if (module.kind() != Space::Kind::FunctionModule)
        throw StructuralError("centralizer construction needs a function module, got " + module.to_string());
}

}  // namespace

std::vector<BaseSet> singleton_sets(std::size_t m) {
    std::vector<BaseSet> out;
    for (std::size_t j = 0; j < m; ++j) out.push_back({{j}, j});
    return out;
}

std::vector<std::vector<double>> centralizer_construct(const Space& module, std::size_t k,
                                                       const std::vector<double>& z, const std::vector<double>& e,
                                                       const std::vector<BaseSet>& sets) {
    check_module(module);
    const Space& fiber = module.inner();
    const std::size_t base = module.count();
    const std::size_t fd = fiber.dim();
    if (k < 1) throw ParameterError("tuple arity k must be >= 1");
    require_dim(module, e);
    const Space tuple = Space::sup_tuple(k, module);
    require_dim(tuple, z);

    for (std::size_t t = 0; t < base; ++t) {
        const double nt = fiber.norm(std::span<const double>(e).subspan(t * fd, fd));
        if (std::abs(nt - 1.0) > 1e-12)
            throw PreconditionError("extreme section has norm " + std::to_string(nt) + " at base point t=" +
                                    std::to_string(t));
    }
    const double zn = tuple.norm(z);
    if (zn > 1.0 + 1e-12) throw PreconditionError("z has norm " + std::to_string(zn) + " > 1");

    std::vector<int> owner(base, -1);
    for (std::size_t j = 0; j < sets.size(); ++j) {
        const BaseSet& o = sets[j];
        if (o.points.empty()) throw ParameterError(idx("set", j) + " is empty");
        if (std::find(o.points.begin(), o.points.end(), o.pick) == o.points.end())
            throw ParameterError(idx("set", j) + ": picked point " + std::to_string(o.pick) + " is not in the set");
        for (std::size_t t : o.points) {
            if (t >= base) throw ParameterError(idx("set", j) + " contains base point " + std::to_string(t) +
                                                " outside 0.." + std::to_string(base - 1));
            if (owner[t] >= 0 && owner[t] != static_cast<int>(j))
                throw ParameterError("sets " + std::to_string(owner[t]) + " and " + std::to_string(j) +
                                     " overlap at base point " + std::to_string(t));
            owner[t] = static_cast<int>(j);
        }
    }

    std::vector<std::vector<double>> out;
    out.reserve(sets.size());
    for (const BaseSet& o : sets) {
        std::vector<double> zj = z;
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t t : o.points)
                for (std::size_t c = 0; c < fd; ++c) zj[i * module.dim() + t * fd + c] = e[t * fd + c];
        out.push_back(std::move(zj));
    }
    return out;
}

CertificateReport centralizer_verify(const Space& module, std::size_t k, const std::vector<double>& z,
                                     const std::vector<std::vector<double>>& built,
                                     const std::vector<BaseSet>& sets) {
    check_module(module);
    CertificateReport rep;
    const Space tuple = Space::sup_tuple(k, module);
    require_dim(tuple, z);
    const std::size_t m = built.size();
    if (sets.size() != m) throw StructuralError("one base set per constructed tuple is required");
    if (m == 0) return rep;
    const std::size_t md = module.dim();
    const std::size_t fd = module.inner().dim();

    std::vector<double> mean(tuple.dim(), 0.0);
    for (std::size_t j = 0; j < m; ++j) {
        const auto& zj = built[j];
        require_dim(tuple, zj);
        const std::string p = idx("tuple", j);
        rep.require_at_most(p + ".norm", tuple.norm(zj), 1.0 + 1e-12);
        std::vector<double> sum(md, 0.0);
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t c = 0; c < md; ++c) sum[c] += zj[i * md + c];
        const std::size_t t = sets[j].pick;
        const double witness =
            module.inner().norm(std::span<const double>(sum).subspan(t * fd, fd)) / static_cast<double>(k);
        rep.require_at_least(p + ".witness_at_pick", witness, 1.0 - 1e-12);
        rep.require_at_least(p + ".mean_norm", module.norm(sum) / static_cast<double>(k), 1.0 - 1e-12);
        for (std::size_t c = 0; c < mean.size(); ++c) mean[c] += zj[c] / static_cast<double>(m);
    }
    std::vector<double> diff(z);
    for (std::size_t c = 0; c < diff.size(); ++c) diff[c] -= mean[c];
    rep.require_at_most("approximation[m=" + std::to_string(m) + "]", tuple.norm(diff),
                        2.0 / static_cast<double>(m) + 1e-12);
    return rep;
}

}  // namespace usd2p
