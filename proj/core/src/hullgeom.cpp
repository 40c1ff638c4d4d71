#include "usd2p/hullgeom.hpp"

#include "matrix_game.hpp"
#include "usd2p/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

namespace usd2p {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using Coords = std::vector<double>;

double mean_norm(const Space& tuple, std::span<const double> g, Coords& scratch) {
    scratch.resize(tuple.block_dim());
    mean_block(tuple, g, scratch);
    return tuple.inner().norm(scratch);
}

std::string num(double x) {
    char buf[64];
    const int len = std::snprintf(buf, sizeof buf, "%.6g", x);
    return std::string(buf, static_cast<std::size_t>(len));
}

}  // namespace

void CmParams::validate() const {
    if (n < 1) throw ParameterError("arity n must be >= 1");
    if (m < 1) throw ParameterError("hull size m must be >= 1");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw ParameterError("epsilon must lie in (0,1), got " + num(epsilon));
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ParameterError("alpha must be positive, got " + num(alpha));
    if (!(alpha > 1.0 - epsilon))
        throw ParameterError("alpha = " + num(alpha) + " <= 1 - epsilon: the generating set is empty");
}

Space tuple_space(const Space& x, std::size_t n) { return Space::sup_tuple(n, x); }

MembershipReport cm_member_check(const Space& x, const CmParams& params, std::span<const double> g, double tol) {
    const Space t = tuple_space(x, params.n);
    require_dim(t, g);
    MembershipReport r;
    Coords scratch;
    r.norm = t.norm(g);
    r.mean_norm = mean_norm(t, g, scratch);
    r.norm_ok = r.norm <= params.alpha + tol;
    r.mean_ok = r.mean_norm > params.mean_threshold() - tol;
    return r;
}

std::vector<double> ConvexDecomposition::point() const {
    if (generators.empty()) return {};
    Coords p(generators.front().size(), 0.0);
    for (std::size_t j = 0; j < generators.size(); ++j)
        for (std::size_t i = 0; i < p.size(); ++i) p[i] += weights[j] * generators[j][i];
    return p;
}

bool ConvexDecomposition::valid(const Space& x, const CmParams& params, double tol) const {
    if (weights.size() != generators.size() || generators.empty() || generators.size() > params.m) return false;
    double sum = 0.0;
    for (double w : weights) {
        if (w < 0.0) return false;
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12) return false;
    const std::size_t d = params.n * x.dim();
    for (const auto& g : generators) {
        if (g.size() != d) return false;
        if (!cm_member_check(x, params, g, tol).pass()) return false;
    }
    return true;
}

// --- generator sources --------------------------------------------------------

std::pair<std::size_t, double> GeneratorSource::maximize(std::span<const double> phi) const {
    Coords buf(dim());
    std::size_t arg = 0;
    double best = -kInf;
    for (std::size_t i = 0; i < size(); ++i) {
        fetch(i, buf);
        const double v = usd2p::apply(phi, buf);
        if (v > best) {
            best = v;
            arg = i;
        }
    }
    return {arg, best};
}

GeneratorList::GeneratorList(std::vector<std::vector<double>> items) : items_(std::move(items)) {
    if (!items_.empty()) dim_ = items_.front().size();
    for (const auto& it : items_)
        if (it.size() != dim_)
            throw StructuralError("generator list mixes dimensions " + std::to_string(dim_) + " and " +
                                  std::to_string(it.size()));
}

void GeneratorList::fetch(std::size_t i, std::span<double> out) const {
    std::copy(items_[i].begin(), items_[i].end(), out.begin());
}

std::vector<double> MinNormResult::dense_weights(std::size_t count) const {
    Coords w(count, 0.0);
    for (std::size_t k = 0; k < support.size(); ++k) w[support[k]] += weights[k];
    return w;
}

// --- min-norm point -------------------------------------------------------------

MinNormResult min_norm_point(const Space& space, std::span<const double> z, const GeneratorSource& s,
                             const MinNormOptions& opt) {
    require_dim(space, z);
    if (s.size() == 0) throw PreconditionError("min_norm_point: generator set is empty");
    if (s.dim() != space.dim())
        throw StructuralError("dimension mismatch: generators have " + std::to_string(s.dim()) +
                              " coordinates, space " + space.to_string() + " has dimension " +
                              std::to_string(space.dim()));
    const std::size_t dim = space.dim();

    std::vector<std::size_t> col_index;
    std::vector<Coords> col;
    std::vector<Coords> cut;
    std::vector<double> cut_at_z;
    // phi_c(s_j), row-major by cut, grown lazily.
    std::vector<std::vector<double>> cut_at_col;

    auto add_col = [&](std::size_t idx) {
        if (std::find(col_index.begin(), col_index.end(), idx) != col_index.end()) return false;
        Coords v(dim);
        s.fetch(idx, v);
        for (std::size_t c = 0; c < cut.size(); ++c) cut_at_col[c].push_back(usd2p::apply(cut[c], v));
        col_index.push_back(idx);
        col.push_back(std::move(v));
        return true;
    };
    auto drop_col = [&](std::size_t pos) {
        col_index.erase(col_index.begin() + static_cast<std::ptrdiff_t>(pos));
        col.erase(col.begin() + static_cast<std::ptrdiff_t>(pos));
        for (auto& row : cut_at_col) row.erase(row.begin() + static_cast<std::ptrdiff_t>(pos));
    };
    auto add_cut = [&](Coords phi) {
        for (const auto& c : cut) {
            double diff = 0.0;
            for (std::size_t i = 0; i < dim; ++i) diff = std::max(diff, std::abs(c[i] - phi[i]));
            if (diff <= 1e-15) return false;
        }
        std::vector<double> row;
        row.reserve(col.size());
        for (const auto& v : col) row.push_back(usd2p::apply(phi, v));
        cut_at_z.push_back(usd2p::apply(phi, z));
        cut_at_col.push_back(std::move(row));
        cut.push_back(std::move(phi));
        return true;
    };
    Coords w(dim);
    auto norming_of_residual = [&](std::span<const double> h) {
        for (std::size_t i = 0; i < dim; ++i) w[i] = z[i] - h[i];
        Coords phi(dim);
        space.norming_functional(w, phi);
        return phi;
    };

    const std::size_t preload = std::min(s.size(), std::max<std::size_t>(opt.initial_columns, 1));
    if (s.size() <= opt.initial_columns) {
        for (std::size_t i = 0; i < preload; ++i) add_col(i);
    } else {
        add_col(0);
    }
    if (opt.max_columns)
        while (col.size() > opt.max_columns) drop_col(col.size() - 1);
    for (std::size_t j = 0; j < col.size(); ++j) add_cut(norming_of_residual(col[j]));

    MinNormResult best;
    best.distance = kInf;
    double best_lower = -kInf;
    Coords best_phi;
    Coords h(dim), phibar(dim);
    std::vector<double> last_weights;

    std::size_t it = 0;
    for (; it < opt.max_iterations; ++it) {
        const std::size_t rows = cut.size();
        const std::size_t cols = col.size();
        std::vector<double> payoff(rows * cols);
        for (std::size_t c = 0; c < rows; ++c)
            for (std::size_t j = 0; j < cols; ++j) payoff[c * cols + j] = cut_at_z[c] - cut_at_col[c][j];
        const auto game = detail::solve_matrix_game(payoff, rows, cols);
        last_weights = game.column_strategy;

        std::fill(h.begin(), h.end(), 0.0);
        for (std::size_t j = 0; j < cols; ++j)
            if (game.column_strategy[j] > 0.0)
                for (std::size_t i = 0; i < dim; ++i) h[i] += game.column_strategy[j] * col[j][i];
        for (std::size_t i = 0; i < dim; ++i) w[i] = z[i] - h[i];
        const double upper = space.norm(w);
        if (upper < best.distance) {
            best.distance = upper;
            best.hull_point = h;
            best.support.clear();
            best.weights.clear();
            for (std::size_t j = 0; j < cols; ++j)
                if (game.column_strategy[j] > 0.0) {
                    best.support.push_back(col_index[j]);
                    best.weights.push_back(game.column_strategy[j]);
                }
        }

        std::fill(phibar.begin(), phibar.end(), 0.0);
        for (std::size_t c = 0; c < rows; ++c)
            if (game.row_strategy[c] > 0.0)
                for (std::size_t i = 0; i < dim; ++i) phibar[i] += game.row_strategy[c] * cut[c][i];
        const double dn = space.dual_norm(phibar);
        if (dn > 1.0)
            for (double& x : phibar) x /= dn;
        const auto [arg, top] = s.maximize(phibar);
        const double lower = usd2p::apply(phibar, z) - top;
        if (lower > best_lower) {
            best_lower = lower;
            best_phi = phibar;
        }
        if (best.distance - std::max(best_lower, 0.0) <= opt.gap_tolerance) {
            best.converged = true;
            ++it;
            break;
        }
        if (best.distance <= opt.stop_below) {
            ++it;
            break;
        }

        const bool new_cut = add_cut(norming_of_residual(h));
        bool new_col = false;
        if (opt.max_columns && col.size() >= opt.max_columns &&
            std::find(col_index.begin(), col_index.end(), arg) == col_index.end()) {
            // Keep the working set at the cap: drop the lightest column.
            const auto lightest = static_cast<std::size_t>(
                std::min_element(last_weights.begin(), last_weights.end()) - last_weights.begin());
            if (last_weights[lightest] <= 0.0 || col.size() > 1) {
                drop_col(lightest);
                new_col = add_col(arg);
            }
        } else {
            new_col = add_col(arg);
        }
        if (!new_cut && !new_col) {
            ++it;
            break;
        }
        // Drop long-inactive cuts to keep the master small.
        if (cut.size() > 300) {
            std::vector<std::size_t> keep;
            for (std::size_t c = 0; c < rows; ++c)
                if (game.row_strategy[c] > 0.0 || c + 100 >= rows) keep.push_back(c);
            if (keep.size() < rows) {
                std::vector<Coords> cut2;
                std::vector<double> z2;
                std::vector<std::vector<double>> cc2;
                for (std::size_t c : keep) {
                    cut2.push_back(std::move(cut[c]));
                    z2.push_back(cut_at_z[c]);
                    cc2.push_back(std::move(cut_at_col[c]));
                }
                for (std::size_t c = rows; c < cut.size(); ++c) {
                    cut2.push_back(std::move(cut[c]));
                    z2.push_back(cut_at_z[c]);
                    cc2.push_back(std::move(cut_at_col[c]));
                }
                cut = std::move(cut2);
                cut_at_z = std::move(z2);
                cut_at_col = std::move(cc2);
            }
        }
    }
    best.iterations = it;
    best.lower = std::max(best_lower, 0.0);
    best.gap = std::max(best.distance - best.lower, 0.0);
    best.certificate = std::move(best_phi);
    return best;
}

MinNormResult min_norm_point(const Space& space, std::span<const double> z, const std::vector<std::vector<double>>& s,
                             const MinNormOptions& options) {
    return min_norm_point(space, z, GeneratorList(s), options);
}

// --- feasibility projection ---------------------------------------------------------

void project_feasible(const Space& x, const CmParams& params, std::span<double> g, std::span<const double> hint) {
    const Space t = tuple_space(x, params.n);
    require_dim(t, g);
    const std::size_t bd = x.dim();
    for (std::size_t b = 0; b < params.n; ++b) {
        auto blk = g.subspan(b * bd, bd);
        const double nb = x.norm(blk);
        if (nb > params.alpha)
            for (double& v : blk) v *= params.alpha / nb;
    }
    Coords mean(bd);
    mean_block(t, g, mean);
    const double mn = x.norm(mean);
    const double target = params.mean_threshold();
    if (mn >= target) return;

    Coords u(bd);
    if (mn > 1e-300) {
        for (std::size_t i = 0; i < bd; ++i) u[i] = mean[i] / mn;
    } else {
        if (hint.size() != bd) throw StructuralError("projection hint has wrong dimension");
        const double hn = x.norm(hint);
        for (std::size_t i = 0; i < bd; ++i) u[i] = hint[i] / hn;
    }
    const double a = std::min(params.alpha, 1.0);
    // mean and u are aligned, so the blended mean norm is linear in theta.
    const double base = mn > 1e-300 ? mn : 0.0;
    double theta = (target - base) / (a - base);
    theta = std::min(1.0, theta * (1.0 + 1e-12) + 1e-15);
    for (std::size_t b = 0; b < params.n; ++b)
        for (std::size_t i = 0; i < bd; ++i) {
            double& v = g[b * bd + i];
            v = (1.0 - theta) * v + theta * a * u[i];
        }
}

// --- alternating descent ------------------------------------------------------------

namespace {

struct DescentState {
    std::vector<Coords> gens;
    MinNormResult res;
};

class Descent {
public:
    Descent(const Space& x, std::span<const double> z, const CmParams& p, const DescentOptions& opt)
        : x_(x), t_(tuple_space(x, p.n)), z_(z.begin(), z.end()), p_(p), opt_(opt), rng_(opt.seed) {
        solver_.gap_tolerance = 1e-10;
        solver_.max_iterations = 500;
        hints_ = extreme_candidates(x_, 2 * x_.dim() + 8);
        for (auto& h : hints_) {
            const double nh = x_.norm(h);
            for (double& v : h) v /= nh;
        }
    }

    DistanceBracket run() {
        build_pool();
        DescentState state = greedy();
        for (const auto& warm : opt_.warm_starts) {
            if (warm.generators.empty() || !warm.valid(x_, p_)) continue;
            DescentState cand{warm.generators, evaluate(warm.generators)};
            if (cand.res.distance < state.res.distance) state = std::move(cand);
        }
        local_phase(state);

        DistanceBracket out;
        out.upper = state.res.distance;
        out.upper_method = "descent";
        out.lower = 0.0;
        out.lower_method = "none";
        out.solver_gap = state.res.gap;
        out.seed = opt_.seed;
        ConvexDecomposition dec;
        for (std::size_t k = 0; k < state.res.support.size(); ++k) {
            dec.weights.push_back(state.res.weights[k]);
            dec.generators.push_back(state.gens[state.res.support[k]]);
        }
        const double sum = std::accumulate(dec.weights.begin(), dec.weights.end(), 0.0);
        for (double& w : dec.weights) w /= sum;
        out.witness = std::move(dec);
        return out;
    }

private:
    MinNormResult evaluate(const std::vector<Coords>& gens) {
        ++evals_;
        return min_norm_point(t_, z_, gens, solver_);
    }

    std::span<const double> mean_hint(std::span<const double> g) {
        scratch_.resize(x_.dim());
        mean_block(t_, g, scratch_);
        const double mn = x_.norm(scratch_);
        if (mn <= 1e-300) return hints_.front();
        for (double& v : scratch_) v /= mn;
        return scratch_;
    }

    Coords projected(Coords g, std::span<const double> hint) {
        Coords h(hint.begin(), hint.end());
        project_feasible(x_, p_, g, h);
        return g;
    }

    void build_pool() {
        const std::size_t bd = x_.dim();
        const double a = std::min(p_.alpha, 1.0);
        pool_.push_back(projected(z_, hints_.front()));
        // Coordinate spikes: every block gets +-1 in coordinate c.
        for (std::size_t c = 0; c < std::min<std::size_t>(bd, 32); ++c)
            for (double sgn : {1.0, -1.0}) {
                Coords g = z_;
                for (std::size_t b = 0; b < p_.n; ++b) g[b * bd + c] = sgn;
                Coords hint(bd, 0.0);
                hint[c] = sgn;
                pool_.push_back(projected(std::move(g), hint));
            }
        for (const auto& u : hints_) {
            Coords constant(t_.dim());
            for (std::size_t b = 0; b < p_.n; ++b)
                for (std::size_t i = 0; i < bd; ++i) constant[b * bd + i] = a * u[i];
            pool_.push_back(constant);
            Coords shifted = z_;
            for (std::size_t i = 0; i < shifted.size(); ++i) shifted[i] += constant[i];
            pool_.push_back(projected(std::move(shifted), u));
        }
        const std::size_t randoms = std::clamp<std::size_t>(opt_.budget / 8, 4, 32);
        auto samples = sample_unit_ball(t_, randoms + extreme_candidates(t_, randoms).size(), rng_());
        for (auto& v : samples) {
            for (double& c : v.coords) c *= p_.alpha;
            pool_.push_back(projected(std::move(v.coords), hints_.front()));
        }
    }

    DescentState greedy() {
        std::size_t first = 0;
        double best = kInf;
        Coords diff(t_.dim());
        for (std::size_t i = 0; i < pool_.size(); ++i) {
            for (std::size_t k = 0; k < diff.size(); ++k) diff[k] = z_[k] - pool_[i][k];
            const double d = t_.norm(diff);
            if (d < best) {
                best = d;
                first = i;
            }
        }
        DescentState state{{pool_[first]}, {}};
        state.res = evaluate(state.gens);
        std::vector<char> used(pool_.size(), 0);
        used[first] = 1;
        while (state.gens.size() < p_.m) {
            // Rank unused pool members by the current dual certificate.
            std::vector<std::pair<double, std::size_t>> ranked;
            for (std::size_t i = 0; i < pool_.size(); ++i)
                if (!used[i]) ranked.emplace_back(-usd2p::apply(state.res.certificate, pool_[i]), i);
            std::sort(ranked.begin(), ranked.end());
            DescentState best_next;
            best_next.res.distance = state.res.distance;
            std::size_t pick = pool_.size();
            for (std::size_t r = 0; r < std::min<std::size_t>(ranked.size(), 8); ++r) {
                auto gens = state.gens;
                gens.push_back(pool_[ranked[r].second]);
                auto res = evaluate(gens);
                if (res.distance < best_next.res.distance - 1e-13) {
                    best_next = DescentState{std::move(gens), std::move(res)};
                    pick = ranked[r].second;
                }
            }
            if (pick == pool_.size()) break;
            used[pick] = 1;
            state = std::move(best_next);
        }
        return state;
    }

    bool try_replace(DescentState& state, std::size_t j, Coords candidate) {
        auto gens = state.gens;
        gens[j] = std::move(candidate);
        auto res = evaluate(gens);
        if (res.distance < state.res.distance - 1e-13) {
            state = DescentState{std::move(gens), std::move(res)};
            return true;
        }
        return false;
    }

    bool try_append(DescentState& state, Coords candidate) {
        auto gens = state.gens;
        gens.push_back(std::move(candidate));
        auto res = evaluate(gens);
        if (res.distance < state.res.distance - 1e-13) {
            state = DescentState{std::move(gens), std::move(res)};
            return true;
        }
        return false;
    }

    void local_phase(DescentState& state) {
        const std::size_t stop = evals_ + opt_.budget;
        std::normal_distribution<double> gauss(0.0, 1.0);
        double sigma = 0.5;
        while (evals_ < stop && state.res.distance > 1e-12) {
            bool improved = false;
            Coords residual(t_.dim());
            for (std::size_t i = 0; i < residual.size(); ++i) residual[i] = z_[i] - state.res.hull_point[i];
            const auto lam = state.res.dense_weights(state.gens.size());
            std::vector<std::size_t> order(state.gens.size());
            std::iota(order.begin(), order.end(), 0);
            std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return lam[a] > lam[b]; });
            for (std::size_t j : order) {
                if (lam[j] <= 0.0 || evals_ >= stop) continue;
                for (double gamma : {1.0, 0.5, 0.25, 0.125}) {
                    if (evals_ >= stop) break;
                    Coords g = state.gens[j];
                    const double step = gamma / std::max(lam[j], 1e-3);
                    for (std::size_t i = 0; i < g.size(); ++i) g[i] += step * residual[i];
                    const Coords hint(mean_hint(state.gens[j]).begin(), mean_hint(state.gens[j]).end());
                    if (try_replace(state, j, projected(std::move(g), hint))) {
                        improved = true;
                        break;
                    }
                }
                if (improved) break;
            }
            if (improved) continue;

            if (state.gens.size() < p_.m && evals_ < stop) {
                // Grow the support with a perturbed copy pushed toward the residual.
                const std::size_t j = order.front();
                Coords g = state.gens[j];
                for (std::size_t i = 0; i < g.size(); ++i) g[i] += residual[i] + sigma * gauss(rng_);
                const Coords hint(mean_hint(state.gens[j]).begin(), mean_hint(state.gens[j]).end());
                if (try_append(state, projected(std::move(g), hint))) continue;
            }
            if (evals_ >= stop) break;

            std::uniform_int_distribution<std::size_t> pick(0, state.gens.size() - 1);
            const std::size_t j = pick(rng_);
            Coords g = state.gens[j];
            for (double& v : g) v += sigma * gauss(rng_);
            const Coords hint(mean_hint(state.gens[j]).begin(), mean_hint(state.gens[j]).end());
            if (!try_replace(state, j, projected(std::move(g), hint))) {
                sigma *= 0.7;
                if (sigma < 1e-7) break;
            }
        }
    }

    const Space& x_;
    Space t_;
    Coords z_;
    CmParams p_;
    const DescentOptions& opt_;
    std::mt19937_64 rng_;
    MinNormOptions solver_;
    std::vector<Coords> hints_;
    std::vector<Coords> pool_;
    Coords scratch_;
    std::size_t evals_ = 0;
};

}  // namespace

DistanceBracket dist_to_cm_upper(const Space& x, std::span<const double> z, const CmParams& params,
                                 const DescentOptions& options) {
    params.validate();
    require_dim(tuple_space(x, params.n), z);
    return Descent(x, z, params, options).run();
}

// --- certified grid oracle -------------------------------------------------------------

namespace {

struct Grid {
    std::size_t dim = 0;
    std::size_t radius = 0;  // K: digits run over -K..K
    std::size_t side = 0;    // 2K + 1
    std::size_t total = 0;
    double step = 0.0;

    void decode(std::size_t id, std::span<double> out) const {
        for (std::size_t d = dim; d-- > 0;) {
            out[d] = (static_cast<double>(id % side) - static_cast<double>(radius)) * step;
            id /= side;
        }
    }
};

std::size_t saturating_pow(std::size_t base, std::size_t exp, std::size_t cap) {
    std::size_t r = 1;
    for (std::size_t i = 0; i < exp; ++i) {
        if (r > cap / base) return cap + 1;
        r *= base;
    }
    return r;
}

std::size_t grid_radius(double alpha, double h) { return static_cast<std::size_t>(std::ceil(alpha / h - 1e-12)); }

class GridSource final : public GeneratorSource {
public:
    GridSource(const Grid& g, std::vector<std::uint32_t> ids) : g_(g), ids_(std::move(ids)) {
        // Digits fit a signed byte whenever the grid has at most 255 values per axis.
        if (g_.side <= 255) {
            digits_.resize(ids_.size() * g_.dim);
            for (std::size_t i = 0; i < ids_.size(); ++i) {
                std::size_t id = ids_[i];
                for (std::size_t d = g_.dim; d-- > 0;) {
                    digits_[i * g_.dim + d] = static_cast<std::int8_t>(static_cast<int>(id % g_.side) -
                                                                       static_cast<int>(g_.radius));
                    id /= g_.side;
                }
            }
        }
    }
    std::size_t size() const override { return ids_.size(); }
    std::size_t dim() const override { return g_.dim; }
    void fetch(std::size_t i, std::span<double> out) const override { g_.decode(ids_[i], out); }

    std::pair<std::size_t, double> maximize(std::span<const double> phi) const override {
        if (digits_.empty()) return GeneratorSource::maximize(phi);
        std::size_t arg = 0;
        double best = -kInf;
        const std::size_t dim = g_.dim;
        for (std::size_t i = 0; i < ids_.size(); ++i) {
            const std::int8_t* row = digits_.data() + i * dim;
            double v = 0.0;
            for (std::size_t d = 0; d < dim; ++d) v += phi[d] * row[d];
            if (v > best) {
                best = v;
                arg = i;
            }
        }
        return {arg, best * g_.step};
    }

private:
    Grid g_;
    std::vector<std::uint32_t> ids_;
    std::vector<std::int8_t> digits_;
};

}  // namespace

std::size_t grid_point_count(const Space& x, const CmParams& params, double h) {
    if (!(h > 0.0)) throw ParameterError("grid resolution must be positive");
    const std::size_t dim = params.n * x.dim();
    const std::size_t side = 2 * grid_radius(params.alpha, h) + 1;
    return saturating_pow(side, dim, std::numeric_limits<std::size_t>::max() / 2);
}

double required_resolution(const Space& x, const CmParams& params, std::size_t max_points) {
    const std::size_t dim = params.n * x.dim();
    const double side = std::floor(std::pow(static_cast<double>(max_points), 1.0 / static_cast<double>(dim)) + 1e-9);
    const double k = std::floor((side - 1.0) / 2.0);
    if (k < 1.0) return kInf;
    return params.alpha / k;
}

DistanceBracket dist_to_cm_grid(const Space& x, std::span<const double> z, const CmParams& params,
                                const GridOptions& options) {
    params.validate();
    const Space t = tuple_space(x, params.n);
    require_dim(t, z);
    const double h = options.resolution;
    if (!(h > 0.0)) throw ParameterError("grid resolution must be positive");

    Grid grid;
    grid.dim = t.dim();
    grid.radius = grid_radius(params.alpha, h);
    grid.side = 2 * grid.radius + 1;
    grid.step = h;
    const std::size_t limit = std::min<std::size_t>(options.max_points, std::numeric_limits<std::uint32_t>::max());
    grid.total = saturating_pow(grid.side, grid.dim, limit);
    if (grid.total > limit) {
        const double finest = required_resolution(x, params, limit);
        throw CapabilityRefusal("grid oracle refused: resolution " + num(h) + " in dimension " +
                                std::to_string(grid.dim) + " needs more than " + std::to_string(limit) +
                                " points; " +
                                (std::isfinite(finest) ? "the finest admissible resolution is " + num(finest)
                                                       : std::string("no resolution fits this point cap")));
    }

    const Coords halves(grid.dim, 0.5);
    const double cover = t.norm(halves);
    const double radius = cover * h;
    const double thr = params.mean_threshold();

    // Classify: S_low (bit 0) contains the rounding of every closure member,
    // S_up (bit 1) contains only closure members.
    std::vector<std::uint32_t> low_ids, up_ids;
    std::vector<char> is_up;
    {
        std::vector<std::size_t> digit(grid.dim, 0);
        Coords p(grid.dim), mean(x.dim());
        for (std::size_t id = 0; id < grid.total; ++id) {
            for (std::size_t d = 0; d < grid.dim; ++d)
                p[d] = (static_cast<double>(digit[d]) - static_cast<double>(grid.radius)) * h;
            const double nrm = t.norm(p);
            if (nrm <= params.alpha + radius + 1e-12) {
                mean_block(t, p, mean);
                const double mn = x.norm(mean);
                if (mn >= thr - radius - 1e-12) {
                    low_ids.push_back(static_cast<std::uint32_t>(id));
                    const bool up = nrm <= params.alpha && mn >= thr;
                    is_up.push_back(up ? 1 : 0);
                    if (up) up_ids.push_back(static_cast<std::uint32_t>(id));
                }
            }
            for (std::size_t d = grid.dim; d-- > 0;) {
                if (++digit[d] < grid.side) break;
                digit[d] = 0;
            }
        }
    }
    if (low_ids.empty() || up_ids.empty())
        throw CapabilityRefusal("grid oracle refused: resolution " + num(h) +
                                " leaves no grid point in the generating set; refine the grid");

    DistanceBracket out;
    out.resolution = h;
    out.covering_constant = cover;
    MinNormOptions solver;
    solver.gap_tolerance = 1e-10;

    Coords buf(grid.dim), diff(grid.dim);
    auto single = [&](std::uint32_t id) {
        grid.decode(id, buf);
        for (std::size_t d = 0; d < grid.dim; ++d) diff[d] = z[d] - buf[d];
        return t.norm(diff);
    };
    auto witness_of = [&](const std::vector<std::uint32_t>& ids, const std::vector<double>& w) {
        ConvexDecomposition dec;
        for (std::size_t k = 0; k < ids.size(); ++k) {
            Coords g(grid.dim);
            grid.decode(ids[k], g);
            dec.generators.push_back(std::move(g));
            dec.weights.push_back(w[k]);
        }
        return dec;
    };

    double low_value = kInf, up_value = kInf;
    std::vector<std::uint32_t> up_support;
    std::vector<double> up_weights;
    double up_gap = 0.0;

    // Singletons are exact and seed every route.
    std::size_t best_low_single = 0;
    for (std::size_t k = 0; k < low_ids.size(); ++k) {
        const double d = single(low_ids[k]);
        if (d < low_value) {
            low_value = d;
            best_low_single = k;
        }
        if (is_up[k] && d < up_value) {
            up_value = d;
            up_support = {low_ids[k]};
            up_weights = {1.0};
        }
    }

    const std::size_t caratheodory = grid.dim + 1;
    const std::size_t nlow = low_ids.size();
    const bool pairs_ok = static_cast<double>(nlow) * static_cast<double>(nlow - 1) / 2.0 <=
                              static_cast<double>(options.pair_budget) &&
                          static_cast<double>(nlow) * static_cast<double>(grid.dim) <= 5e7;

    if (params.m == 1) {
        out.lower_method = "grid-exact-singletons";
        out.upper_method = "grid-exact-singletons";
    } else if (params.m >= caratheodory) {
        const auto lo = min_norm_point(t, z, GridSource(grid, low_ids), solver);
        const auto hi = min_norm_point(t, z, GridSource(grid, up_ids), solver);
        low_value = std::min(low_value, lo.lower);
        if (hi.distance < up_value) {
            up_value = hi.distance;
            up_support.clear();
            for (std::size_t k : hi.support) up_support.push_back(up_ids[k]);
            up_weights = hi.weights;
            up_gap = hi.gap;
        }
        out.lower_method = "grid-full-hull";
        out.upper_method = "grid-full-hull";
    } else if (params.m == 2 && pairs_ok) {
        std::vector<double> pts(nlow * grid.dim);
        for (std::size_t k = 0; k < nlow; ++k) grid.decode(low_ids[k], std::span<double>(pts).subspan(k * grid.dim, grid.dim));
        auto point = [&](std::size_t k) { return std::span<const double>(pts).subspan(k * grid.dim, grid.dim); };

        // Pruning functionals: phi(z) - max(phi(p), phi(q)) <= d(z, [p, q]).
        std::vector<std::vector<double>> prune_at;  // phi_f(p_k)
        std::vector<double> prune_z;
        auto add_prune = [&](std::span<const double> phi) {
            if (phi.empty() || prune_at.size() >= 16) return;
            std::vector<double> vals(nlow);
            for (std::size_t k = 0; k < nlow; ++k) vals[k] = usd2p::apply(phi, point(k));
            prune_at.push_back(std::move(vals));
            prune_z.push_back(usd2p::apply(phi, z));
        };
        {
            Coords phi(grid.dim);
            for (std::size_t d = 0; d < grid.dim; ++d) diff[d] = z[d] - point(best_low_single)[d];
            t.norming_functional(diff, phi);
            add_prune(phi);
        }
        double pair_low = low_value;
        for (std::size_t i = 0; i < nlow; ++i)
            for (std::size_t j = i + 1; j < nlow; ++j) {
                double lb = -kInf;
                for (std::size_t f = 0; f < prune_at.size(); ++f)
                    lb = std::max(lb, prune_z[f] - std::max(prune_at[f][i], prune_at[f][j]));
                const bool both_up = is_up[i] && is_up[j];
                const bool need_low = lb < pair_low;
                const bool need_up = both_up && lb < up_value;
                if (!need_low && !need_up) continue;
                const std::vector<Coords> seg{Coords(point(i).begin(), point(i).end()),
                                              Coords(point(j).begin(), point(j).end())};
                const auto r = min_norm_point(t, z, seg, solver);
                if (r.lower < pair_low) {
                    pair_low = r.lower;
                    add_prune(r.certificate);
                }
                if (both_up && r.distance < up_value) {
                    up_value = r.distance;
                    up_support.clear();
                    up_weights.clear();
                    const auto w = r.dense_weights(2);
                    for (std::size_t k = 0; k < 2; ++k)
                        if (w[k] > 0.0) {
                            up_support.push_back(low_ids[k == 0 ? i : j]);
                            up_weights.push_back(w[k]);
                        }
                    up_gap = r.gap;
                }
            }
        low_value = pair_low;
        out.lower_method = "grid-exact-pairs";
        out.upper_method = "grid-exact-pairs";
    } else {
        // co_m is contained in co, so the full-hull distance is a valid lower
        // bound; the solver's lower side is certified at every iteration.
        // Each pricing step scans the whole grid; cap the total work.
        const double scan = static_cast<double>(low_ids.size()) * static_cast<double>(grid.dim);
        const auto iterations = static_cast<std::size_t>(std::clamp(2e8 / scan, 8.0, 300.0));
        MinNormOptions relaxed = solver;
        relaxed.max_iterations = iterations;
        // Below the rounding radius the certified lower side is 0 anyway.
        relaxed.stop_below = radius;
        const auto lo = min_norm_point(t, z, GridSource(grid, low_ids), relaxed);
        low_value = std::min(low_value, lo.lower);
        MinNormOptions capped = solver;
        capped.max_columns = params.m;
        capped.max_iterations = std::min<std::size_t>(iterations, 100);
        const auto hi = min_norm_point(t, z, GridSource(grid, up_ids), capped);
        if (hi.distance < up_value && hi.support.size() <= params.m) {
            up_value = hi.distance;
            up_support.clear();
            for (std::size_t k : hi.support) up_support.push_back(up_ids[k]);
            up_weights = hi.weights;
            up_gap = hi.gap;
        }
        out.lower_method = "grid-hull-relaxation";
        out.upper_method = "grid-greedy-support";
    }

    out.lower = std::max(0.0, low_value - radius);
    out.upper = up_value;
    out.solver_gap = up_gap;
    double wsum = std::accumulate(up_weights.begin(), up_weights.end(), 0.0);
    for (double& w : up_weights) w /= wsum;
    out.witness = witness_of(up_support, up_weights);
    return out;
}

}  // namespace usd2p
