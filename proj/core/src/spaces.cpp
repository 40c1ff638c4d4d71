#include "usd2p/spaces.hpp"

#include "usd2p/errors.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <random>
#include <set>

namespace usd2p {

Exponent::Exponent(double p) : value_(p), infinite_(false) {
    if (std::isinf(p) && p > 0) {
        value_ = 0.0;
        infinite_ = true;
        return;
    }
    if (!(p >= 1.0) || !std::isfinite(p))
        throw ParameterError("exponent p must lie in [1, inf], got " + std::to_string(p));
}

Exponent Exponent::conjugate() const {
    if (infinite_) return Exponent(1.0);
    if (value_ == 1.0) return infinity();
    return Exponent(value_ / (value_ - 1.0));
}

namespace {

std::string format_real(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

}  // namespace

std::string Exponent::to_string() const { return infinite_ ? "inf" : format_real(value_); }

struct Space::Node {
    Kind kind;
    Exponent p = Exponent::infinity();
    std::size_t count = 0;
    std::size_t dim = 0;
    std::shared_ptr<const Node> a;
    std::shared_ptr<const Node> b;
    // Cached child handles so inner()/right() can return references.
    std::unique_ptr<Space> inner_handle;
    std::unique_ptr<Space> right_handle;
};

Space Space::lp(Exponent p, std::size_t d) {
    if (d == 0) throw ParameterError("lp dimension must be >= 1");
    auto node = std::make_shared<Node>();
    node->kind = Kind::Lp;
    node->p = p;
    node->count = d;
    node->dim = d;
    return Space(std::move(node));
}

Space Space::sup_tuple(std::size_t n, const Space& inner) {
    if (n == 0) throw ParameterError("sup-tuple arity must be >= 1");
    auto node = std::make_shared<Node>();
    node->kind = Kind::SupTuple;
    node->count = n;
    node->dim = n * inner.dim();
    node->a = inner.node_;
    node->inner_handle = std::make_unique<Space>(inner);
    return Space(std::move(node));
}

Space Space::direct_sum(Exponent p, const Space& left, const Space& right) {
    auto node = std::make_shared<Node>();
    node->kind = Kind::DirectSum;
    node->p = p;
    node->count = 2;
    node->dim = left.dim() + right.dim();
    node->a = left.node_;
    node->b = right.node_;
    node->inner_handle = std::make_unique<Space>(left);
    node->right_handle = std::make_unique<Space>(right);
    return Space(std::move(node));
}

Space Space::function_module(std::size_t base_size, const Space& fiber) {
    if (base_size == 0) throw ParameterError("function-module base size must be >= 1");
    auto node = std::make_shared<Node>();
    node->kind = Kind::FunctionModule;
    node->count = base_size;
    node->dim = base_size * fiber.dim();
    node->a = fiber.node_;
    node->inner_handle = std::make_unique<Space>(fiber);
    return Space(std::move(node));
}

Space::Kind Space::kind() const noexcept { return node_->kind; }
std::size_t Space::dim() const noexcept { return node_->dim; }

Exponent Space::exponent() const {
    if (node_->kind != Kind::Lp && node_->kind != Kind::DirectSum)
        throw StructuralError("space " + to_string() + " has no exponent");
    return node_->p;
}

std::size_t Space::count() const { return node_->count; }

const Space& Space::inner() const {
    if (!node_->inner_handle) throw StructuralError("space " + to_string() + " has no inner space");
    return *node_->inner_handle;
}

const Space& Space::right() const {
    if (!node_->right_handle) throw StructuralError("space " + to_string() + " is not a direct sum");
    return *node_->right_handle;
}

bool Space::is_blocked() const noexcept {
    return node_->kind == Kind::SupTuple || node_->kind == Kind::FunctionModule;
}

std::size_t Space::block_count() const {
    if (!is_blocked()) throw StructuralError("space " + to_string() + " has no block structure");
    return node_->count;
}

std::size_t Space::block_dim() const { return inner().dim(); }

namespace {

double lp_norm(Exponent p, std::span<const double> v) {
    double amax = 0.0;
    for (double x : v) amax = std::max(amax, std::abs(x));
    if (p.is_infinite() || amax == 0.0) return amax;
    if (p.is_one()) {
        double s = 0.0;
        for (double x : v) s += std::abs(x);
        return s;
    }
    const double q = p.value();
    double s = 0.0;
    if (q == 2.0) {
        for (double x : v) {
            const double r = x / amax;
            s += r * r;
        }
        return amax * std::sqrt(s);
    }
    for (double x : v) s += std::pow(std::abs(x) / amax, q);
    return amax * std::pow(s, 1.0 / q);
}

// Norming functional of the nonnegative pair (a, b) in l_p^2.
void pair_norming(Exponent p, double a, double b, double& ca, double& cb) {
    if (a == 0.0 && b == 0.0) {
        ca = 1.0;
        cb = 0.0;
        return;
    }
    if (p.is_infinite()) {
        ca = a >= b ? 1.0 : 0.0;
        cb = a >= b ? 0.0 : 1.0;
        return;
    }
    if (p.is_one()) {
        ca = 1.0;
        cb = 1.0;
        return;
    }
    const double nrm = lp_norm(p, std::array<double, 2>{a, b});
    ca = std::pow(a / nrm, p.value() - 1.0);
    cb = std::pow(b / nrm, p.value() - 1.0);
}

}  // namespace

double Space::norm(std::span<const double> v) const {
    require_dim(*this, v);
    const Node& n = *node_;
    switch (n.kind) {
        case Kind::Lp:
            return lp_norm(n.p, v);
        case Kind::SupTuple:
        case Kind::FunctionModule: {
            const Space& in = *n.inner_handle;
            const std::size_t bd = in.dim();
            double best = 0.0;
            for (std::size_t b = 0; b < n.count; ++b) best = std::max(best, in.norm(v.subspan(b * bd, bd)));
            return best;
        }
        case Kind::DirectSum: {
            const Space& l = *n.inner_handle;
            const Space& r = *n.right_handle;
            const double a = l.norm(v.first(l.dim()));
            const double b = r.norm(v.subspan(l.dim()));
            return lp_norm(n.p, std::array<double, 2>{a, b});
        }
    }
    return 0.0;
}

double Space::dual_norm(std::span<const double> f) const {
    require_dim(*this, f);
    const Node& n = *node_;
    switch (n.kind) {
        case Kind::Lp:
            return lp_norm(n.p.conjugate(), f);
        case Kind::SupTuple:
        case Kind::FunctionModule: {
            const Space& in = *n.inner_handle;
            const std::size_t bd = in.dim();
            double s = 0.0;
            for (std::size_t b = 0; b < n.count; ++b) s += in.dual_norm(f.subspan(b * bd, bd));
            return s;
        }
        case Kind::DirectSum: {
            const Space& l = *n.inner_handle;
            const Space& r = *n.right_handle;
            const double a = l.dual_norm(f.first(l.dim()));
            const double b = r.dual_norm(f.subspan(l.dim()));
            return lp_norm(n.p.conjugate(), std::array<double, 2>{a, b});
        }
    }
    return 0.0;
}

void Space::norming_functional(std::span<const double> v, std::span<double> out) const {
    require_dim(*this, v);
    require_dim(*this, out);
    const Node& n = *node_;
    std::fill(out.begin(), out.end(), 0.0);
    switch (n.kind) {
        case Kind::Lp: {
            const double nrm = lp_norm(n.p, v);
            if (nrm == 0.0) {
                out[0] = 1.0;
                return;
            }
            if (n.p.is_infinite()) {
                std::size_t arg = 0;
                for (std::size_t i = 1; i < v.size(); ++i)
                    if (std::abs(v[i]) > std::abs(v[arg])) arg = i;
                out[arg] = v[arg] < 0 ? -1.0 : 1.0;
                return;
            }
            if (n.p.is_one()) {
                for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] < 0 ? -1.0 : 1.0;
                return;
            }
            const double e = n.p.value() - 1.0;
            for (std::size_t i = 0; i < v.size(); ++i) {
                const double mag = std::pow(std::abs(v[i]) / nrm, e);
                out[i] = v[i] < 0 ? -mag : mag;
            }
            return;
        }
        case Kind::SupTuple:
        case Kind::FunctionModule: {
            const Space& in = *n.inner_handle;
            const std::size_t bd = in.dim();
            std::size_t arg = 0;
            double best = -1.0;
            for (std::size_t b = 0; b < n.count; ++b) {
                const double x = in.norm(v.subspan(b * bd, bd));
                if (x > best) {
                    best = x;
                    arg = b;
                }
            }
            in.norming_functional(v.subspan(arg * bd, bd), out.subspan(arg * bd, bd));
            return;
        }
        case Kind::DirectSum: {
            const Space& l = *n.inner_handle;
            const Space& r = *n.right_handle;
            const auto vl = v.first(l.dim());
            const auto vr = v.subspan(l.dim());
            double ca = 0.0, cb = 0.0;
            pair_norming(n.p, l.norm(vl), r.norm(vr), ca, cb);
            auto ol = out.first(l.dim());
            auto orr = out.subspan(l.dim());
            l.norming_functional(vl, ol);
            r.norming_functional(vr, orr);
            for (double& x : ol) x *= ca;
            for (double& x : orr) x *= cb;
            return;
        }
    }
}

bool Space::is_polyhedral() const noexcept {
    const Node& n = *node_;
    switch (n.kind) {
        case Kind::Lp:
            return n.p.is_infinite() || n.p.is_one();
        case Kind::SupTuple:
        case Kind::FunctionModule:
            return n.inner_handle->is_polyhedral();
        case Kind::DirectSum:
            return (n.p.is_infinite() || n.p.is_one()) && n.inner_handle->is_polyhedral() &&
                   n.right_handle->is_polyhedral();
    }
    return false;
}

std::string Space::to_string() const {
    const Node& n = *node_;
    switch (n.kind) {
        case Kind::Lp:
            return "lp(" + n.p.to_string() + "," + std::to_string(n.count) + ")";
        case Kind::SupTuple:
            return "sup(" + std::to_string(n.count) + ", " + n.inner_handle->to_string() + ")";
        case Kind::FunctionModule:
            return "fmod(" + std::to_string(n.count) + ", " + n.inner_handle->to_string() + ")";
        case Kind::DirectSum:
            return "dsum(" + n.p.to_string() + ", " + n.inner_handle->to_string() + ", " +
                   n.right_handle->to_string() + ")";
    }
    return {};
}

bool operator==(const Space& a, const Space& b) {
    if (a.node_ == b.node_) return true;
    const auto& x = *a.node_;
    const auto& y = *b.node_;
    if (x.kind != y.kind || x.count != y.count || x.dim != y.dim) return false;
    switch (x.kind) {
        case Space::Kind::Lp:
            return x.p == y.p;
        case Space::Kind::SupTuple:
        case Space::Kind::FunctionModule:
            return *x.inner_handle == *y.inner_handle;
        case Space::Kind::DirectSum:
            return x.p == y.p && *x.inner_handle == *y.inner_handle && *x.right_handle == *y.right_handle;
    }
    return false;
}

// --- parser -----------------------------------------------------------------

namespace {

class Parser {
public:
    explicit Parser(std::string_view s) : s_(s) {}

    Space parse_all() {
        Space sp = parse_space();
        skip_ws();
        if (pos_ != s_.size()) fail("trailing characters");
        return sp;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError("space grammar: " + msg + " at column " + std::to_string(pos_ + 1) + " in '" +
                         std::string(s_) + "'");
    }

    void skip_ws() {
        while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
    }

    void expect(char c) {
        skip_ws();
        if (pos_ >= s_.size() || s_[pos_] != c) fail(std::string("expected '") + c + "'");
        ++pos_;
    }

    std::string_view ident() {
        skip_ws();
        const std::size_t start = pos_;
        while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        return s_.substr(start, pos_ - start);
    }

    std::size_t integer() {
        skip_ws();
        std::size_t value = 0;
        auto [ptr, ec] = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), value);
        if (ec != std::errc()) fail("expected a positive integer");
        pos_ = static_cast<std::size_t>(ptr - s_.data());
        if (value == 0) fail("integer must be >= 1");
        return value;
    }

    Exponent exponent() {
        skip_ws();
        if (s_.substr(pos_, 3) == "inf") {
            pos_ += 3;
            return Exponent::infinity();
        }
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), value);
        if (ec != std::errc()) fail("expected an exponent (real >= 1 or 'inf')");
        pos_ = static_cast<std::size_t>(ptr - s_.data());
        if (!(value >= 1.0)) fail("exponent must be >= 1");
        return Exponent(value);
    }

    Space parse_space() {
        const std::string_view name = ident();
        expect('(');
        if (name == "lp") {
            const Exponent p = exponent();
            expect(',');
            const std::size_t d = integer();
            expect(')');
            return Space::lp(p, d);
        }
        if (name == "sup" || name == "fmod") {
            const std::size_t n = integer();
            expect(',');
            Space inner = parse_space();
            expect(')');
            return name == "sup" ? Space::sup_tuple(n, inner) : Space::function_module(n, inner);
        }
        if (name == "dsum") {
            const Exponent p = exponent();
            expect(',');
            Space left = parse_space();
            expect(',');
            Space right = parse_space();
            expect(')');
            return Space::direct_sum(p, left, right);
        }
        fail("unknown constructor '" + std::string(name) + "'");
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

}  // namespace

Space Space::parse(std::string_view text) { return Parser(text).parse_all(); }

// --- vectors ----------------------------------------------------------------

void require_dim(const Space& space, std::span<const double> v) {
    if (v.size() != space.dim())
        throw StructuralError("dimension mismatch: vector has " + std::to_string(v.size()) +
                              " coordinates, space " + space.to_string() + " has dimension " +
                              std::to_string(space.dim()));
}

Vector::Vector(Space sp, std::vector<double> c) : space(std::move(sp)), coords(std::move(c)) {
    require_dim(space, coords);
}

Vector::Vector(Space sp) : space(std::move(sp)), coords(space.dim(), 0.0) {}

double norm(const Vector& v) { return v.space.norm(v.coords); }
double norm(const Space& space, std::span<const double> v) { return space.norm(v); }

void mean_block(const Space& blocked, std::span<const double> z, std::span<double> out) {
    require_dim(blocked, z);
    const std::size_t n = blocked.block_count();
    const std::size_t bd = blocked.block_dim();
    if (out.size() != bd)
        throw StructuralError("dimension mismatch: output has " + std::to_string(out.size()) +
                              " coordinates, block dimension is " + std::to_string(bd));
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t b = 0; b < n; ++b)
        for (std::size_t i = 0; i < bd; ++i) out[i] += z[b * bd + i];
    for (double& x : out) x /= static_cast<double>(n);
}

Vector mean_block(const Vector& z) {
    Vector out(z.space.inner());
    mean_block(z.space, z.coords, out.coords);
    return out;
}

double apply(std::span<const double> f, std::span<const double> v) {
    double s = 0.0;
    const std::size_t n = std::min(f.size(), v.size());
    for (std::size_t i = 0; i < n; ++i) s += f[i] * v[i];
    return s;
}

// --- candidates and sampling ------------------------------------------------

namespace {

using Coords = std::vector<double>;

void push_unique(std::vector<Coords>& out, std::set<Coords>& seen, Coords c, std::size_t cap) {
    if (out.size() >= cap) return;
    if (seen.insert(c).second) out.push_back(std::move(c));
}

std::vector<Coords> sign_patterns(std::size_t d, double scale, std::size_t cap) {
    std::vector<Coords> out;
    const std::size_t total = d >= 63 ? cap : std::min<std::size_t>(cap, std::size_t{1} << d);
    for (std::size_t mask = 0; mask < total; ++mask) {
        Coords c(d, scale);
        for (std::size_t i = 0; i < d && i < 63; ++i)
            if (mask & (std::size_t{1} << i)) c[d - 1 - i] = -scale;
        out.push_back(std::move(c));
    }
    return out;
}

std::vector<Coords> unit_axes(std::size_t d, std::size_t cap) {
    std::vector<Coords> out;
    for (std::size_t i = 0; i < d && out.size() < cap; ++i) {
        Coords c(d, 0.0);
        c[i] = 1.0;
        out.push_back(c);
        if (out.size() >= cap) break;
        c[i] = -1.0;
        out.push_back(std::move(c));
    }
    return out;
}

}  // namespace

std::vector<std::vector<double>> extreme_candidates(const Space& space, std::size_t cap) {
    std::vector<Coords> out;
    std::set<Coords> seen;
    if (cap == 0) return out;
    switch (space.kind()) {
        case Space::Kind::Lp: {
            const Exponent p = space.exponent();
            const std::size_t d = space.count();
            if (p.is_infinite()) {
                for (auto& c : sign_patterns(d, 1.0, cap)) push_unique(out, seen, std::move(c), cap);
            } else {
                for (auto& c : unit_axes(d, cap)) push_unique(out, seen, std::move(c), cap);
                if (!p.is_one()) {
                    const double s = std::pow(static_cast<double>(d), -1.0 / p.value());
                    for (auto& c : sign_patterns(d, s, cap)) push_unique(out, seen, std::move(c), cap);
                }
            }
            break;
        }
        case Space::Kind::SupTuple:
        case Space::Kind::FunctionModule: {
            const std::size_t n = space.block_count();
            const std::size_t bd = space.block_dim();
            const auto inner = extreme_candidates(space.inner(), cap);
            // Constant tuples (u,...,u), then alternating (u,-u,u,...), then the product.
            for (const auto& u : inner) {
                Coords c;
                c.reserve(n * bd);
                for (std::size_t b = 0; b < n; ++b) c.insert(c.end(), u.begin(), u.end());
                push_unique(out, seen, std::move(c), cap);
            }
            if (n > 1) {
                for (const auto& u : inner) {
                    Coords c;
                    c.reserve(n * bd);
                    for (std::size_t b = 0; b < n; ++b)
                        for (double x : u) c.push_back(b % 2 == 0 ? x : -x);
                    push_unique(out, seen, std::move(c), cap);
                }
            }
            const std::size_t k = inner.size();
            std::vector<std::size_t> digit(n, 0);
            bool more = k > 0;
            while (more && out.size() < cap) {
                Coords c;
                c.reserve(n * bd);
                for (std::size_t b = 0; b < n; ++b) c.insert(c.end(), inner[digit[b]].begin(), inner[digit[b]].end());
                push_unique(out, seen, std::move(c), cap);
                more = false;
                for (std::size_t pos = n; pos-- > 0;) {
                    if (++digit[pos] < k) {
                        more = true;
                        break;
                    }
                    digit[pos] = 0;
                }
            }
            break;
        }
        case Space::Kind::DirectSum: {
            const Exponent p = space.exponent();
            const auto left = extreme_candidates(space.inner(), cap);
            const auto right = extreme_candidates(space.right(), cap);
            const std::size_t dl = space.inner().dim();
            const std::size_t dr = space.right().dim();
            auto join = [&](const Coords* a, const Coords* b, double s) {
                Coords c(dl + dr, 0.0);
                if (a)
                    for (std::size_t i = 0; i < dl; ++i) c[i] = s * (*a)[i];
                if (b)
                    for (std::size_t i = 0; i < dr; ++i) c[dl + i] = s * (*b)[i];
                return c;
            };
            if (p.is_infinite()) {
                for (const auto& a : left)
                    for (const auto& b : right) push_unique(out, seen, join(&a, &b, 1.0), cap);
            } else {
                const std::size_t m = std::max(left.size(), right.size());
                for (std::size_t i = 0; i < m; ++i) {
                    if (i < left.size()) push_unique(out, seen, join(&left[i], nullptr, 1.0), cap);
                    if (i < right.size()) push_unique(out, seen, join(nullptr, &right[i], 1.0), cap);
                }
                if (!p.is_one()) {
                    const double s = std::pow(2.0, -1.0 / p.value());
                    for (const auto& a : left)
                        for (const auto& b : right) push_unique(out, seen, join(&a, &b, s), cap);
                }
            }
            break;
        }
    }
    return out;
}

std::vector<Vector> sample_unit_ball(const Space& space, std::size_t count, std::uint64_t seed) {
    std::vector<Vector> out;
    out.reserve(count);
    for (auto& c : extreme_candidates(space, count)) {
        // Candidates are unit vectors up to rounding; pull them inside the ball.
        const double nrm = space.norm(c);
        if (nrm > 1.0)
            for (double& x : c) x /= nrm;
        out.emplace_back(space, std::move(c));
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double inv_dim = 1.0 / static_cast<double>(space.dim());
    std::size_t k = 0;
    while (out.size() < count) {
        Coords c(space.dim());
        for (double& x : c) x = gauss(rng);
        const double nrm = space.norm(c);
        if (nrm == 0.0) continue;
        const double radius = (k++ % 2 == 0) ? 1.0 : std::pow(unif(rng), inv_dim);
        for (double& x : c) x *= radius / nrm;
        const double after = space.norm(c);
        if (after > 1.0)
            for (double& x : c) x /= after;
        out.emplace_back(space, std::move(c));
    }
    return out;
}

}  // namespace usd2p
