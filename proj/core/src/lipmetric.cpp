#include "usd2p/lipmetric.hpp"

#include "usd2p/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

namespace usd2p {

namespace {

constexpr double kRelativeSlack = 1e-12;

std::string num(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

}  // namespace

FiniteMetricSpace::FiniteMetricSpace(std::size_t size, std::vector<double> dist)
    : n_(size), dist_(std::move(dist)) {
    if (n_ < 2) throw ParameterError("metric space needs at least 2 points, got " + std::to_string(n_));
    if (dist_.size() != n_ * n_)
        throw ParameterError("distance matrix has " + std::to_string(dist_.size()) + " entries, expected " +
                             std::to_string(n_ * n_));
    for (std::size_t i = 0; i < n_; ++i) {
        if ((*this)(i, i) != 0.0) throw ParameterError("nonzero diagonal entry at " + std::to_string(i));
        for (std::size_t j = i + 1; j < n_; ++j) {
            const double a = (*this)(i, j);
            if (!std::isfinite(a) || a <= 0.0)
                throw ParameterError("distance d(" + std::to_string(i) + "," + std::to_string(j) +
                                     ") must be positive and finite, got " + num(a));
            if (a != (*this)(j, i))
                throw ParameterError("asymmetric distances between " + std::to_string(i) + " and " +
                                     std::to_string(j));
        }
    }
    // O(N^3), but a corrupted metric invalidates every certificate built on it.
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j)
            for (std::size_t k = 0; k < n_; ++k) {
                const double bound = (*this)(i, j) + (*this)(j, k);
                if ((*this)(i, k) > bound * (1.0 + kRelativeSlack))
                    throw ParameterError("triangle inequality fails: d(" + std::to_string(i) + "," +
                                         std::to_string(k) + ") = " + num((*this)(i, k)) + " > d(" +
                                         std::to_string(i) + "," + std::to_string(j) + ") + d(" +
                                         std::to_string(j) + "," + std::to_string(k) + ") = " + num(bound));
            }
}

double FiniteMetricSpace::diameter() const noexcept { return *std::max_element(dist_.begin(), dist_.end()); }

FiniteMetricSpace read_metric(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    auto next_nonblank = [&]() -> bool {
        while (std::getline(in, line)) {
            ++lineno;
            const auto first = line.find_first_not_of(" \t\r");
            if (first != std::string::npos && line[first] != '#') return true;
        }
        return false;
    };
    auto parse_reals = [&](std::vector<double>& out) {
        const char* p = line.data();
        const char* end = line.data() + line.size();
        while (true) {
            while (p < end && (*p == ' ' || *p == '\t' || *p == '\r')) ++p;
            if (p == end) break;
            double x = 0.0;
            auto [ptr, ec] = std::from_chars(p, end, x);
            if (ec != std::errc() || (ptr < end && *ptr != ' ' && *ptr != '\t' && *ptr != '\r'))
                throw ParseError("malformed number near '" + std::string(p, std::min<std::size_t>(12, end - p)) + "'",
                                 lineno);
            out.push_back(x);
            p = ptr;
        }
    };

    if (!next_nonblank()) throw ParseError("empty metric file", lineno);
    std::vector<double> header;
    parse_reals(header);
    if (header.size() != 1 || header[0] < 2 || header[0] != std::floor(header[0]) || header[0] > 1e6)
        throw ParseError("first line must hold the point count N >= 2", lineno);
    const auto n = static_cast<std::size_t>(header[0]);

    std::vector<double> dist;
    dist.reserve(n * n);
    for (std::size_t r = 0; r < n; ++r) {
        if (!next_nonblank())
            throw ParseError("expected " + std::to_string(n) + " matrix rows, found " + std::to_string(r), lineno);
        const std::size_t before = dist.size();
        parse_reals(dist);
        if (dist.size() - before != n)
            throw ParseError("row has " + std::to_string(dist.size() - before) + " entries, expected " +
                                 std::to_string(n),
                             lineno);
    }
    if (next_nonblank()) throw ParseError("unexpected content after the matrix", lineno);
    return FiniteMetricSpace(n, std::move(dist));
}

void write_metric(std::ostream& out, const FiniteMetricSpace& m) {
    out << m.size() << '\n';
    for (std::size_t i = 0; i < m.size(); ++i) {
        for (std::size_t j = 0; j < m.size(); ++j) {
            if (j) out << ' ';
            out << num(m(i, j));
        }
        out << '\n';
    }
}

namespace {

FiniteMetricSpace line_metric(const std::vector<double>& pts) {
    const std::size_t n = pts.size();
    std::vector<double> d(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) d[i * n + j] = std::abs(pts[i] - pts[j]);
    return FiniteMetricSpace(n, std::move(d));
}

}  // namespace

FiniteMetricSpace geometric_chain(double q, std::size_t levels) {
    if (!(q > 0.0 && q < 1.0)) throw ParameterError("geometric_chain: q must lie in (0,1), got " + num(q));
    if (levels < 2) throw ParameterError("geometric_chain: need at least 2 levels");
    std::vector<double> pts{0.0};
    double x = 1.0;
    for (std::size_t i = 1; i < levels; ++i) {
        x *= q;
        if (x == 0.0) throw ParameterError("geometric_chain: q^" + std::to_string(i) + " underflows");
        pts.push_back(x);
    }
    return line_metric(pts);
}

FiniteMetricSpace integer_ray(std::size_t levels, double growth) {
    if (!(growth > 1.0) || !std::isfinite(growth))
        throw ParameterError("integer_ray: growth must exceed 1, got " + num(growth));
    if (levels < 2) throw ParameterError("integer_ray: need at least 2 levels");
    std::vector<double> pts{0.0};
    double x = 1.0;
    for (std::size_t i = 1; i < levels; ++i) {
        x *= growth;
        if (!std::isfinite(x)) throw ParameterError("integer_ray: growth^" + std::to_string(i) + " overflows");
        pts.push_back(x);
    }
    return line_metric(pts);
}

std::vector<std::size_t> LipFunction::points(std::size_t space_size) const {
    if (domain) return *domain;
    std::vector<std::size_t> all(space_size);
    for (std::size_t i = 0; i < space_size; ++i) all[i] = i;
    return all;
}

namespace {

void check_values(const FiniteMetricSpace& m, const LipFunction& f) {
    if (f.values.size() != m.size())
        throw StructuralError("function has " + std::to_string(f.values.size()) + " values, metric space has " +
                              std::to_string(m.size()) + " points");
    if (f.domain)
        for (std::size_t p : *f.domain)
            if (p >= m.size()) throw StructuralError("domain index " + std::to_string(p) + " out of range");
}

double seminorm_over(const FiniteMetricSpace& m, std::span<const double> values,
                     const std::vector<std::size_t>& pts) {
    if (pts.size() < 2)
        throw DegenerateDomainError("Lipschitz seminorm needs a domain of at least 2 points, got " +
                                    std::to_string(pts.size()));
    double best = 0.0;
    for (std::size_t a = 0; a < pts.size(); ++a)
        for (std::size_t b = a + 1; b < pts.size(); ++b) {
            const std::size_t i = pts[a], j = pts[b];
            if (i == j) continue;
            best = std::max(best, std::abs(values[i] - values[j]) / m(i, j));
        }
    return best;
}

}  // namespace

double lip_seminorm(const FiniteMetricSpace& m, const LipFunction& f) {
    check_values(m, f);
    return seminorm_over(m, f.values, f.points(m.size()));
}

double lip_seminorm(const FiniteMetricSpace& m, std::span<const double> values) {
    if (values.size() != m.size())
        throw StructuralError("function has " + std::to_string(values.size()) + " values, metric space has " +
                              std::to_string(m.size()) + " points");
    return seminorm_over(m, values, LipFunction{}.points(m.size()));
}

namespace {

template <typename Combine>
LipFunction convolve(const FiniteMetricSpace& m, const LipFunction& f, double L, Combine combine) {
    check_values(m, f);
    const auto pts = f.points(m.size());
    if (pts.empty()) throw DegenerateDomainError("cannot extend a function with an empty domain");
    if (pts.size() >= 2) {
        const double restricted = seminorm_over(m, f.values, pts);
        if (L < restricted * (1.0 - kRelativeSlack))
            throw PreconditionError("extension constant " + num(L) + " is below the restricted seminorm " +
                                    num(restricted));
    }
    if (!(L >= 0.0) || !std::isfinite(L)) throw PreconditionError("extension constant must be finite and >= 0");
    LipFunction out{std::vector<double>(m.size()), std::nullopt};
    std::vector<char> on_domain(m.size(), 0);
    for (std::size_t p : pts) on_domain[p] = 1;
    for (std::size_t x = 0; x < m.size(); ++x) {
        if (on_domain[x]) {
            out.values[x] = f.values[x];
            continue;
        }
        double acc = combine.init();
        for (std::size_t p : pts) acc = combine(acc, f.values[p], L * m(x, p));
        out.values[x] = acc;
    }
    return out;
}

struct InfConvolution {
    double init() const { return std::numeric_limits<double>::infinity(); }
    double operator()(double acc, double fp, double ld) const { return std::min(acc, fp + ld); }
};

struct SupConvolution {
    double init() const { return -std::numeric_limits<double>::infinity(); }
    double operator()(double acc, double fp, double ld) const { return std::max(acc, fp - ld); }
};

}  // namespace

LipFunction mcshane_extend(const FiniteMetricSpace& m, const LipFunction& f, double L) {
    return convolve(m, f, L, InfConvolution{});
}

LipFunction whitney_extend(const FiniteMetricSpace& m, const LipFunction& f, double L) {
    return convolve(m, f, L, SupConvolution{});
}

std::size_t pair_count(const FiniteMetricSpace& m) { return m.size() * (m.size() - 1) / 2; }

Space lip_image_space(const FiniteMetricSpace& m) { return Space::lp(Exponent::infinity(), pair_count(m)); }

std::vector<double> lip_embed(const FiniteMetricSpace& m, std::span<const double> values) {
    if (values.size() != m.size())
        throw StructuralError("function has " + std::to_string(values.size()) + " values, metric space has " +
                              std::to_string(m.size()) + " points");
    std::vector<double> out;
    out.reserve(pair_count(m));
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = i + 1; j < m.size(); ++j) out.push_back((values[i] - values[j]) / m(i, j));
    return out;
}

}  // namespace usd2p
