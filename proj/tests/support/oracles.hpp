#pragma once

// Brute-force reference computations used to cross-check the library. They
// share no code with the library besides the Space descriptor itself.

#include "usd2p/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <random>
#include <vector>

namespace oracle {

using Coords = std::vector<double>;

inline double lp_norm(const Coords& v, double p) {
    if (std::isinf(p)) {
        double m = 0.0;
        for (double x : v) m = std::max(m, std::abs(x));
        return m;
    }
    double s = 0.0;
    for (double x : v) s += std::pow(std::abs(x), p);
    return std::pow(s, 1.0 / p);
}

// Max of |f(x) - f(y)| / d(x, y) over all pairs of `points`.
inline double seminorm(const std::vector<double>& dist, std::size_t n, const Coords& f,
                       const std::vector<std::size_t>& points) {
    double best = 0.0;
    for (std::size_t a : points)
        for (std::size_t b : points)
            if (a != b) best = std::max(best, std::abs(f[a] - f[b]) / dist[a * n + b]);
    return best;
}

inline double seminorm(const std::vector<double>& dist, std::size_t n, const Coords& f) {
    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;
    return seminorm(dist, n, f, all);
}

// Extreme points of the dual ball of a polyhedral space, so that
// ||x|| = max over returned phi of <phi, x>.
inline std::vector<Coords> dual_vertices(const usd2p::Space& s) {
    using K = usd2p::Space::Kind;
    std::vector<Coords> out;
    switch (s.kind()) {
    case K::Lp: {
        const std::size_t d = s.dim();
        if (s.exponent().is_infinite()) {
            for (std::size_t i = 0; i < d; ++i)
                for (double sg : {1.0, -1.0}) {
                    Coords v(d, 0.0);
                    v[i] = sg;
                    out.push_back(v);
                }
        } else {
            for (std::size_t mask = 0; mask < (std::size_t{1} << d); ++mask) {
                Coords v(d);
                for (std::size_t i = 0; i < d; ++i) v[i] = (mask >> i) & 1 ? -1.0 : 1.0;
                out.push_back(v);
            }
        }
        return out;
    }
    case K::SupTuple:
    case K::FunctionModule: {
        const auto inner = dual_vertices(s.inner());
        const std::size_t bd = s.inner().dim();
        for (std::size_t b = 0; b < s.count(); ++b)
            for (const auto& w : inner) {
                Coords v(s.dim(), 0.0);
                std::copy(w.begin(), w.end(), v.begin() + static_cast<std::ptrdiff_t>(b * bd));
                out.push_back(v);
            }
        return out;
    }
    case K::DirectSum: {
        const auto l = dual_vertices(s.inner());
        const auto r = dual_vertices(s.right());
        const std::size_t ld = s.inner().dim();
        if (s.exponent().is_one()) {
            for (const auto& a : l)
                for (const auto& b : r) {
                    Coords v(a);
                    v.insert(v.end(), b.begin(), b.end());
                    out.push_back(v);
                }
        } else {
            for (const auto& a : l) {
                Coords v(s.dim(), 0.0);
                std::copy(a.begin(), a.end(), v.begin());
                out.push_back(v);
            }
            for (const auto& b : r) {
                Coords v(s.dim(), 0.0);
                std::copy(b.begin(), b.end(), v.begin() + static_cast<std::ptrdiff_t>(ld));
                out.push_back(v);
            }
        }
        return out;
    }
    }
    return out;
}

inline double dot(const Coords& a, const Coords& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

// d(z, [a, b]) for a polyhedral norm: f(t) = max_phi (phi(z - a) - t phi(b - a))
// is a maximum of affine functions, minimized at 0, 1 or a crossing of two lines.
inline double segment_distance_polyhedral(const usd2p::Space& s, const Coords& z, const Coords& a, const Coords& b) {
    const auto verts = dual_vertices(s);
    std::vector<std::pair<double, double>> lines;  // value = c0 - t c1
    Coords za(z.size()), ba(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) {
        za[i] = z[i] - a[i];
        ba[i] = b[i] - a[i];
    }
    for (const auto& v : verts) lines.emplace_back(dot(v, za), dot(v, ba));
    auto f = [&](double t) {
        double m = -std::numeric_limits<double>::infinity();
        for (const auto& [c0, c1] : lines) m = std::max(m, c0 - t * c1);
        return m;
    };
    double best = std::min(f(0.0), f(1.0));
    for (std::size_t i = 0; i < lines.size(); ++i)
        for (std::size_t j = i + 1; j < lines.size(); ++j) {
            const double den = lines[i].second - lines[j].second;
            if (den == 0.0) continue;
            const double t = (lines[i].first - lines[j].first) / den;
            if (t > 0.0 && t < 1.0) best = std::min(best, f(t));
        }
    return best;
}

// Euclidean projection onto the segment [a, b].
inline double segment_distance_l2(const Coords& z, const Coords& a, const Coords& b) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        num += (z[i] - a[i]) * (b[i] - a[i]);
        den += (b[i] - a[i]) * (b[i] - a[i]);
    }
    const double t = den > 0.0 ? std::clamp(num / den, 0.0, 1.0) : 0.0;
    Coords d(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) d[i] = z[i] - a[i] - t * (b[i] - a[i]);
    return lp_norm(d, 2.0);
}

// Golden-section search of the convex function t -> ||z - a - t (b - a)|| on [0, 1].
inline double segment_distance_golden(const std::function<double(const Coords&)>& norm, const Coords& z,
                                      const Coords& a, const Coords& b) {
    auto f = [&](double t) {
        Coords d(z.size());
        for (std::size_t i = 0; i < z.size(); ++i) d[i] = z[i] - a[i] - t * (b[i] - a[i]);
        return norm(d);
    };
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = 0.0, hi = 1.0;
    double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        if (f1 <= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        }
    }
    return std::min({f(0.0), f(1.0), f(0.5 * (lo + hi))});
}

// Reference norm for sup(n, lp(p, d)) written out directly.
inline double sup_lp_norm(const Coords& v, std::size_t n, double p) {
    const std::size_t d = v.size() / n;
    double m = 0.0;
    for (std::size_t b = 0; b < n; ++b) m = std::max(m, lp_norm(Coords(v.begin() + b * d, v.begin() + (b + 1) * d), p));
    return m;
}

// d(z, C_1^{2,eps,1}(R)) for z in [-1,1]^2. The generators are the points of
// [-1,1]^2 with |g1 + g2| >= 2(1 - eps) (closure). Within sup-distance r the
// largest reachable g1 + g2 is min(1, z1 + r) + min(1, z2 + r), which is
// monotone in r, so bisection on r is exact up to rounding.
inline double scalar_c1_distance(double z1, double z2, double eps) {
    const double s = 2.0 * (1.0 - eps);
    auto to_strip = [&](double a, double b) {
        double lo = 0.0, hi = 4.0;
        for (int it = 0; it < 200; ++it) {
            const double r = 0.5 * (lo + hi);
            (std::min(1.0, a + r) + std::min(1.0, b + r) >= s) ? hi = r : lo = r;
        }
        return hi;
    };
    return std::min(to_strip(z1, z2), to_strip(-z1, -z2));
}

}  // namespace oracle
