#include "oracles.hpp"

#include "usd2p/errors.hpp"
#include "usd2p/lipmetric.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace usd2p;

namespace {

// Random metric: shortest-path closure of random positive weights.
FiniteMetricSpace random_metric(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> w(0.1, 3.0);
    std::vector<double> d(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) d[i * n + j] = d[j * n + i] = w(rng);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) d[i * n + j] = std::min(d[i * n + j], d[i * n + k] + d[k * n + j]);
    return FiniteMetricSpace(n, d);
}

std::vector<double> random_values(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::vector<double> f(n);
    for (double& x : f) x = u(rng);
    return f;
}

}  // namespace

TEST_CASE("metric validation") {
    CHECK_NOTHROW(FiniteMetricSpace(2, {0, 1, 1, 0}));
    CHECK_THROWS_AS(FiniteMetricSpace(2, {0, 1, 2, 0}), ParameterError);   // asymmetric
    CHECK_THROWS_AS(FiniteMetricSpace(2, {0, 0, 0, 0}), ParameterError);   // zero off-diagonal
    CHECK_THROWS_AS(FiniteMetricSpace(2, {1, 1, 1, 0}), ParameterError);   // nonzero diagonal
    CHECK_THROWS_AS(FiniteMetricSpace(3, {0, 1, 5, 1, 0, 1, 5, 1, 0}), ParameterError);  // triangle
    CHECK_THROWS_AS(FiniteMetricSpace(2, {0, 1, 1}), ParameterError);
}

TEST_CASE("metric file format") {
    std::istringstream good("# two points\n2\n0 2\n\n2 0\n");
    const auto m = read_metric(good);
    CHECK(m.size() == 2);
    CHECK(m(0, 1) == 2.0);

    std::ostringstream out;
    write_metric(out, geometric_chain(0.01, 5));
    std::istringstream back(out.str());
    CHECK(read_metric(back).matrix() == geometric_chain(0.01, 5).matrix());

    std::istringstream bad("2\n0 1\n1 x\n");
    try {
        read_metric(bad);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
    }
    std::istringstream shortrow("3\n0 1 1\n1 0\n");
    CHECK_THROWS_AS(read_metric(shortrow), ParseError);
    std::istringstream not_metric("3\n0 1 5\n1 0 1\n5 1 0\n");
    CHECK_THROWS_AS(read_metric(not_metric), ParameterError);
}

TEST_CASE("seminorm examples") {
    const auto m = geometric_chain(0.1, 6);
    CHECK(lip_seminorm(m, std::vector<double>(6, 3.25)) == 0.0);

    std::vector<double> dist0(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) dist0[i] = m(i, 0);
    CHECK(lip_seminorm(m, dist0) == doctest::Approx(1.0).epsilon(1e-15));

    const FiniteMetricSpace two(2, {0, 2, 2, 0});
    CHECK(lip_seminorm(two, std::vector<double>{0, 3}) == 1.5);

    // Chain points 0, 0.1, 0.01 and f = identity on them.
    const auto c3 = geometric_chain(0.1, 3);
    CHECK(lip_seminorm(c3, std::vector<double>{0, 0.1, 0.01}) == doctest::Approx(1.0).epsilon(1e-14));

    CHECK_THROWS_AS(lip_seminorm(two, LipFunction{{0, 3}, std::vector<std::size_t>{1}}), DegenerateDomainError);
}

TEST_CASE("generators") {
    const auto half = geometric_chain(0.5, 2);
    CHECK(half(0, 1) == 0.5);

    const auto c = geometric_chain(0.1, 3);
    CHECK(c(0, 1) == 0.1);
    CHECK(c(0, 2) == 0.1 * 0.1);
    CHECK(c(1, 2) == std::abs(0.1 - 0.1 * 0.1));

    CHECK(integer_ray(2, 2.0)(0, 1) == 2.0);
    const auto ray = integer_ray(10, 4.0);
    CHECK(ray.diameter() == std::pow(4.0, 9));  // farthest pair is the base point and 4^9

    // Line metric: the triangle inequality holds (validated at construction).
    CHECK_NOTHROW(geometric_chain(0.01, 12));
    CHECK_THROWS_AS(geometric_chain(1.0, 3), ParameterError);
    CHECK_THROWS_AS(geometric_chain(0.0, 3), ParameterError);
    CHECK_THROWS_AS(integer_ray(3, 1.0), ParameterError);
}

TEST_CASE("seminorm matches brute force") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        const auto m = random_metric(rng, 3 + trial % 7);
        const auto f = random_values(rng, m.size());
        CHECK(lip_seminorm(m, f) == doctest::Approx(oracle::seminorm(m.matrix(), m.size(), f)).epsilon(1e-15));
    }
}

TEST_CASE("seminorm laws") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> c(-3.0, 3.0);
    for (int trial = 0; trial < 200; ++trial) {
        const auto m = random_metric(rng, 5);
        auto f = random_values(rng, 5);
        auto g = random_values(rng, 5);
        const double a = c(rng);
        auto af = f, fg = f, fc = f;
        for (std::size_t i = 0; i < 5; ++i) {
            af[i] *= a;
            fg[i] += g[i];
            fc[i] += 7.5;
        }
        CHECK(std::abs(lip_seminorm(m, af) - std::abs(a) * lip_seminorm(m, f)) <= 1e-12);
        CHECK(lip_seminorm(m, fg) <= lip_seminorm(m, f) + lip_seminorm(m, g) + 1e-12);
        CHECK(std::abs(lip_seminorm(m, fc) - lip_seminorm(m, f)) <= 1e-12);
    }
}

TEST_CASE("McShane extension") {
    const auto m = geometric_chain(0.2, 6);
    SUBCASE("full mask is the identity") {
        const std::vector<double> f{0.0, 0.1, -0.05, 0.02, 0.0, 0.001};
        const auto ext = mcshane_extend(m, LipFunction{f, std::nullopt}, lip_seminorm(m, f));
        CHECK(ext.values == f);
    }
    SUBCASE("one-point mask gives the distance function") {
        const auto ext = mcshane_extend(m, LipFunction{{0, 0, 0, 0, 0, 0}, std::vector<std::size_t>{0}}, 1.0);
        for (std::size_t x = 0; x < m.size(); ++x) CHECK(ext.values[x] == m(x, 0));
    }
    SUBCASE("constant below the restricted seminorm is rejected") {
        const LipFunction f{{0, 1, 0, 0, 0, 0}, std::vector<std::size_t>{0, 1}};
        CHECK_THROWS_AS(mcshane_extend(m, f, 0.5), PreconditionError);
    }
    SUBCASE("random instances") {
        std::mt19937_64 rng(8);
        for (int trial = 0; trial < 100; ++trial) {
            const auto rm = random_metric(rng, 6);
            const auto f = random_values(rng, 6);
            std::vector<std::size_t> mask;
            for (std::size_t i = 0; i < 6; ++i)
                if (rng() % 2 || mask.size() < 2) mask.push_back(i);
            const double l = oracle::seminorm(rm.matrix(), 6, f, mask);
            const auto ext = mcshane_extend(rm, LipFunction{f, mask}, l);
            for (std::size_t p : mask) CHECK(ext.values[p] == f[p]);
            CHECK(std::abs(oracle::seminorm(rm.matrix(), 6, ext.values) - l) <= 1e-12);
            const auto low = whitney_extend(rm, LipFunction{f, mask}, l);
            for (std::size_t x = 0; x < 6; ++x) CHECK(low.values[x] <= ext.values[x] + 1e-12);
        }
    }
}

TEST_CASE("isometric image in l_inf") {
    std::mt19937_64 rng(21);
    const auto m = random_metric(rng, 5);
    CHECK(pair_count(m) == 10);
    const Space s = lip_image_space(m);
    CHECK(s.dim() == 10);
    for (int i = 0; i < 50; ++i) {
        const auto f = random_values(rng, 5);
        CHECK(s.norm(lip_embed(m, f)) == doctest::Approx(lip_seminorm(m, f)).epsilon(1e-15));
    }
}
