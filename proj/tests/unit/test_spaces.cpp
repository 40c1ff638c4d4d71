#include "oracles.hpp"

#include "usd2p/errors.hpp"
#include "usd2p/spaces.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace usd2p;

namespace {

const char* const kGrammarSamples[] = {
    "lp(2,3)", "lp(1,4)", "lp(inf,3)", "lp(3.5,2)", "sup(3, lp(inf,2))", "sup(2, lp(1,3))",
    "dsum(1, lp(1,2), lp(inf,2))", "dsum(inf, lp(2,2), lp(1,1))", "dsum(2.5, lp(2,1), sup(2, lp(1,2)))",
    "fmod(4, lp(2,2))", "fmod(3, dsum(1, lp(2,1), lp(inf,2)))",
};

std::vector<double> random_coords(std::mt19937_64& rng, std::size_t d) {
    std::normal_distribution<double> g;
    std::vector<double> v(d);
    for (double& x : v) x = g(rng);
    return v;
}

}  // namespace

TEST_CASE("norm examples") {
    CHECK(norm(Space::parse("lp(2,2)"), std::vector<double>{3, 4}) == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(norm(Space::parse("sup(2, lp(1,2))"), std::vector<double>{1, 1, 0.5, 0}) == 2.0);
    for (const char* text : kGrammarSamples) {
        const Space s = Space::parse(text);
        CHECK(s.norm(std::vector<double>(s.dim(), 0.0)) == 0.0);
    }
}

TEST_CASE("dimension mismatch names both sizes") {
    const Space s = Space::parse("lp(2,3)");
    try {
        s.norm(std::vector<double>{1, 2});
        FAIL("expected StructuralError");
    } catch (const StructuralError& e) {
        const std::string what = e.what();
        CHECK(what.find('3') != std::string::npos);
        CHECK(what.find('2') != std::string::npos);
    }
}

TEST_CASE("grammar round trip and errors") {
    for (const char* text : kGrammarSamples) {
        const Space s = Space::parse(text);
        CHECK(Space::parse(s.to_string()) == s);
    }
    CHECK(Space::parse("lp(inf,4)").dim() == 4);
    CHECK(Space::parse("sup(3, lp(inf,4))").dim() == 12);
    CHECK(Space::parse("fmod(8, lp(2,1))").dim() == 8);
    CHECK(Space::parse("dsum(1, lp(1,2), lp(inf,2))").dim() == 4);
    for (const char* bad : {"", "lp(2)", "lp(0.5,2)", "lp(2,0)", "sup(0, lp(2,1))", "lq(2,2)", "lp(2,2) x",
                            "dsum(1, lp(2,1))", "fmod(3)"}) {
        CAPTURE(bad);
        CHECK_THROWS_AS(Space::parse(bad), ParseError);
    }
}

TEST_CASE("mean_block examples") {
    const Space t = Space::sup_tuple(2, Space::parse("lp(2,3)"));
    const std::vector<double> v{0.3, -1.0, 2.0};
    std::vector<double> z(v);
    z.insert(z.end(), v.begin(), v.end());
    CHECK(mean_block(Vector(t, z)).coords == v);

    std::vector<double> w(v);
    for (double x : v) w.push_back(-x);
    for (double x : mean_block(Vector(t, w)).coords) CHECK(x == 0.0);

    const Space t3 = Space::sup_tuple(3, Space::parse("lp(inf,1)"));
    const auto m = mean_block(Vector(t3, {1, 1, -1})).coords;
    REQUIRE(m.size() == 1);
    CHECK(m[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("sample_unit_ball") {
    const auto pts = sample_unit_ball(Space::parse("lp(inf,2)"), 8, 1);
    auto has = [&](std::vector<double> v) {
        return std::any_of(pts.begin(), pts.end(), [&](const Vector& p) { return p.coords == v; });
    };
    CHECK(has({1, 1}));
    CHECK(has({1, -1}));
    CHECK(has({-1, 1}));
    CHECK(has({-1, -1}));

    for (const char* text : kGrammarSamples) {
        const Space s = Space::parse(text);
        const auto a = sample_unit_ball(s, 40, 9);
        const auto b = sample_unit_ball(s, 40, 9);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].coords == b[i].coords);
    }

    const Space l2 = Space::parse("lp(2,3)");
    const auto ball = sample_unit_ball(l2, 100, 3);
    CHECK(ball.size() == 100);
    for (const auto& v : ball) CHECK(oracle::lp_norm(v.coords, 2.0) <= 1.0 + 1e-12);
}

TEST_CASE("homogeneity and subadditivity") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> c(-5.0, 5.0);
    for (const char* text : kGrammarSamples) {
        const Space s = Space::parse(text);
        CAPTURE(text);
        for (int i = 0; i < 1000; ++i) {
            auto v = random_coords(rng, s.dim());
            const double a = c(rng);
            auto av = v;
            for (double& x : av) x *= a;
            CHECK(std::abs(s.norm(av) - std::abs(a) * s.norm(v)) <= 1e-12 * std::max(1.0, s.norm(av)));
            auto u = random_coords(rng, s.dim());
            auto uv = u;
            for (std::size_t k = 0; k < uv.size(); ++k) uv[k] += v[k];
            CHECK(s.norm(uv) <= s.norm(u) + s.norm(v) + 1e-12);
        }
    }
}

TEST_CASE("structural norm identities") {
    std::mt19937_64 rng(7);
    const Space l1 = Space::parse("lp(1,2)");
    const Space li = Space::parse("lp(inf,3)");
    const Space sum1 = Space::direct_sum(Exponent(1.0), l1, li);
    const Space suminf = Space::direct_sum(Exponent::infinity(), l1, li);
    const Space tup = Space::sup_tuple(3, Space::parse("lp(3,2)"));
    for (int i = 0; i < 200; ++i) {
        const auto v = random_coords(rng, 5);
        const std::vector<double> a(v.begin(), v.begin() + 2), b(v.begin() + 2, v.end());
        CHECK(sum1.norm(v) == l1.norm(a) + li.norm(b));
        CHECK(suminf.norm(v) == std::max(l1.norm(a), li.norm(b)));

        const auto w = random_coords(rng, 6);
        const Space& in = tup.inner();
        const double expect = std::max({in.norm(std::vector<double>(w.begin(), w.begin() + 2)),
                                        in.norm(std::vector<double>(w.begin() + 2, w.begin() + 4)),
                                        in.norm(std::vector<double>(w.begin() + 4, w.end()))});
        CHECK(tup.norm(w) == expect);
        CHECK(tup.norm(w) == doctest::Approx(oracle::sup_lp_norm(w, 3, 3.0)).epsilon(1e-13));
    }
}

TEST_CASE("coordinate permutation invariance") {
    std::mt19937_64 rng(11);
    for (const char* text : {"lp(1,5)", "lp(2,5)", "lp(inf,5)", "lp(4.5,5)"}) {
        const Space s = Space::parse(text);
        for (int i = 0; i < 100; ++i) {
            auto v = random_coords(rng, 5);
            const double before = s.norm(v);
            std::shuffle(v.begin(), v.end(), rng);
            CHECK(std::abs(s.norm(v) - before) <= 1e-12 * std::max(1.0, before));
        }
    }
}

TEST_CASE("norming functionals") {
    std::mt19937_64 rng(5);
    for (const char* text : kGrammarSamples) {
        const Space s = Space::parse(text);
        CAPTURE(text);
        for (int i = 0; i < 100; ++i) {
            const auto v = random_coords(rng, s.dim());
            std::vector<double> phi(s.dim());
            s.norming_functional(v, phi);
            CHECK(s.dual_norm(phi) == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(usd2p::apply(phi, v) == doctest::Approx(s.norm(v)).epsilon(1e-12));
        }
    }
}

TEST_CASE("polyhedral norms agree with dual vertex enumeration") {
    std::mt19937_64 rng(13);
    for (const char* text : {"lp(1,3)", "lp(inf,3)", "sup(2, lp(1,2))", "dsum(1, lp(1,2), lp(inf,2))",
                             "dsum(inf, lp(inf,2), sup(2, lp(1,1)))", "fmod(3, lp(1,2))"}) {
        const Space s = Space::parse(text);
        REQUIRE(s.is_polyhedral());
        const auto verts = oracle::dual_vertices(s);
        for (int i = 0; i < 100; ++i) {
            const auto v = random_coords(rng, s.dim());
            double m = 0.0;
            for (const auto& phi : verts) m = std::max(m, oracle::dot(phi, v));
            CHECK(s.norm(v) == doctest::Approx(m).epsilon(1e-13));
        }
    }
}

TEST_CASE("exponent validation") {
    CHECK_THROWS_AS(Exponent(0.99), ParameterError);
    CHECK(Exponent(2.0).conjugate() == Exponent(2.0));
    CHECK(Exponent(1.0).conjugate().is_infinite());
    CHECK(Exponent::infinity().conjugate().is_one());
}
