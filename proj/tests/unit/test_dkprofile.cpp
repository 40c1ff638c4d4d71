#include "oracles.hpp"

#include "usd2p/dkprofile.hpp"
#include "usd2p/errors.hpp"

#include <doctest.h>

#include <cmath>

using namespace usd2p;

namespace {

const Space kReal = Space::parse("lp(2,1)");

DkOptions options(std::uint64_t seed, double resolution = 0.0) {
    DkOptions o;
    o.seed = seed;
    o.candidates = 12;
    o.budget = 40;
    o.resolution = resolution;
    return o;
}

}  // namespace

TEST_CASE("scalar profile") {
    const auto prof = estimate_dk(kReal, 2, 0.1, 1.0, {1, 2, 3, 4}, options(7, 0.01));
    REQUIRE(prof.entries.size() == 4);
    const auto& e1 = *prof.at(1);
    CHECK(e1.certified);
    CHECK(e1.bracket.lower <= 1.8 + 1e-12);
    CHECK(e1.bracket.upper >= 1.8 - 1e-9);
    CHECK(e1.bracket.lower >= 1.75);
    CHECK(e1.bracket.upper <= 1.85);
    CHECK(std::abs(e1.witness_z[0]) == 1.0);
    CHECK(e1.witness_z[1] == -e1.witness_z[0]);
    for (std::size_t k = 2; k <= 4; ++k) {
        const auto& e = *prof.at(k);
        CAPTURE(k);
        CHECK(e.bracket.lower >= 0.85);
        CHECK(e.bracket.upper <= 0.95);
        CHECK(e.bracket.lower <= 0.9 + 1e-12);
        CHECK(e.bracket.upper >= 0.9 - 1e-9);
    }
}

TEST_CASE("profile invariants") {
    const Space x = Space::parse("lp(inf,2)");
    const auto prof = estimate_dk(x, 2, 0.2, 1.0, {1, 2, 3}, options(3, 0.1));
    for (std::size_t i = 0; i < prof.entries.size(); ++i) {
        const auto& e = prof.entries[i];
        CHECK(e.bracket.lower <= e.bracket.upper + 1e-12);
        if (i > 0) CHECK(e.bracket.upper <= prof.entries[i - 1].bracket.upper);
    }
    CHECK_THROWS_AS(estimate_dk(x, 2, 0.2, 1.0, {}, options(3)), ParameterError);
    CHECK_THROWS_AS(estimate_dk(x, 2, 0.2, 0.5, {1}, options(3)), ParameterError);
}

TEST_CASE("profiles are reproducible") {
    const Space x = Space::parse("sup(2, lp(3,2))");
    const auto a = estimate_dk(x, 2, 0.3, 1.0, {1, 2}, options(11));
    const auto b = estimate_dk(x, 2, 0.3, 1.0, {1, 2}, options(11));
    for (std::size_t i = 0; i < a.entries.size(); ++i) {
        CHECK(a.entries[i].bracket.upper == b.entries[i].bracket.upper);
        CHECK(a.entries[i].witness_z == b.entries[i].witness_z);
    }
}

TEST_CASE("larger eps and the plus set never raise the profile") {
    const Space x = Space::parse("lp(2,2)");
    const std::vector<std::size_t> ks{1, 2, 3};
    const auto plain = estimate_dk(x, 2, 0.2, 1.0, ks, options(5));

    auto o = options(5);
    o.dominating = &plain;
    const auto wider = estimate_dk(x, 2, 0.4, 1.0, ks, o);
    const auto plus = estimate_dk(x, 2, 0.2, 1.2, ks, o);
    for (std::size_t i = 0; i < ks.size(); ++i) {
        CHECK(wider.entries[i].bracket.upper <= plain.entries[i].bracket.upper + 1e-9);
        CHECK(plus.entries[i].bracket.upper <= plain.entries[i].bracket.upper + 1e-9);
        for (std::size_t zi = 0; zi < plain.traces.size(); ++zi) {
            CHECK(wider.traces[zi].upper[i] <= plain.traces[zi].upper[i] + 1e-9);
            CHECK(plus.traces[zi].upper[i] <= plain.traces[zi].upper[i] + 1e-9);
        }
    }
}

TEST_CASE("grid brackets are invariant under coordinate permutation") {
    const Space x = Space::parse("lp(inf,2)");
    GridOptions g;
    g.resolution = 0.1;
    const std::vector<double> z{0.7, -0.2, -0.9, 0.4};
    const std::vector<double> swapped{-0.2, 0.7, 0.4, -0.9};
    for (std::size_t m : {1, 2}) {
        const CmParams p{2, 0.25, 1.0, m};
        const auto a = dist_to_cm_grid(x, z, p, g);
        const auto b = dist_to_cm_grid(x, swapped, p, g);
        CHECK(a.lower == doctest::Approx(b.lower).epsilon(1e-9));
        CHECK(a.upper == doctest::Approx(b.upper).epsilon(1e-9));
    }
}

TEST_CASE("candidates include the alternating adversary") {
    const auto c = dk_candidates(kReal, 2, 4, 1);
    bool found = false;
    for (const auto& z : c) found = found || (z == std::vector<double>{1, -1});
    CHECK(found);
    CHECK(dk_candidates(kReal, 2, 4, 1) == c);
}

TEST_CASE("centralizer constructive bounds") {
    ConstructiveConfig cfg;
    cfg.k_max = 10;
    cfg.seed = 2;
    const auto b = constructive_dk_upper(Space::parse("lp(inf,8)"), 3, 0.2, cfg);
    CHECK(b.capacity == 8);
    CHECK(b.upper.size() == 8);
    CHECK(b.upper.at(1) == 2.0);
    CHECK(b.upper.at(8) == 0.25);
    CHECK(b.upper.count(9) == 0);
    CHECK(b.panel.pass());

    const auto f = constructive_dk_upper(Space::parse("fmod(8, lp(2,1))"), 2, 0.2, cfg);
    for (const auto& [k, u] : f.upper) CHECK(u == 2.0 / static_cast<double>(k));

    CHECK_THROWS_AS(constructive_dk_upper(Space::parse("lp(2,3)"), 2, 0.2, cfg), StructuralError);
}

TEST_CASE("ring-family constructive bounds") {
    const auto chain = geometric_chain(0.01, 12);
    ConstructiveConfig cfg;
    cfg.route = ConstructiveRoute::Ivakhno;
    cfg.k_max = 3;
    cfg.seed = 4;
    cfg.panel = 6;
    cfg.metric = &chain;
    const auto b = constructive_dk_upper(lip_image_space(chain), 2, 0.5, cfg);
    CHECK(b.capacity >= 3);
    CHECK(b.upper.at(3) == doctest::Approx(5.0 / 3.0).epsilon(1e-15));
    CHECK(b.panel.pass());

    const FiniteMetricSpace two(2, {0, 1, 1, 0});
    cfg.metric = &two;
    CHECK_THROWS_AS(constructive_dk_upper(lip_image_space(two), 2, 0.5, cfg), NotFoundError);
}

TEST_CASE("floor check") {
    const auto r = dk_floor_check(kReal, 2, 0.1, 4, options(1, 0.01));
    CHECK(r.conclusive);
    CHECK(r.floor >= 0.85);
    CHECK(r.entries.size() == 4);

    CHECK(dk_floor_check(kReal, 2, 0.1, 0, options(1, 0.01)).entries.empty());

    auto o = options(1, 0.5);
    o.candidates = 4;
    o.budget = 20;
    const auto li = dk_floor_check(Space::parse("lp(inf,8)"), 1, 0.2, 8, o);
    CHECK(li.floor <= 0.25 + 1e-12);

    CHECK_THROWS_AS(dk_floor_check(Space::parse("lp(inf,8)"), 3, 0.2, 2, options(1, 0.01)), CapabilityRefusal);
}

TEST_CASE("grid requirement surfaces as a refusal") {
    auto o = options(1, 0.01);
    o.require_grid = true;
    CHECK_THROWS_AS(estimate_dk(Space::parse("lp(inf,8)"), 3, 0.2, 1.0, {1}, o), CapabilityRefusal);
}
