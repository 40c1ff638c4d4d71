#include "usd2p/errors.hpp"
#include "usd2p/json_io.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace usd2p;
using io::json;

TEST_CASE("ring family round trip") {
    RingFamily f{0.5, {{3, 4, 1e-7, 1e-5, 0.1}, {1, 2, 0.001, 0.0099, 0.5}}};
    const auto back = io::ring_family_from_json(json::parse(io::ring_family_json(f).dump()));
    CHECK(back.epsilon == f.epsilon);
    REQUIRE(back.size() == 2);
    CHECK(back.entries[1].t == 1);
    CHECK(back.entries[1].rho == 0.0099);
    CHECK(back.entries[0].R == 0.1);
}

TEST_CASE("malformed ring families") {
    CHECK_THROWS_AS(io::ring_family_from_json(json::array()), ParseError);
    CHECK_THROWS_AS(io::ring_family_from_json(json{{"entries", json::array()}}), ParseError);
    CHECK_THROWS_AS(io::ring_family_from_json(json{{"epsilon", 0.5}}), ParseError);
    CHECK_THROWS_AS(io::ring_family_from_json(json::parse(R"({"epsilon":0.5,"entries":[{"t":-1}]})")), ParseError);
    CHECK_THROWS_AS(
        io::ring_family_from_json(json::parse(R"({"epsilon":0.5,"entries":[{"t":1,"tau":2,"r":"x","rho":1,"R":2}]})")),
        ParseError);
}

TEST_CASE("bracket shape") {
    DistanceBracket b;
    b.lower = 0.89;
    b.upper = 0.9;
    b.lower_method = "grid";
    b.upper_method = "descent";
    b.witness = ConvexDecomposition{{0.5, 0.5}, {{1, 0.8}, {-0.8, -1}}};
    b.seed = 3;
    const auto j = io::bracket_json(Space::parse("lp(2,1)"), {2, 0.1, 1.0, 2}, std::vector<double>{1, -1}, b);
    std::vector<std::string> keys;
    for (const auto& [k, v] : j.items()) keys.push_back(k);
    CHECK(keys == std::vector<std::string>{"params", "z", "lower", "upper", "gap", "witness", "method", "seed"});
    CHECK(j["gap"].get<double>() == doctest::Approx(0.01));
    CHECK(j["witness"]["weights"].size() == 2);
    CHECK(j["params"]["space"] == "lp(2,1)");
}

TEST_CASE("report shape") {
    CertificateReport r;
    r.require_at_most("a", 1.0, 2.0);
    r.require_at_least("b", 1.0, 2.0);
    const auto j = io::report_json(r);
    CHECK(j["pass"] == false);
    CHECK(j["checks"][1]["name"] == "b");
    CHECK(j["checks"][1]["pass"] == false);
    CHECK(r.first_failure()->name == "b");
}

TEST_CASE("profile csv") {
    std::ostringstream out;
    io::write_profile_csv(out, {{"seed", "7"}, {"space", "lp(2,1)"}},
                          {{1, 1.785, 1.8, "grid/descent", "0"}, {2, 0.1 + 0.2, 0.9, "none/descent", "3"}});
    CHECK(out.str() ==
          "# seed=7\n# space=lp(2,1)\nk,lower,upper,method,witness-id\n1,1.785,1.8,grid/descent,0\n"
          "2,0.30000000000000004,0.9,none/descent,3\n");
    CHECK(io::format_double(HUGE_VAL) == "inf");
}
