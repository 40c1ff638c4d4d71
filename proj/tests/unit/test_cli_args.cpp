#include "cli_args.hpp"

#include "usd2p/errors.hpp"

#include <doctest.h>

using namespace usd2p;
using namespace usd2p::cli;

TEST_CASE("k ranges") {
    CHECK(parse_k_range("3") == std::vector<std::size_t>{3});
    CHECK(parse_k_range("1..4") == std::vector<std::size_t>{1, 2, 3, 4});
    CHECK(parse_k_range("4,1,2,2") == std::vector<std::size_t>{1, 2, 4});
    for (const char* bad : {"", "0", "4..1", "a", "1..", "1,,2", "-1"}) {
        CAPTURE(bad);
        CHECK_THROWS_AS(parse_k_range(bad), ParseError);
    }
}

TEST_CASE("reals and indices") {
    CHECK(parse_reals("1, -0.5 2e-3") == std::vector<double>{1, -0.5, 2e-3});
    CHECK_THROWS_AS(parse_reals("1,x"), ParseError);
    CHECK_THROWS_AS(parse_reals(""), ParseError);
    CHECK(parse_indices("0,3,2") == std::vector<std::size_t>{0, 3, 2});
    CHECK_THROWS_AS(parse_indices("1.5"), ParseError);
}

TEST_CASE("alpha") {
    CHECK(parse_alpha("plain", 0.2) == 1.0);
    CHECK(parse_alpha("plus", 0.2) == 1.2);
    CHECK(parse_alpha("1.5", 0.2) == 1.5);
    CHECK_THROWS_AS(parse_alpha("-1", 0.2), ParseError);
    CHECK_THROWS_AS(parse_alpha("big", 0.2), ParseError);
}
