#include "glassbox/types.hpp"

#include <doctest.h>

using namespace glassbox;

TEST_SUITE("types") {

TEST_CASE("fraction equality is value-based") {
    CHECK(Fraction{1, 4} == Fraction{25, 100});
    CHECK(Fraction{0, 1} == Fraction{0, 7});
    CHECK_FALSE(Fraction{1, 3} == Fraction{33, 100});
}

TEST_CASE("fraction ordering crosses denominators exactly") {
    CHECK(frac_lt(Fraction{1, 3}, Fraction{34, 100}));
    CHECK_FALSE(frac_lt(Fraction{1, 3}, Fraction{33, 100}));
    CHECK(frac_le(Fraction{25, 100}, Fraction{1, 4}));
    CHECK_FALSE(frac_le(Fraction{26, 100}, Fraction{1, 4}));
    // denominators large enough to overflow a naive double comparison's
    // precision: 333333333/1000000000 vs 1/3
    CHECK(frac_lt(Fraction{333333333, 1000000000}, Fraction{1, 3}));
}

TEST_CASE("frac_abs_diff reduces to lowest terms") {
    const Fraction d = frac_abs_diff(Fraction{3, 4}, Fraction{1, 4});
    CHECK(d.num == 1);
    CHECK(d.den == 2);
    CHECK(frac_abs_diff(Fraction{2, 2}, Fraction{50, 50}).to_string() == "0/1");
    CHECK(frac_abs_diff(Fraction{1, 2}, Fraction{2, 2}).to_string() == "1/2");
    CHECK(frac_abs_diff(Fraction{17, 100}, Fraction{42, 100}).to_string() == "1/4");
}

TEST_CASE("parse_fraction accepts percent, ratio, and integer forms") {
    Fraction f;
    REQUIRE(parse_fraction("25%", f));
    CHECK(f == Fraction{1, 4});
    REQUIRE(parse_fraction("1/4", f));
    CHECK(f == Fraction{1, 4});
    REQUIRE(parse_fraction("1", f));
    CHECK(f == Fraction{1, 1});
    REQUIRE(parse_fraction("0", f));
    CHECK(f == Fraction{0, 1});
    REQUIRE(parse_fraction("150%", f));
    CHECK(f == Fraction{3, 2});
}

TEST_CASE("parse_fraction rejects malformed input") {
    Fraction f;
    CHECK_FALSE(parse_fraction("", f));
    CHECK_FALSE(parse_fraction("abc", f));
    CHECK_FALSE(parse_fraction("1/0", f));
    CHECK_FALSE(parse_fraction("-1/4", f));
    CHECK_FALSE(parse_fraction("1.5", f));
    CHECK_FALSE(parse_fraction("25%%", f));
    CHECK_FALSE(parse_fraction("%", f));
    CHECK_FALSE(parse_fraction("3/", f));
}

TEST_CASE("typed values compare within their type") {
    using TV = TypedValue;
    CHECK(TV::make_int(5) == TV::make_int(5));
    CHECK_FALSE(TV::make_int(5) == TV::make_money(5));
    CHECK(TV::make_string("a").to_string() == "a");
    CHECK(TV::make_bool(true).to_string() == "true");
    CHECK(TV::make_money(12300).to_string() == "12300");
    CHECK(TV::make_int(5).is_numeric());
    CHECK(TV::make_money(5).is_numeric());
    CHECK_FALSE(TV::make_string("5").is_numeric());
}

}  // TEST_SUITE
