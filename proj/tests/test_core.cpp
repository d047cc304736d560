#include <doctest.h>

#include "relia/core.hpp"

using namespace relia;

TEST_CASE("rational literals parse exactly") {
    CHECK(parse_rational("3/16") == Rational(3, 16));
    CHECK(parse_rational(" 6/8 ") == Rational(3, 4));
    CHECK(parse_rational("0.1") == Rational(1, 10));
    CHECK(parse_rational("0.0625") == Rational(1, 16));
    CHECK(parse_rational("1") == Rational(1));
    CHECK(parse_rational("1e-3") == Rational(1, 1000));
    CHECK(parse_rational("2.5E-1") == Rational(1, 4));
    CHECK(parse_rational(".5") == Rational(1, 2));
    CHECK(parse_rational("-0.25") == Rational(-1, 4));
    CHECK(parse_rational("12e2") == Rational(1200));
}

TEST_CASE("malformed literals are rejected") {
    for (const char* bad : {"", "abc", "1/0", "1/", "/2", "0.1.2", "1e", "nan", "inf", "1/2/3", "."}) {
        CAPTURE(bad);
        CHECK_THROWS_AS(parse_rational(bad), Error);
    }
}

TEST_CASE("double literals round correctly") {
    CHECK(parse_double("0.1") == 0.1);
    CHECK(parse_double("1/3") == 1.0 / 3.0);
    CHECK(parse_double("1/4") == 0.25);
    CHECK(parse_double("+0.5") == 0.5);
}

TEST_CASE("state sets") {
    StateSet a(5), b(5);
    a.insert(StateId{0});
    a.insert(StateId{3});
    b.insert(StateId{3});
    CHECK(a.size() == 2);
    CHECK(b.is_subset_of(a));
    CHECK_FALSE(a.is_subset_of(b));
    CHECK(a.intersects(b));
    CHECK((a - b).members() == std::vector<StateId>{StateId{0}});
    CHECK((a | b) == a);
    CHECK(a.complement().size() == 3);
    CHECK(StateSet(4).empty());
}

TEST_CASE("number formatting") {
    CHECK(Num<double>::format(0.5) == "0.5");
    CHECK(std::stod(Num<double>::format(0.1)) == 0.1);
    CHECK(Num<double>::format(17.0 / 154.0).size() <= 20);
    CHECK(Num<Rational>::format(Rational(17, 154)) == "17/154");
    CHECK(Num<Rational>::format(parse_rational("2/2")) == "1");
}
