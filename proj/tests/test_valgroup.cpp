#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "ultranorm/valgroup.hpp"

using namespace ultranorm;

static NormValue pos(Rat a, Int b = 0) { return NormValue::from_exponent(Exponent(a, b)); }

TEST_CASE("group law on positive values") {
    CHECK(pos(1) * pos(1) == pos(2));
    CHECK((pos(Rat(1, 2), 1) * pos(Rat(-1, 2), -1)) == NormValue::one());
    CHECK((pos(3) * NormValue::zero()).is_zero());
    CHECK((NormValue::zero() * NormValue::zero()).is_zero());
    // commutative, associative on a few values
    auto x = pos(Rat(2, 3), 1), y = pos(Rat(-1, 5), -2), z = pos(7);
    CHECK(x * y == y * x);
    CHECK((x * y) * z == x * (y * z));
}

TEST_CASE("exact comparison") {
    // 1 < theta, so e^-1 > e^-theta
    CHECK(cmp(pos(1), pos(0, 1)) == Cmp::GT);
    CHECK(cmp(NormValue::zero(), pos(5)) == Cmp::LT);
    CHECK(cmp(pos(3, -2), pos(3, -2)) == Cmp::EQ);
    // 3/2 > theta (9/4 > 2): e^-(3/2) < e^-theta
    CHECK(cmp(pos(Rat(3, 2)), pos(0, 1)) == Cmp::LT);
    // -3/2 vs -theta
    CHECK(cmp(pos(Rat(-3, 2)), pos(0, -1)) == Cmp::GT);
}

TEST_CASE("valuation group membership") {
    CHECK(pos(Rat(7, 3)).in_VK());
    CHECK_FALSE(pos(0, 1).in_VK());
    CHECK(pos(-2).in_VK());
    CHECK_THROWS_AS(NormValue::zero().in_VK(), std::domain_error);
    // subgroup: closed under product and inverse
    auto x = pos(Rat(2, 7)), y = pos(Rat(-5, 3));
    CHECK((x * y).in_VK());
    CHECK(x.inverse().in_VK());
    auto off = pos(Rat(1, 2), 3);
    CHECK_FALSE((off * x).in_VK());
    CHECK_FALSE(off.inverse().in_VK());
}

TEST_CASE("order respects multiplication") {
    auto vals = {pos(0), pos(1), pos(Rat(1, 2), 1), pos(-3, 2), pos(Rat(7, 5), -1)};
    for (auto& x : vals)
        for (auto& y : vals)
            for (auto& z : vals) {
                if (cmp(x, y) == Cmp::LT) CHECK(cmp(x * z, y * z) == Cmp::LT);
            }
}

TEST_CASE("exact comparison agrees with floating point when the margin is clear") {
    std::mt19937_64 rng(20240817);
    std::uniform_int_distribution<int> num(-40, 40), den(1, 12), bco(-6, 6);
    const double theta = std::sqrt(2.0);
    for (int i = 0; i < 1000; ++i) {
        Exponent e1(Rat(num(rng), den(rng)), bco(rng));
        Exponent e2(Rat(num(rng), den(rng)), bco(rng));
        double d1 = static_cast<double>(e1.a) + static_cast<double>(e1.b) * theta;
        double d2 = static_cast<double>(e2.a) + static_cast<double>(e2.b) * theta;
        if (std::abs(d1 - d2) <= 1e-6) continue;
        CHECK((e1 < e2) == (d1 < d2));
    }
}

TEST_CASE("exponent grammar round trip") {
    for (std::string s : {"1", "-2/3", "1/2+3*theta", "-1/2-theta", "theta", "2*theta", "0"}) {
        Exponent e = parse_exponent(s);
        CHECK(parse_exponent(e.str()) == e);
    }
    CHECK(parse_exponent("1/2 + 3*theta") == Exponent(Rat(1, 2), 3));
    CHECK_THROWS_AS(parse_exponent("1/0"), parse_error);
    CHECK_THROWS_AS(parse_exponent("thetax"), parse_error);
}
