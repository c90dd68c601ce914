#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "ultranorm/series.hpp"

using namespace ultranorm;

static TruncSeries S(const std::string& s) { return parse_series(s); }

TEST_CASE("addition merges terms and truncates") {
    CHECK(S("1 + t") + S("-1 + t^2") == S("t + t^2"));
    CHECK((S("t^(1/2)") + S("-t^(1/2)")).is_zero());
    CHECK(S("1 + O(t^2)") + S("t^2") == S("1 + O(t^2)"));
}

TEST_CASE("multiplication and precision propagation") {
    CHECK(S("1+t") * S("1-t") == S("1 - t^2"));
    CHECK(S("t^(1/2)") * S("t^(1/3)") == S("t^(5/6)"));
    CHECK(S("1 + O(t)") * S("t^2") == S("t^2 + O(t^3)"));
    // |xy| = |x||y| on exact inputs
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> c(-5, 5), e(-4, 9), d(1, 4);
    for (int i = 0; i < 200; ++i) {
        std::vector<Term> a, b;
        for (int k = 0; k < 3; ++k) {
            a.push_back(Term{Rat(e(rng), d(rng)), Rat(c(rng))});
            b.push_back(Term{Rat(e(rng), d(rng)), Rat(c(rng))});
        }
        TruncSeries x(a), y(b);
        if (x.is_zero() || y.is_zero()) continue;
        CHECK((x * y).norm() == x.norm() * y.norm());
    }
}

TEST_CASE("ultrametric inequality with equality off ties") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> c(-5, 5), e(-4, 9), d(1, 4);
    for (int i = 0; i < 300; ++i) {
        std::vector<Term> a, b;
        for (int k = 0; k < 4; ++k) {
            a.push_back(Term{Rat(e(rng), d(rng)), Rat(c(rng))});
            b.push_back(Term{Rat(e(rng), d(rng)), Rat(c(rng))});
        }
        TruncSeries x(a), y(b);
        NormValue lhs = (x + y).norm();
        NormValue rhs = max(x.norm(), y.norm());
        CHECK(lhs <= rhs);
        if (!(x.norm() == y.norm())) CHECK(lhs == rhs);
    }
}

TEST_CASE("inversion") {
    // invert(1 - t, 3): geometric series oracle, product == 1 mod t^3
    TruncSeries x = S("1 - t");
    TruncSeries inv = x.inverted(3);
    CHECK(inv == S("1 + t + t^2 + O(t^3)"));
    TruncSeries prod = x * inv;
    REQUIRE(prod.terms().size() == 1);
    CHECK(prod.terms()[0].coeff == 1);
    CHECK(prod.terms()[0].exponent == 0);

    CHECK(S("t").inverted(2) == S("t^(-1) + O(t^2)"));
    CHECK(S("2").inverted(1) == S("1/2 + O(t)"));
    CHECK_THROWS_AS(TruncSeries::zero().inverted(1), std::domain_error);

    // random invert check: x * invert(x, p) == 1 mod t^p
    std::mt19937_64 rng(13);
    std::uniform_int_distribution<int> c(-4, 4), e(0, 5), d(1, 3);
    for (int i = 0; i < 100; ++i) {
        std::vector<Term> a{Term{Rat(e(rng) - 2, d(rng)), Rat(c(rng) == 0 ? 1 : c(rng))}};
        for (int k = 0; k < 3; ++k) a.push_back(Term{Rat(e(rng), d(rng)), Rat(c(rng))});
        TruncSeries x2(a);
        TruncSeries ix = x2.inverted(4);
        TruncSeries p = (x2 * ix) - TruncSeries::one();
        for (auto& t : p.terms()) CHECK(t.exponent >= 4);
    }
}

TEST_CASE("valuation") {
    CHECK(S("t^(1/2) + t").valuation().kind == Valuation::Finite);
    CHECK(S("t^(1/2) + t").valuation().value == Rat(1, 2));
    CHECK(TruncSeries::zero().valuation().kind == Valuation::PlusInfinity);
    auto v = S("O(t^3)").valuation();
    CHECK(v.kind == Valuation::AboveBound);
    CHECK(v.value == 3);
    CHECK_THROWS_AS(S("O(t^3)").norm(), unresolved_error);
}

TEST_CASE("series grammar round trip") {
    for (std::string s :
         {"3*t^(1/2) + t^2 - 1/5*t^(7/3)", "1", "-t", "0", "t^(-2) + 1 + O(t^(5/2))"}) {
        TruncSeries x = S(s);
        CHECK(parse_series(x.str()) == x);
    }
}
