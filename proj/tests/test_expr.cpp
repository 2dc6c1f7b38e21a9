#include <cmath>
#include <random>

#include "doctest.h"
#include "sepdiff/errors.hpp"
#include "sepdiff/expr.hpp"
#include "test_support.hpp"

using namespace sepdiff;

TEST_CASE("parse builds the expected trees") {
    Expr two = Expr::constant(2.0);
    Expr e = parse_expression("exp(-2*sqrt(x))");
    CHECK(e == Expr::unary(Op::Exp, -(two * Expr::unary(Op::Sqrt, Expr::var()))));
    CHECK(parse_expression("x^(-1)") == Expr::pow(Expr::var(), -1.0));
    CHECK(parse_expression("x^-1") == Expr::pow(Expr::var(), -1.0));
    CHECK(parse_expression(" 1.5e2 * x ") == Expr::constant(150.0) * Expr::var());
    CHECK(parse_expression("x^(1/3)") == Expr::pow(Expr::var(), 1.0 / 3.0));
}

TEST_CASE("parse errors carry offsets") {
    try {
        parse_expression("exp(");
        FAIL("expected a syntax error");
    } catch (const SyntaxError& err) {
        CHECK(err.offset == 4);
    }
    CHECK_THROWS_AS(parse_expression("sin(x)"), UnknownFunction);
    CHECK_THROWS_AS(parse_expression("x +"), SyntaxError);
    CHECK_THROWS_AS(parse_expression("x^x"), SyntaxError);
    CHECK_THROWS_AS(parse_expression("y"), SyntaxError);
    CHECK_THROWS_AS(parse_expression("(x"), SyntaxError);
}

TEST_CASE("evaluate") {
    CHECK(*evaluate(parse_expression("exp(-2*sqrt(x))"), 0.0) == 1.0);
    CHECK(*evaluate(parse_expression("x^(-1)"), 2.0) == 0.5);
    CHECK_FALSE(evaluate(parse_expression("log(x)"), -1.0).has_value());
    CHECK_FALSE(evaluate(parse_expression("x^(-1)"), 0.0).has_value());
    CHECK_FALSE(evaluate(parse_expression("1/(x-1)"), 1.0).has_value());
    CHECK_FALSE(evaluate(parse_expression("x^0.5"), -1.0).has_value());
    CHECK(*evaluate(parse_expression("x^3"), -2.0) == -8.0);
    CHECK(*evaluate(parse_expression("-x^2"), 3.0) == -9.0);
    CHECK(*evaluate(parse_expression("2-3-4"), 0.0) == -5.0);
    CHECK(*evaluate(parse_expression("8/4/2"), 0.0) == 1.0);
}

TEST_CASE("derivative examples") {
    CHECK(to_string(derivative(parse_expression("x^2"))) == "2*x^1");
    CHECK(to_string(derivative(parse_expression("7"))) == "0");
    Expr d = derivative(parse_expression("exp(-2*sqrt(x))"));
    for (double x : {0.1, 1.0, 4.0}) {
        double want = std::exp(-2 * std::sqrt(x)) * (-1 / std::sqrt(x));
        CHECK(*evaluate(d, x) == doctest::Approx(want).epsilon(1e-14));
    }
    Expr da = derivative(parse_expression("abs(x)"));
    CHECK(*evaluate(da, -2.0) == -1.0);
    CHECK(*evaluate(da, 3.0) == 1.0);
}

TEST_CASE("fold and substitute") {
    CHECK(fold_constants(parse_expression("2*3+x*1+0")) == parse_expression("6+x"));
    Expr e = substitute(parse_expression("x^2"), parse_expression("x+1"));
    CHECK(*evaluate(e, 2.0) == 9.0);
}

TEST_CASE("local exponent examples") {
    auto a = local_exponent(parse_expression("x^(-1)"), 0.0, Side::Right);
    REQUIRE(a);
    CHECK(a->p == doctest::Approx(-1.0).epsilon(1e-9));
    auto b = local_exponent(parse_expression("exp(-2*sqrt(x))"), 0.0, Side::Right);
    REQUIRE(b);
    CHECK(std::fabs(b->p) < 1e-3);
    auto c = local_exponent(parse_expression("x^2 + x^3"), 0.0, Side::Right);
    REQUIRE(c);
    CHECK(c->p == doctest::Approx(2.0).epsilon(1e-5));
    // At infinity the cubic term dominates: growth exponent 3, i.e. p = -3 in 1/|x|.
    auto d = local_exponent(parse_expression("x^2 + x^3"), INFINITY, Side::Left);
    REQUIRE(d);
    CHECK(d->p == doctest::Approx(-3.0).epsilon(1e-5));
    CHECK_FALSE(local_exponent(parse_expression("log(x)"), -1.0, Side::Left));
}

TEST_CASE("local exponent recovers monomial powers") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> up(-3.0, 3.0), ua(-5.0, 5.0), uc(0.1, 10.0);
    for (int i = 0; i < 200; ++i) {
        double p = up(rng), a = ua(rng), c = uc(rng);
        Expr e = Expr::constant(c) * Expr::pow(Expr::var() - Expr::constant(a), p);
        auto le = local_exponent(e, a, Side::Right);
        REQUIRE(le);
        CHECK(std::fabs(le->p - p) < 1e-3);
    }
}

TEST_CASE("property: print/parse round trip on random trees") {
    std::mt19937_64 rng(2024);
    for (int i = 0; i < 1000; ++i) {
        Expr e = test_support::random_expr(rng, 6);
        REQUIRE(depth(e) <= 6);
        std::string s = to_string(e);
        Expr back = parse_expression(s);
        INFO(s);
        CHECK(back == e);
    }
}

TEST_CASE("property: derivative agrees with central differences") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ux(-3.0, 3.0);
    int checked = 0, attempts = 0;
    while (checked < 300 && attempts < 200000) {
        ++attempts;
        Expr e = test_support::random_expr(rng, 5);
        Expr d = derivative(e);
        double x = ux(rng);
        double h = 1e-5 * std::max(1.0, std::fabs(x));
        auto f0 = evaluate(e, x), dv = evaluate(d, x);
        auto fp = evaluate(e, x + h), fm = evaluate(e, x - h);
        auto fp2 = evaluate(e, x + h / 2), fm2 = evaluate(e, x - h / 2);
        if (!f0 || !dv || !fp || !fm || !fp2 || !fm2) continue;
        if (!std::isfinite(*f0) || std::fabs(*f0) > 1e6 || !std::isfinite(*dv) || std::fabs(*dv) > 1e6) continue;
        double fd = (*fp - *fm) / (2 * h);
        double fd2 = (*fp2 - *fm2) / h;
        // Skip points where the difference quotient itself has not settled
        // (next to a singularity or a kink of abs).
        if (std::fabs(fd - fd2) > 1e-8 * std::max(1.0, std::fabs(fd))) continue;
        INFO(to_string(e), " at ", x);
        CHECK(std::fabs(*dv - fd) <= 1e-6 * std::max(1.0, std::fabs(*dv)));
        ++checked;
    }
    CHECK(checked >= 200);
}
