#include <cmath>

#include "doctest.h"
#include "sepdiff/errors.hpp"
#include "sepdiff/tail.hpp"

using namespace sepdiff;

TEST_CASE("adaptive quadrature on smooth and mapped intervals") {
    CHECK(integrate_or_throw([](double x) { return std::sin(x); }, 0.0, M_PI) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(integrate_or_throw([](double x) { return std::exp(-x); }, 0.0, INFINITY) ==
          doctest::Approx(1.0).epsilon(1e-9));
    CHECK(integrate_or_throw([](double x) { return std::exp(-x * x); }, -INFINITY, INFINITY) ==
          doctest::Approx(std::sqrt(M_PI)).epsilon(1e-9));
    CHECK(integrate_or_throw([](double x) { return x; }, 2.0, 0.0) == doctest::Approx(-2.0));
}

TEST_CASE("tridiagonal solve") {
    // [2 1 0; 1 2 1; 0 1 2] x = [4 8 8] has x = [1 2 3]
    auto x = solve_tridiagonal({0, 1, 1}, {2, 2, 2}, {1, 1, 0}, {4, 8, 8});
    CHECK(x[0] == doctest::Approx(1.0));
    CHECK(x[1] == doctest::Approx(2.0));
    CHECK(x[2] == doctest::Approx(3.0));
}

TEST_CASE("improper integral examples") {
    auto sing = EndpointSpec{true, std::nullopt};
    IntegralVerdict a = improper_integral([](double x) { return std::pow(x, -0.5); }, 0.0, 1.0, sing, {});
    CHECK(a.finite);
    CHECK(a.value == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(a.method == Method::ExponentFit);
    IntegralVerdict b = improper_integral([](double x) { return 1.0 / x; }, 0.0, 1.0, sing, {});
    CHECK_FALSE(b.finite);
    CHECK(std::isinf(b.value));
    IntegralVerdict c = improper_integral([](double x) { return std::pow(x, -0.99); }, 0.0, 1.0, sing, {});
    CHECK(c.finite);
    CHECK(c.value == doctest::Approx(100.0).epsilon(1e-8));
}

TEST_CASE("improper integrals at infinity and overrides") {
    IntegralVerdict a = improper_integral([](double x) { return 1.0 / (x * x); }, 1.0, INFINITY);
    CHECK(a.finite);
    CHECK(a.value == doctest::Approx(1.0).epsilon(1e-9));
    IntegralVerdict b = improper_integral([](double x) { return 1.0 / x; }, 1.0, INFINITY);
    CHECK_FALSE(b.finite);
    IntegralVerdict c = improper_integral([](double x) { return std::exp(-2 * std::sqrt(x)); }, 0.0, INFINITY);
    CHECK(c.finite);
    CHECK(c.value == doctest::Approx(0.5).epsilon(1e-9));
    IntegralVerdict d = improper_integral([](double x) { return std::exp(2 * std::sqrt(x)); }, 0.0, INFINITY);
    CHECK_FALSE(d.finite);
    IntegralVerdict e = improper_integral([](double x) { return std::pow(x, -1.01); }, 1.0, INFINITY);
    CHECK(e.finite);
    CHECK(e.value == doctest::Approx(100.0).epsilon(1e-8));
    IntegralVerdict f = improper_integral([](double x) { return 1.0 / (x * x); }, 1.0, INFINITY, {},
                                          EndpointSpec{true, Finiteness::Infinite});
    CHECK_FALSE(f.finite);
    CHECK(f.method == Method::Override);
    // An override claiming finiteness cannot conjure a value for a divergent tail.
    CHECK_THROWS_AS(improper_integral([](double x) { return 1.0 / x; }, 1.0, INFINITY, {},
                                      EndpointSpec{true, Finiteness::Finite}),
                    QuadratureFailure);
}

TEST_CASE("refusal band for logarithmic borderline tails") {
    auto sing = EndpointSpec{true, std::nullopt};
    // 1/(x |log x|) diverges only logarithmically.
    CHECK_THROWS_AS(improper_integral([](double x) { return 1.0 / (x * std::fabs(std::log(x))); }, 0.0, 0.5, sing, {}),
                    InconclusiveTail);
    // 1/x with an analytic correction is still read as 1/x.
    IntegralVerdict g = improper_integral([](double x) { return std::exp(2 * std::sqrt(x)) / x; }, 0.0, 1.0, sing, {});
    CHECK_FALSE(g.finite);
}

TEST_CASE("one-sided limits") {
    CHECK(*one_sided_limit([](double x) { return std::exp(-2 * std::sqrt(x)); }, 0.0, Side::Right, 1.0) == 1.0);
    CHECK(*one_sided_limit([](double x) { return 1.0 / x; }, 0.0, Side::Right, 1.0) == INFINITY);
    CHECK(*one_sided_limit([](double x) { return 1.0 + 1.0 / x; }, INFINITY, Side::Left, 1.0) ==
          doctest::Approx(1.0));
    CHECK(*one_sided_limit([](double x) { return x / (1 + x); }, INFINITY, Side::Left, 1.0) == doctest::Approx(1.0));
}
