#include <cmath>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "sepdiff/errors.hpp"

using namespace sepdiff;

TEST_CASE("validate_spec") {
    CHECK(validate_spec(fx::bm()).empty());
    CHECK(validate_spec(fx::sticky(0.5)).empty());
    CHECK(validate_spec(fx::bessel(1.0)).empty());
    CHECK(validate_spec(fx::bessel(3.0)).empty());
    CHECK(validate_spec(fx::exp_sqrt(INFINITY)).empty());
    CHECK(validate_spec(fx::reflected_drift(1.0)).empty());
    CHECK(validate_spec(fx::gbm()).empty());
    CHECK(validate_spec(fx::bm_drift(1.0)).empty());

    // Entrance boundary declared closed.
    auto closed_entrance = fx::bessel(3.0);
    closed_entrance.space.l_closed = true;
    auto v = validate_spec(closed_entrance);
    REQUIRE(v.size() == 1);
    CHECK(v[0].kind == "AccessibilityMismatch");
    CHECK(v[0].location == "l");

    auto negative = fx::make({0, 2, true, true}, fx::one("1"), 0, 0, fx::one("x - 1"));
    v = validate_spec(negative);
    REQUIRE(!v.empty());
    CHECK(v[0].kind == "NegativeDensity");

    auto open_regular = fx::bessel(1.0);
    open_regular.space.l_closed = false;
    v = validate_spec(open_regular);
    REQUIRE(v.size() == 1);
    CHECK(v[0].kind == "AccessibilityMismatch");

    auto atom_open = fx::bm();
    atom_open.speed.atoms.push_back({0.0, INFINITY});
    v = validate_spec(atom_open);
    REQUIRE(v.size() == 1);
    CHECK(v[0].kind == "InfiniteInteriorAtom");
}

TEST_CASE("exit boundary needs absorption") {
    // s' = 1, m = x^-1.5 near 0: u finite, v infinite.
    auto exit_spec = fx::make({0, INFINITY, true, false}, fx::one("1"), 1, 0, fx::one("x^(-1.5)"));
    auto rep = classify_boundary(exit_spec, Boundary::L);
    CHECK(rep.kind == BoundaryKind::Exit);
    auto v = validate_spec(exit_spec);
    REQUIRE(v.size() == 1);
    CHECK(v[0].kind == "ExitBoundaryNotAbsorbing");
    exit_spec.speed.atoms.push_back({0.0, INFINITY});
    CHECK(validate_spec(exit_spec).empty());
}

TEST_CASE("scale and speed") {
    CHECK(scale_at(fx::bm(), 3.0) == doctest::Approx(3.0));
    CHECK(scale_at(fx::bm(), INFINITY) == INFINITY);
    CHECK(scale_at(fx::bm(), -INFINITY) == -INFINITY);
    CHECK(scale_at(fx::gbm(), INFINITY) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(scale_at(fx::gbm(), 0.0) == -INFINITY);
    double s_inf = scale_at(fx::exp_sqrt(INFINITY), INFINITY);
    CHECK(std::isfinite(s_inf));
    CHECK(s_inf == doctest::Approx(0.5).epsilon(1e-9));

    auto v = speed_of(fx::bm(), 0, 2, false, true);
    CHECK(v.finite);
    CHECK(v.value == doctest::Approx(2.0));
    v = speed_of(fx::sticky(0.5), -1, 1, true, true);
    CHECK(v.value == doctest::Approx(2.5));
    v = speed_of(fx::bessel(3.0), 0, 1, false, true);
    CHECK(v.finite);
    CHECK(v.value == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
    CHECK_FALSE(speed_of(fx::bm_absorbed(), 0, 1, true, true).finite);
    CHECK_FALSE(speed_of(fx::bm(), 0, INFINITY, false, false).finite);
}

TEST_CASE("green kernel, hitting probabilities, exit times") {
    CHECK(green_kernel(fx::bm(), -1, 1, 0, 0.5) == doctest::Approx(0.5));
    CHECK(green_kernel(fx::bm(), -1, 1, -1, 0.5) == 0.0);
    CHECK(hitting_probability(fx::bm(), 0, 0.5, 2) == doctest::Approx(0.25));
    CHECK(hitting_probability(fx::bessel(3.0), 1, 1.5, 2) == doctest::Approx(2.0 / 3.0));
    auto e = expected_exit_time(fx::bm(), -1, 0, 1);
    CHECK(e.value == doctest::Approx(1.0).epsilon(1e-10));
    e = expected_exit_time(fx::sticky(0.5), -1, 0, 1);
    CHECK(e.value == doctest::Approx(1.5).epsilon(1e-10));
    e = expected_exit_time(fx::bm(), -1, 0.3, 1);
    CHECK(e.value == doctest::Approx(0.7 * 1.3).epsilon(1e-10));
    CHECK(expected_exit_time(fx::bm(), -1, -1 + 1e-9, 1).value < 1e-8);
    // Exit from an interval ending at a regular boundary.
    e = expected_exit_time(fx::bessel(1.0), 0, 0.5, 1);
    CHECK(e.value == doctest::Approx(0.25).epsilon(1e-9));
}

TEST_CASE("u/v values and boundary kinds") {
    auto bm_r = classify_boundary(fx::bm(), Boundary::R);
    CHECK(bm_r.kind == BoundaryKind::Natural);
    CHECK_FALSE(bm_r.accessible);
    CHECK(bm_r.behavior == BoundaryBehavior::NotApplicable);
    CHECK(classify_boundary(fx::bm(), Boundary::L).kind == BoundaryKind::Natural);

    auto st = classify_boundary(fx::sticky(0.5), Boundary::L);
    CHECK(st.behavior == BoundaryBehavior::NotApplicable);

    for (double g : {0.5, 1.0, 1.5}) {
        auto rep = classify_boundary(fx::bessel(g), Boundary::L);
        CHECK(rep.kind == BoundaryKind::Regular);
        CHECK(rep.accessible);
        CHECK(rep.cross_checked);
        CHECK(rep.behavior == BoundaryBehavior::InstantaneouslyReflecting);
        CHECK_FALSE(classify_boundary(fx::bessel(g), Boundary::R).accessible);
    }
    for (double g : {2.0, 3.0}) {
        auto rep = classify_boundary(fx::bessel(g), Boundary::L);
        CHECK_FALSE(rep.accessible);
        CHECK(rep.kind == BoundaryKind::Entrance);
    }
    auto ex = classify_boundary(fx::exp_sqrt(INFINITY), Boundary::L);
    CHECK(ex.kind == BoundaryKind::Regular);
    CHECK(ex.behavior == BoundaryBehavior::Absorbing);
    CHECK(classify_boundary(fx::exp_sqrt(1.0), Boundary::L).behavior == BoundaryBehavior::SlowlyReflecting);
    CHECK_FALSE(classify_boundary(fx::exp_sqrt(INFINITY), Boundary::R).accessible);

    // BM on [0,1]: u(0) = v(0) = 1/8 with c = 1/2.
    auto uv = uv_values(fx::reflected_bm(), Boundary::L);
    CHECK(uv.u.value == doctest::Approx(0.125));
    CHECK(uv.v.value == doctest::Approx(0.125));

    auto gbm_l = classify_boundary(fx::gbm(), Boundary::L);
    CHECK(gbm_l.scale_limit == -INFINITY);
    CHECK_FALSE(gbm_l.accessible);
}

TEST_CASE("overrides are honoured") {
    auto spec = fx::bm();
    spec.speed.overrides.push_back({Boundary::R, OverrideQuantity::U, Finiteness::Infinite});
    auto uv = uv_values(spec, Boundary::R);
    CHECK(uv.u.method == Method::Override);
}

TEST_CASE("property: hitting probability complement and kernel symmetry") {
    std::mt19937_64 rng(11);
    std::vector<DiffusionSpec> specs{fx::bm(), fx::sticky(0.5), fx::bessel(3.0), fx::reflected_drift(1.0),
                                     fx::skew(0.3)};
    int cases = 0;
    for (int i = 0; i < 240; ++i) {
        const auto& spec = specs[i % specs.size()];
        double lo = std::isfinite(spec.space.l) ? spec.space.l + 0.01 : -3.0;
        double hi = std::isfinite(spec.space.r) ? spec.space.r - 0.01 : 3.0;
        std::uniform_real_distribution<double> U(lo, hi);
        double p[4] = {U(rng), U(rng), U(rng), U(rng)};
        std::sort(p, p + 4);
        double a = p[0], x = p[1], y = p[2], b = p[3];
        if (!(a < x && x < b)) continue;
        double h = hitting_probability(spec, a, x, b);
        double down = scale_increment(spec, x, b) / scale_increment(spec, a, b);
        CHECK(h > 0.0);
        CHECK(h < 1.0);
        CHECK(h + down == doctest::Approx(1.0).epsilon(1e-12));
        double g1 = green_kernel(spec, a, b, x, y), g2 = green_kernel(spec, a, b, y, x);
        CHECK(g1 >= 0.0);
        CHECK(g1 == doctest::Approx(g2).epsilon(1e-12));
        CHECK(green_kernel(spec, a, b, a, y) == 0.0);
        ++cases;
    }
    CHECK(cases >= 200);
}

TEST_CASE("affine gauge leaves kinds, hitting probabilities and exit times unchanged") {
    for (auto spec : {fx::sticky(0.5), fx::bessel(1.0), fx::reflected_drift(1.0)}) {
        auto g = spec;
        double k = 2.5;
        for (auto& p : g.scale.density.pieces) p = Expr::constant(k) * p;
        g.scale.anchor_value = k * spec.scale.anchor_value + 3.0;
        for (auto& p : g.speed.density.pieces) p = p / Expr::constant(k);
        for (auto& a : g.speed.atoms) a.mass /= k;
        for (Boundary b : {Boundary::L, Boundary::R})
            CHECK(classify_boundary(spec, b).kind == classify_boundary(g, b).kind);
        double a = std::isfinite(spec.space.l) ? spec.space.l + 0.1 : -1.0;
        double b = std::isfinite(spec.space.r) ? std::min(spec.space.r - 0.1, 2.0) : 1.0;
        double x = 0.5 * (a + b) + 0.05;
        CHECK(hitting_probability(spec, a, x, b) == doctest::Approx(hitting_probability(g, a, x, b)).epsilon(1e-10));
        CHECK(expected_exit_time(spec, a, x, b).value ==
              doctest::Approx(expected_exit_time(g, a, x, b).value).epsilon(1e-9));
    }
}
