#include <chrono>
#include <cmath>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "sepdiff/simulator.hpp"

using namespace sepdiff;

namespace {

bool close(double a, double b) { return std::fabs(a - b) <= std::max(1e-9, 1e-8 * std::fabs(b)); }

GridChain bm_chain(int cells) { return build_chain(fx::bm(), cells, Refinement::UniformX, {-1.0, 1.0}); }

}  // namespace

TEST_CASE("chain construction") {
    SUBCASE("Brownian motion, uniform grid") {
        GridChain c = bm_chain(200);
        REQUIRE(c.size() == 201);
        double h = 0.01;
        for (std::size_t i = 1; i < c.last(); ++i) {
            CHECK(c.p_up[i] == doctest::Approx(0.5).epsilon(1e-12));
            CHECK(c.mean_hold[i] == doctest::Approx(h * h).epsilon(1e-9));
        }
        CHECK(c.lower == EndMode::Absorb);
        CHECK(c.truncated_lower);
        CHECK(c.truncated_upper);
        CHECK(c.mean_hold[0] == 0.0);
    }
    SUBCASE("sticky point") {
        double gamma = 0.5;
        GridChain c = build_chain(fx::sticky(gamma), 200, Refinement::UniformX, {-1.0, 1.0});
        std::size_t k = c.nearest(0.0);
        REQUIRE(c.grid[k] == 0.0);
        double h = 0.01;
        CHECK(c.mean_hold[k] == doctest::Approx(h * h + h * gamma).epsilon(1e-9));
        CHECK(c.atom_hold[k] == doctest::Approx(h * gamma).epsilon(1e-9));
    }
    SUBCASE("sticky reflecting end") {
        double gamma = 0.3;
        GridChain c = build_chain(fx::bm_half_line(gamma), 100, Refinement::UniformX, {std::nullopt, 1.0});
        CHECK(c.lower == EndMode::Reflect);
        CHECK_FALSE(c.truncated_lower);
        double h = 0.01;
        CHECK(c.p_up[0] == 1.0);
        CHECK(c.mean_hold[0] == doctest::Approx(h * h + 2 * h * gamma).epsilon(1e-9));
    }
    SUBCASE("absorbing and reflecting ends from the boundary behaviour") {
        GridChain c = build_chain(fx::bm_absorbed(), 20, Refinement::UniformX, {std::nullopt, 2.0});
        CHECK(c.lower == EndMode::Absorb);
        CHECK_FALSE(c.truncated_lower);
        c = build_chain(fx::reflected_drift(1.0), 20);
        CHECK(c.lower == EndMode::Reflect);
        CHECK(c.upper == EndMode::Reflect);
        CHECK(c.p_up[c.last()] == 0.0);
    }
    SUBCASE("truncation is required for infinite or inaccessible ends") {
        CHECK_THROWS_AS(build_chain(fx::bm(), 20), UnboundedDomainWithoutTruncation);
        CHECK_THROWS_AS(build_chain(fx::bm(), 20, Refinement::UniformX, {-1.0, std::nullopt}),
                        UnboundedDomainWithoutTruncation);
        CHECK_THROWS_AS(build_chain(fx::bessel(3), 20, Refinement::UniformX, {std::nullopt, 2.0}),
                        UnboundedDomainWithoutTruncation);
        CHECK_THROWS_AS(build_chain(fx::bm(), 3, Refinement::UniformX, {-1.0, 1.0}), SpecError);
    }
    SUBCASE("entrance boundary truncated with inward redirection") {
        GridChain c = build_chain(fx::bessel(3), 20, Refinement::UniformX, {0.5, 2.0});
        CHECK(c.lower == EndMode::Reflect);
        CHECK(c.truncated_lower);
        CHECK(c.upper == EndMode::Absorb);
        CHECK(c.notes.size() >= 2);
    }
    SUBCASE("critical points are grid nodes") {
        GridChain c = build_chain(fx::sticky(1.0), 7, Refinement::UniformX, {-1.0, 1.0});
        CHECK(c.grid[c.nearest(0.0)] == 0.0);
        auto sk = fx::skew(0.3);
        c = build_chain(sk, 9, Refinement::UniformX, {-1.0, 2.0});
        CHECK(c.grid[c.nearest(0.0)] == 0.0);
    }
    SUBCASE("uniform-scale grid gives symmetric steps") {
        GridChain c = build_chain(fx::reflected_drift(1.0), 40, Refinement::UniformScale);
        for (std::size_t i = 1; i < c.last(); ++i) CHECK(c.p_up[i] == doctest::Approx(0.5).epsilon(1e-9));
        for (std::size_t i = 1; i < c.size(); ++i) CHECK(c.grid[i] > c.grid[i - 1]);
    }
}

TEST_CASE("chain exit times") {
    GridChain c = bm_chain(200);
    CHECK(chain_exit_time(c, 0, 100, 200) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(chain_exit_time(c, 0, 0, 200) == 0.0);
    CHECK(chain_exit_time(c, 10, 200, 200) == 0.0);

    GridChain s = build_chain(fx::sticky(0.5), 200, Refinement::UniformX, {-1.0, 1.0});
    CHECK(std::fabs(chain_exit_time(s, 0, s.nearest(0.0), s.last()) - 1.5) < 1e-10);
}

TEST_CASE("chain exit times equal the diffusion's at grid resolution") {
    auto start = std::chrono::steady_clock::now();
    struct Case {
        DiffusionSpec spec;
        Truncation t;
    };
    std::vector<Case> cases{{fx::bm(), {-1.0, 1.0}},
                            {fx::sticky(0.5), {-1.0, 1.0}},
                            {fx::bessel(3), {0.5, 2.0}},
                            {fx::reflected_drift(1.0), {}}};
    for (const auto& cs : cases) {
        CAPTURE(cs.spec.label);
        GridChain c = build_chain(cs.spec, 200, Refinement::UniformX, cs.t);
        std::size_t n = c.last();
        std::vector<std::array<std::size_t, 3>> triples{{0, n / 2, n}, {0, 1, n}, {0, n - 1, n}, {n / 5, n / 3, n - 7},
                                                        {3, 4, 5}};
        for (auto [a, x, b] : triples) {
            CAPTURE(a);
            CAPTURE(x);
            CAPTURE(b);
            double chain = chain_exit_time(c, a, x, b);
            double exact = expected_exit_time(cs.spec, c.grid[a], c.grid[x], c.grid[b]).value;
            CHECK(close(chain, exact));
        }
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    CHECK(secs < 5.0);
}

TEST_CASE("property: embedded chain hitting probabilities match the scale") {
    std::mt19937_64 rng(11);
    std::vector<GridChain> chains{build_chain(fx::reflected_drift(1.0), 60),
                                  build_chain(fx::skew(0.3), 40, Refinement::UniformX, {-1.0, 1.0}),
                                  build_chain(fx::bessel(3), 50, Refinement::UniformX, {0.5, 3.0}),
                                  build_chain(fx::gbm(), 50, Refinement::UniformScale, {0.5, 4.0})};
    int cases = 0;
    for (int k = 0; k < 240; ++k) {
        const GridChain& c = chains[k % chains.size()];
        std::uniform_int_distribution<std::size_t> pick(0, c.last());
        std::size_t a = pick(rng), x = pick(rng), b = pick(rng);
        if (a > b) std::swap(a, b);
        if (!(a < x && x < b)) {
            x = a + 1;
            b = std::max(b, a + 2);
            if (b > c.last()) continue;
        }
        double up = chain_hitting_probability(c, a, x, b);
        double exact = hitting_probability(c.spec, c.grid[a], c.grid[x], c.grid[b]);
        CHECK(up == doctest::Approx(exact).epsilon(1e-10));
        CHECK(exact + hitting_probability(c.spec, c.grid[b], c.grid[x], c.grid[a]) == doctest::Approx(1.0).epsilon(1e-12));
        ++cases;
    }
    CHECK(cases >= 200);
}

TEST_CASE("sample paths") {
    GridChain c = bm_chain(20);
    StopRule both{std::nullopt, {0, c.last()}};
    PathSample p = sample_path(c, 10, both, 42);
    CHECK(p.termination == Termination::Absorbed);
    CHECK((p.final_state == -1.0 || p.final_state == 1.0));
    CHECK_FALSE(p.events.empty());
    for (const auto& e : p.events) CHECK(e.holding > 0);

    PathSample q = sample_path(c, 10, both, 42);
    REQUIRE(q.events.size() == p.events.size());
    for (std::size_t i = 0; i < p.events.size(); ++i) {
        CHECK(q.events[i].state == p.events[i].state);
        CHECK(q.events[i].holding == p.events[i].holding);
    }
    PathSample other = sample_path(c, 10, both, 42, 1);
    bool differs = other.events.size() != p.events.size();
    for (std::size_t i = 0; !differs && i < p.events.size(); ++i) differs = other.events[i].holding != p.events[i].holding;
    CHECK(differs);

    PathSample dead = sample_path(c, 0, both, 1);
    CHECK(dead.events.empty());
    CHECK(dead.termination == Termination::Absorbed);

    PathSample hit = sample_path(c, 10, StopRule{std::nullopt, {12}}, 3);
    CHECK((hit.termination == Termination::TargetHit || hit.termination == Termination::Absorbed));

    GridChain r = build_chain(fx::reflected_drift(1.0), 20);
    PathSample h = sample_path(r, 0, StopRule{0.5, {}}, 9);
    CHECK(h.termination == Termination::Horizon);
    double total = 0.0;
    for (const auto& e : h.events) total += e.holding;
    CHECK(total == doctest::Approx(0.5).epsilon(1e-12));
    for (std::size_t i = 1; i < h.events.size(); ++i)
        CHECK(std::fabs(r.nearest(h.events[i].state) - static_cast<double>(r.nearest(h.events[i - 1].state))) == 1.0);
    CHECK_THROWS_AS(sample_path(r, 0, StopRule{}, 1), SpecError);
}

TEST_CASE("estimates are independent of the worker count") {
    GridChain c = bm_chain(20);
    Statistic s = ExitTime{0, c.last()};
    auto one = estimate(c, 7, s, 3000, 5, 1);
    auto four = estimate(c, 7, s, 3000, 5, 4);
    CHECK(one.value == four.value);
    CHECK(one.std_error == four.std_error);
    CHECK(one.n_paths == 3000);
}

TEST_CASE("standard error halves when the path count quadruples") {
    GridChain c = bm_chain(20);
    auto small = estimate(c, 10, HitBefore{c.last(), 0}, 4000, 1);
    auto large = estimate(c, 10, HitBefore{c.last(), 0}, 16000, 2);
    double ratio = large.std_error / small.std_error;
    CHECK(ratio > 0.4);
    CHECK(ratio < 0.6);
}

TEST_CASE("Monte Carlo against analytic values") {
    SUBCASE("hitting probability") {
        GridChain c = build_chain(fx::bm(), 40, Refinement::UniformX, {0.0, 2.0});
        auto e = estimate(c, c.nearest(0.5), HitBefore{c.last(), 0}, 20000, 3);
        CHECK(std::fabs(e.value - 0.25) <= 3 * e.std_error);
        CHECK(e.truncation_leakage == 0.0);
        CHECK(e.truncated);
    }
    SUBCASE("sticky occupation at a reflecting end") {
        GridChain c = build_chain(fx::bm_half_line(0.5), 20, Refinement::UniformX, {std::nullopt, 1.0});
        auto e = estimate(c, 0, Occupation{0.0, 0.0, StopRule{std::nullopt, {c.last()}}}, 20000, 4);
        CHECK(std::fabs(e.value - 1.0) <= 3 * e.std_error);
    }
    SUBCASE("ergodic average with reflection at both ends") {
        GridChain c = build_chain(fx::reflected_drift(1.0), 10);
        auto e = estimate(c, 0, ErgodicAverage{[](double x) { return x; }, 1.0, "x"}, 20000, 5);
        double e2 = std::exp(2.0);
        double oracle = (e2 / 4 + 0.25) / ((e2 - 1) / 2);
        CHECK(std::fabs(e.value - oracle) <= 3 * e.std_error);
    }
    SUBCASE("ergodic average needs recurrence") {
        GridChain c = bm_chain(20);
        CHECK_THROWS_AS(estimate(c, 5, ErgodicAverage{[](double x) { return x; }}, 10, 1), NotRecurrent);
    }
    SUBCASE("truncation leakage is reported for horizon statistics") {
        GridChain c = bm_chain(20);
        auto e = estimate(c, 10, Occupation{0.0, 1.0, StopRule{1.0, {}}, true}, 2000, 6);
        CHECK(e.truncation_leakage > 0.9);
        CHECK(e.value > 0.0);
        CHECK(e.value < 1.0);
    }
}

TEST_CASE("validation suite") {
    ValidationConfig cfg;
    cfg.n_cells = 40;
    cfg.n_paths = 20000;
    cfg.seed = 7;
    auto bm = validate_against_analytic(fx::bm(), cfg);
    CHECK(bm.pass);
    CHECK(bm.checks.size() == 3);
    CHECK(bm.lo == -1.0);
    CHECK(bm.hi == 1.0);

    auto sticky = validate_against_analytic(fx::sticky(0.5), cfg);
    CHECK(sticky.pass);
    REQUIRE(sticky.checks.size() == 3);
    CHECK(sticky.checks[2].oracle == doctest::Approx(0.5).epsilon(1e-9));

    auto half = validate_against_analytic(fx::bm_half_line(0.5), cfg);
    CHECK(half.pass);
    CHECK(half.checks[2].oracle == doctest::Approx(2.0).epsilon(1e-9));

    auto refl = validate_against_analytic(fx::reflected_drift(1.0), cfg);
    CHECK(refl.pass);
    CHECK(refl.checks.size() == 4);

    cfg.p_up_bias = 0.05;
    auto bad = validate_against_analytic(fx::bm(), cfg);
    CHECK_FALSE(bad.pass);
    CHECK(std::fabs(bad.checks[0].z) > 4);
}
