#include "sepdiff/simulator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <random>
#include <sstream>
#include <thread>
#include <type_traits>

#include "model_internal.hpp"
#include "sepdiff/quadrature.hpp"

namespace sepdiff {

using namespace detail;

std::string to_string(Refinement r) { return r == Refinement::UniformX ? "uniform-x" : "uniform-scale"; }
std::string to_string(EndMode m) { return m == EndMode::Absorb ? "absorb" : "reflect"; }

std::string to_string(Termination t) {
    switch (t) {
        case Termination::Horizon:
            return "horizon";
        case Termination::Absorbed:
            return "absorbed";
        case Termination::TargetHit:
            return "target-hit";
    }
    return "";
}

std::size_t GridChain::nearest(double x) const {
    auto it = std::lower_bound(grid.begin(), grid.end(), x);
    if (it == grid.begin()) return 0;
    if (it == grid.end()) return last();
    std::size_t k = static_cast<std::size_t>(it - grid.begin());
    return x - grid[k - 1] <= grid[k] - x ? k - 1 : k;
}

namespace {

std::string num(double x) {
    std::ostringstream os;
    os.precision(12);
    os << x;
    return os.str();
}

struct End {
    double point;
    EndMode mode;
    bool truncated;
};

End chain_end(const DiffusionSpec& spec, Boundary b, std::optional<double> level, std::vector<std::string>& notes) {
    double e = spec.endpoint(b);
    bool lower = b == Boundary::L;
    if (level && *level != e) {
        double x = *level;
        if (!(x > spec.space.l && x < spec.space.r))
            throw SpecError("truncation level " + num(x) + " is outside the open state space");
        End out{x, EndMode::Absorb, true};
        if (std::isfinite(e)) {
            BoundaryReport rep = classify_boundary(spec, b);
            if (rep.kind == BoundaryKind::Entrance) {
                out.mode = EndMode::Reflect;
                notes.push_back("entrance boundary at " + num(e) + ": outward step redirected inward at " + num(x));
            }
        }
        notes.push_back(std::string(lower ? "lower" : "upper") + " end truncated at " + num(x));
        return out;
    }
    if (!std::isfinite(e))
        throw UnboundedDomainWithoutTruncation(std::string(lower ? "lower" : "upper") +
                                               " end is infinite; a truncation level is required");
    BoundaryReport rep = classify_boundary(spec, b);
    if (!rep.accessible)
        throw UnboundedDomainWithoutTruncation("boundary " + num(e) + " is inaccessible; a truncation level is required");
    bool reflect = spec.closed(b) && rep.behavior != BoundaryBehavior::Absorbing && std::isfinite(spec.atom_mass(e));
    return {e, reflect ? EndMode::Reflect : EndMode::Absorb, false};
}

// Point y in [lo, hi] with s(y) - s(lo) = target, by bisection.
double invert_scale(Cumulative& from_lo, double lo, double hi, double target) {
    double a = lo, b = hi;
    for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, std::fabs(a)); ++it) {
        double m = 0.5 * (a + b);
        if (from_lo(m) < target)
            a = m;
        else
            b = m;
    }
    return 0.5 * (a + b);
}

std::vector<double> place_nodes(const DiffusionSpec& spec, double lo, double hi, int n, Refinement refinement) {
    std::vector<double> pts(n + 1);
    if (refinement == Refinement::UniformX) {
        for (int k = 0; k <= n; ++k) pts[k] = lo + (hi - lo) * k / n;
    } else {
        Cumulative from_lo(spec, spec.scale.density, lo);
        double total = scale_increment(spec, lo, hi);
        pts[0] = lo;
        for (int k = 1; k < n; ++k) pts[k] = invert_scale(from_lo, lo, hi, total * k / n);
        pts[n] = hi;
    }
    pts[0] = lo;
    pts[n] = hi;

    // Move the closest free node onto each critical point, or insert it.
    std::vector<char> fixed(pts.size(), 0);
    fixed.front() = fixed.back() = 1;
    std::vector<double> extra;
    for (double c : spec.critical_points()) {
        if (!(c > lo && c < hi)) continue;
        auto it = std::lower_bound(pts.begin(), pts.end(), c);
        std::size_t k = static_cast<std::size_t>(it - pts.begin());
        std::size_t best = (k > 0 && (k == pts.size() || c - pts[k - 1] <= pts[k] - c)) ? k - 1 : k;
        if (!fixed[best]) {
            pts[best] = c;
            fixed[best] = 1;
        } else if (pts[best] != c) {
            extra.push_back(c);
        }
    }
    pts.insert(pts.end(), extra.begin(), extra.end());
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

Cumulative scale_from(const DiffusionSpec& spec, double origin) {
    return Cumulative(spec, spec.scale.density, origin, spec.override_for(Boundary::L, OverrideQuantity::Scale),
                      spec.override_for(Boundary::R, OverrideQuantity::Scale));
}

// int_u^v w(y) m(dy) over the density part, u < v.
double speed_integral(const DiffusionSpec& spec, const Weight& w, double u, double v) {
    IntegralVerdict r = integrate_piecewise(spec.speed.density, w, u, v, EndpointSpec{is_boundary(spec, u), std::nullopt},
                                            EndpointSpec{is_boundary(spec, v), std::nullopt});
    if (!r.finite) throw InternalInconsistency("speed integral over a grid cell diverged");
    return r.value;
}

class Rng {
public:
    Rng(std::uint64_t seed, std::uint64_t stream) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
        gen_.seed(seq);
    }
    // Uniform on the open interval (0, 1).
    double uniform() { return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53; }
    double exponential() { return -std::log(uniform()); }

private:
    std::mt19937_64 gen_;
};

// Runs the chain until it is absorbed, reaches a node flagged in stop, or
// the horizon passes. on_hold(node, duration) sees every holding period.
template <class OnHold>
Termination walk(const GridChain& c, std::size_t i, const std::vector<char>& stop, double horizon, Rng& rng,
                 OnHold&& on_hold, std::size_t& at) {
    double t = 0.0;
    for (;;) {
        if (c.absorbing(i)) {
            at = i;
            return Termination::Absorbed;
        }
        if (stop[i]) {
            at = i;
            return Termination::TargetHit;
        }
        double d = c.mean_hold[i] * rng.exponential();
        if (t + d >= horizon) {
            if (horizon > t) on_hold(i, horizon - t);
            at = i;
            return Termination::Horizon;
        }
        on_hold(i, d);
        t += d;
        i = rng.uniform() < c.p_up[i] ? i + 1 : i - 1;
    }
}

std::vector<char> mask_of(const GridChain& c, const std::vector<std::size_t>& nodes) {
    std::vector<char> m(c.size(), 0);
    for (std::size_t k : nodes) {
        if (k >= c.size()) throw SpecError("node index out of range");
        m[k] = 1;
    }
    return m;
}

void check_node(const GridChain& c, std::size_t k) {
    if (k >= c.size()) throw SpecError("node index out of range");
}

using PathResult = std::array<double, 2>;

// Evaluates fn(k, rng) for paths k = 0..n-1, each with its own stream, and
// returns the results in path order.
template <class Fn>
auto run_paths(std::size_t n, std::uint64_t seed, unsigned threads, const Fn& fn) {
    std::vector<std::invoke_result_t<const Fn&, std::size_t, Rng&>> out(n);
    unsigned w = std::max(1u, std::min<unsigned>(worker_count(threads), static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    auto block = [&](std::size_t from, std::size_t to) {
        for (std::size_t k = from; k < to; ++k) {
            Rng rng(seed, k);
            out[k] = fn(k, rng);
        }
    };
    if (w == 1) {
        block(0, n);
        return out;
    }
    std::vector<std::thread> pool;
    std::size_t per = (n + w - 1) / w;
    for (unsigned t = 0; t < w; ++t) {
        std::size_t from = std::min(n, t * per), to = std::min(n, from + per);
        pool.emplace_back(block, from, to);
    }
    for (auto& th : pool) th.join();
    return out;
}

MonteCarloEstimate mean_of(const std::vector<PathResult>& r) {
    MonteCarloEstimate e;
    e.n_paths = r.size();
    double mean = 0.0, m2 = 0.0;
    std::size_t k = 0;
    for (const auto& p : r) {
        ++k;
        double d = p[0] - mean;
        mean += d / static_cast<double>(k);
        m2 += d * (p[0] - mean);
    }
    e.value = mean;
    e.std_error = k > 1 ? std::sqrt(m2 / static_cast<double>(k - 1) / static_cast<double>(k)) : INFINITY;
    return e;
}

// Ratio of means sum(a) / sum(b) with a delta-method standard error.
MonteCarloEstimate ratio_of(const std::vector<PathResult>& r) {
    MonteCarloEstimate e;
    e.n_paths = r.size();
    double sa = 0.0, sb = 0.0;
    for (const auto& p : r) {
        sa += p[0];
        sb += p[1];
    }
    double ratio = sa / sb;
    double n = static_cast<double>(r.size());
    double ss = 0.0;
    for (const auto& p : r) {
        double d = p[0] - ratio * p[1];
        ss += d * d;
    }
    e.value = ratio;
    e.std_error = r.size() > 1 ? std::sqrt(ss / (n - 1) / n) / (sb / n) : INFINITY;
    return e;
}

// Harmonic function of the embedded chain with value 1 on `one`, 0 on `zero`.
std::vector<double> harmonic(const GridChain& c, const std::vector<char>& one, const std::vector<char>& zero) {
    std::size_t n = c.size();
    std::vector<double> sub(n, 0.0), diag(n, 1.0), sup(n, 0.0), rhs(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (one[i] || zero[i] || c.absorbing(i)) {
            rhs[i] = one[i] ? 1.0 : 0.0;
            continue;
        }
        if (i > 0) sub[i] = -(1.0 - c.p_up[i]);
        if (i + 1 < n) sup[i] = -c.p_up[i];
    }
    return solve_tridiagonal(sub, diag, sup, rhs);
}

double leakage(const GridChain& c, std::size_t start, const std::vector<char>& stop) {
    if (!c.truncated_lower && !c.truncated_upper) return 0.0;
    std::vector<char> one(c.size(), 0);
    if (c.truncated_lower && !stop[0]) one[0] = 1;
    if (c.truncated_upper && !stop[c.last()]) one[c.last()] = 1;
    if (std::none_of(one.begin(), one.end(), [](char v) { return v != 0; })) return 0.0;
    return std::clamp(harmonic(c, one, stop)[start], 0.0, 1.0);
}

std::vector<double> cell_means(const GridChain& c, const std::function<double(double)>& g, double lo, double hi) {
    std::vector<double> out(c.size(), 0.0);
    for (std::size_t i = 0; i < c.size(); ++i)
        if (!c.absorbing(i)) out[i] = cell_integral(c, i, g, lo, hi) / c.mean_hold[i];
    return out;
}

double one(double) { return 1.0; }

}  // namespace

GridChain build_chain(const DiffusionSpec& spec, int n_cells, Refinement refinement, const Truncation& truncation) {
    if (n_cells < 4) throw SpecError("a chain needs at least 4 cells");
    GridChain c;
    c.spec = spec;
    End lo = chain_end(spec, Boundary::L, truncation.lo, c.notes);
    End hi = chain_end(spec, Boundary::R, truncation.hi, c.notes);
    if (!(lo.point < hi.point)) throw SpecError("chain ends must satisfy lo < hi");
    c.lower = lo.mode;
    c.upper = hi.mode;
    c.truncated_lower = lo.truncated;
    c.truncated_upper = hi.truncated;
    c.grid = place_nodes(spec, lo.point, hi.point, n_cells, refinement);

    std::size_t n = c.grid.size();
    c.ds.resize(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        c.ds[i] = scale_increment(spec, c.grid[i], c.grid[i + 1]);
        if (!(c.ds[i] > 0 && std::isfinite(c.ds[i]))) throw InternalInconsistency("scale increment on a cell is not positive");
    }
    c.scale.resize(n);
    c.scale[0] = scale_at(spec, c.grid[0]);
    for (std::size_t i = 1; i < n; ++i) c.scale[i] = c.scale[i - 1] + c.ds[i - 1];

    c.p_up.assign(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) c.p_up[i] = c.ds[i - 1] / (c.ds[i - 1] + c.ds[i]);
    c.p_up[0] = c.lower == EndMode::Reflect ? 1.0 : 0.0;
    c.p_up[n - 1] = 0.0;

    c.mean_hold.assign(n, 0.0);
    c.atom_hold.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (c.absorbing(i)) continue;
        c.mean_hold[i] = cell_integral(c, i, one);
        double x = c.grid[i];
        c.atom_hold[i] = cell_integral(c, i, one, x, x);
        if (!(c.mean_hold[i] > 0)) throw InternalInconsistency("mean holding time at " + num(x) + " is not positive");
    }
    return c;
}

GridChain with_p_up_bias(GridChain chain, double delta) {
    for (std::size_t i = 1; i + 1 < chain.size(); ++i) chain.p_up[i] = std::clamp(chain.p_up[i] + delta, 1e-12, 1.0 - 1e-12);
    chain.notes.push_back("p_up shifted by " + num(delta));
    return chain;
}

double cell_integral(const GridChain& c, std::size_t i, const std::function<double(double)>& g, double lo, double hi) {
    check_node(c, i);
    if (c.absorbing(i)) return 0.0;
    const DiffusionSpec& spec = c.spec;
    double x = c.grid[i];
    std::size_t last = c.last();
    bool interior = i > 0 && i < last;

    // Left part (grid[i-1], x) with weight kl * (s(y) - s(grid[i-1])), right
    // part (x, grid[i+1]) with weight kr * (s(grid[i+1]) - s(y)), atom at x
    // with weight katom.
    double kl = 0.0, kr = 0.0, katom = 0.0;
    if (interior) {
        double dl = c.ds[i - 1], dr = c.ds[i];
        kl = 2.0 * dr / (dl + dr);
        kr = 2.0 * dl / (dl + dr);
        katom = 2.0 * dl * dr / (dl + dr);
    } else if (i == 0) {
        kr = 2.0;
        katom = 2.0 * c.ds[0];
    } else {
        kl = 2.0;
        katom = 2.0 * c.ds[last - 1];
    }

    double total = 0.0;
    if (kl > 0) {
        double u = std::max(c.grid[i - 1], lo), v = std::min(x, hi);
        if (u < v) {
            Cumulative from = scale_from(spec, c.grid[i - 1]);
            total += kl * speed_integral(spec, [&](double y) { return from(y) * g(y); }, u, v);
        }
    }
    if (kr > 0) {
        double u = std::max(x, lo), v = std::min(c.grid[i + 1], hi);
        if (u < v) {
            Cumulative from = scale_from(spec, c.grid[i + 1]);
            total += kr * speed_integral(spec, [&](double y) { return -from(y) * g(y); }, u, v);
        }
    }
    double mass = spec.atom_mass(x);
    if (mass > 0 && x >= lo && x <= hi) total += katom * mass * g(x);
    return total;
}

double chain_exit_time(const GridChain& c, std::size_t a, std::size_t x, std::size_t b) {
    check_node(c, b);
    if (!(a < x && x < b)) return 0.0;
    std::size_t m = b - a - 1;
    std::vector<double> sub(m), diag(m, 1.0), sup(m), rhs(m);
    for (std::size_t k = 0; k < m; ++k) {
        std::size_t i = a + 1 + k;
        sub[k] = -(1.0 - c.p_up[i]);
        sup[k] = -c.p_up[i];
        rhs[k] = c.mean_hold[i];
    }
    return solve_tridiagonal(sub, diag, sup, rhs)[x - a - 1];
}

double chain_hitting_probability(const GridChain& c, std::size_t a, std::size_t x, std::size_t b) {
    check_node(c, b);
    if (x <= a) return 0.0;
    if (x >= b) return 1.0;
    std::size_t m = b - a - 1;
    std::vector<double> sub(m), diag(m, 1.0), sup(m), rhs(m, 0.0);
    for (std::size_t k = 0; k < m; ++k) {
        std::size_t i = a + 1 + k;
        sub[k] = -(1.0 - c.p_up[i]);
        sup[k] = -c.p_up[i];
    }
    rhs[m - 1] = c.p_up[b - 1];
    return solve_tridiagonal(sub, diag, sup, rhs)[x - a - 1];
}

PathSample sample_path(const GridChain& c, std::size_t start, const StopRule& stop, std::uint64_t seed,
                       std::uint64_t stream) {
    check_node(c, start);
    if (!stop.horizon && stop.targets.empty() && c.lower == EndMode::Reflect && c.upper == EndMode::Reflect)
        throw SpecError("stop rule never fires on a chain reflecting at both ends");
    PathSample p;
    p.seed = seed;
    p.stream = stream;
    Rng rng(seed, stream);
    std::size_t at = start;
    p.termination = walk(c, start, mask_of(c, stop.targets), stop.horizon.value_or(INFINITY), rng,
                         [&](std::size_t i, double d) { p.events.push_back({c.grid[i], d}); }, at);
    p.final_state = c.grid[at];
    return p;
}

unsigned worker_count(unsigned requested) {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("SEPDIFF_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && v > 0) n = std::min<unsigned>(n, static_cast<unsigned>(v));
    }
    if (requested > 0) n = std::min(n, requested);
    return n;
}

MonteCarloEstimate estimate(const GridChain& c, std::size_t start, const Statistic& statistic, std::size_t n_paths,
                            std::uint64_t seed, unsigned threads) {
    check_node(c, start);
    if (n_paths == 0) throw SpecError("estimate needs at least one path");
    MonteCarloEstimate e;
    std::vector<char> stop;

    if (const auto* s = std::get_if<HitBefore>(&statistic)) {
        stop = mask_of(c, {s->target, s->floor});
        auto r = run_paths(n_paths, seed, threads, [&](std::size_t, Rng& rng) {
            std::size_t at = start;
            walk(c, start, stop, INFINITY, rng, [](std::size_t, double) {}, at);
            return PathResult{at == s->target ? 1.0 : 0.0, 0.0};
        });
        e = mean_of(r);
        e.target = "hit_before(" + num(c.grid[s->target]) + " | floor " + num(c.grid[s->floor]) + ")";
    } else if (const auto* s = std::get_if<ExitTime>(&statistic)) {
        stop = mask_of(c, {s->a, s->b});
        auto r = run_paths(n_paths, seed, threads, [&](std::size_t, Rng& rng) {
            std::size_t at = start;
            double t = 0.0;
            walk(c, start, stop, INFINITY, rng, [&t](std::size_t, double d) { t += d; }, at);
            return PathResult{t, 0.0};
        });
        e = mean_of(r);
        e.target = "exit_time(" + num(c.grid[s->a]) + ", " + num(c.grid[s->b]) + ")";
    } else if (const auto* s = std::get_if<Occupation>(&statistic)) {
        if (s->fraction && !s->stop.horizon) throw SpecError("occupation fraction needs a horizon");
        if (!s->stop.horizon && s->stop.targets.empty() && c.lower == EndMode::Reflect && c.upper == EndMode::Reflect)
            throw SpecError("stop rule never fires on a chain reflecting at both ends");
        stop = mask_of(c, s->stop.targets);
        std::vector<double> share = cell_means(c, one, s->lo, s->hi);
        double horizon = s->stop.horizon.value_or(INFINITY);
        auto r = run_paths(n_paths, seed, threads, [&](std::size_t, Rng& rng) {
            std::size_t at = start;
            double occ = 0.0;
            walk(c, start, stop, horizon, rng, [&](std::size_t i, double d) { occ += d * share[i]; }, at);
            return PathResult{s->fraction ? occ / horizon : occ, 0.0};
        });
        e = mean_of(r);
        e.target = std::string(s->fraction ? "occupation_fraction" : "occupation") + "([" + num(s->lo) + ", " +
                   num(s->hi) + "])";
    } else {
        const auto& erg = std::get<ErgodicAverage>(statistic);
        if (c.lower != EndMode::Reflect || c.upper != EndMode::Reflect)
            throw NotRecurrent("ergodic average needs a chain reflecting at both ends");
        stop.assign(c.size(), 0);
        std::vector<double> fbar = cell_means(c, erg.f, -INFINITY, INFINITY);
        auto r = run_paths(n_paths, seed, threads, [&](std::size_t, Rng& rng) {
            std::size_t i = start;
            double t = 0.0, acc = 0.0;
            for (;;) {
                double d = c.mean_hold[i] * rng.exponential();
                acc += d * fbar[i];
                t += d;
                i = rng.uniform() < c.p_up[i] ? i + 1 : i - 1;
                if (i == start && t >= erg.horizon) break;
            }
            return PathResult{acc, t};
        });
        e = ratio_of(r);
        e.target = "ergodic_average(" + erg.label + ", horizon " + num(erg.horizon) + ")";
    }
    e.truncated = c.truncated_lower || c.truncated_upper;
    e.truncation_leakage = leakage(c, start, stop);
    return e;
}

HorizonSummary simulate_horizon(const GridChain& c, std::size_t start, double horizon, std::size_t n_paths,
                                std::uint64_t seed, unsigned threads) {
    check_node(c, start);
    if (n_paths == 0) throw SpecError("simulation needs at least one path");
    if (!(horizon > 0)) throw SpecError("horizon must be positive");
    std::vector<char> none(c.size(), 0);
    auto r = run_paths(n_paths, seed, threads, [&](std::size_t, Rng& rng) {
        std::size_t at = start;
        Termination t = walk(c, start, none, horizon, rng, [](std::size_t, double) {}, at);
        return std::array<double, 2>{t == Termination::Absorbed ? 1.0 : 0.0, c.grid[at]};
    });
    std::vector<PathResult> absorbed(r.size()), state(r.size());
    for (std::size_t k = 0; k < r.size(); ++k) {
        absorbed[k] = {r[k][0], 0.0};
        state[k] = {r[k][1], 0.0};
    }
    HorizonSummary out{mean_of(absorbed), mean_of(state)};
    out.absorbed.target = "absorbed_by(" + num(horizon) + ")";
    out.terminal_state.target = "state_at(" + num(horizon) + ")";
    for (auto* e : {&out.absorbed, &out.terminal_state}) {
        e->truncated = c.truncated_lower || c.truncated_upper;
        e->truncation_leakage = leakage(c, start, none);
    }
    return out;
}

namespace {

double window_end(const DiffusionSpec& spec, Boundary b, std::optional<double> user) {
    if (user) return *user;
    double e = spec.endpoint(b);
    if (std::isfinite(e) && classify_boundary(spec, b).accessible) return e;
    double c = spec.reference_point();
    if (b == Boundary::L) return std::isfinite(e) ? std::max(c - 1.0, 0.5 * (e + c)) : c - 1.0;
    return std::isfinite(e) ? std::min(c + 1.0, 0.5 * (e + c)) : c + 1.0;
}

ValidationCheck make_check(const std::string& name, const MonteCarloEstimate& e, double oracle, double z_max) {
    double z;
    if (e.std_error > 0)
        z = (e.value - oracle) / e.std_error;
    else
        z = e.value == oracle ? 0.0 : INFINITY;
    return {name, e.target, e.value, e.std_error, oracle, z, std::fabs(z) <= z_max};
}

// int_[u, v] kernel(y) m(dy) for kernel(y) = scale distance from y to the
// point `to`, density part only.
double scale_distance_integral(const DiffusionSpec& spec, double u, double v, double to) {
    Cumulative from = scale_from(spec, to);
    return speed_integral(spec, [&](double y) { return std::fabs(from(y)); }, u, v);
}

}  // namespace

ValidationReport validate_against_analytic(const DiffusionSpec& spec, const ValidationConfig& cfg) {
    ValidationReport rep;
    double lo = window_end(spec, Boundary::L, cfg.window.lo);
    double hi = window_end(spec, Boundary::R, cfg.window.hi);
    Truncation t;
    if (lo != spec.space.l) t.lo = lo;
    if (hi != spec.space.r) t.hi = hi;
    GridChain c = build_chain(spec, cfg.n_cells, cfg.refinement, t);
    if (cfg.p_up_bias != 0.0) c = with_p_up_bias(std::move(c), cfg.p_up_bias);
    rep.notes = c.notes;
    if (t.lo) rep.notes.push_back("window ends at " + num(lo) + " are stopping levels for first-passage checks");
    if (t.hi) rep.notes.push_back("window ends at " + num(hi) + " are stopping levels for first-passage checks");

    std::size_t last = c.last();
    std::size_t x = std::clamp<std::size_t>(c.nearest(cfg.x0.value_or(spec.reference_point())), 1, last - 1);
    rep.lo = c.grid[0];
    rep.hi = c.grid[last];
    rep.x0 = c.grid[x];
    rep.nodes = c.size();
    rep.lower = c.lower;
    rep.upper = c.upper;

    double a = c.grid[0], b = c.grid[last], x0 = c.grid[x];

    // Hitting, exit and (for interior atoms or no atoms) occupation share one
    // set of paths: same start, same stopping nodes.
    std::optional<double> atom_at;
    for (const auto& at : spec.speed.atoms) {
        if (!std::isfinite(at.mass) || at.mass <= 0 || at.location < a || at.location > b) continue;
        std::size_t k = c.nearest(at.location);
        if (c.grid[k] != at.location || c.absorbing(k)) continue;
        if ((k == 0 || k == last) && !(k == 0 ? c.lower == EndMode::Reflect : c.upper == EndMode::Reflect)) continue;
        atom_at = at.location;
        break;
    }
    bool boundary_atom = atom_at && (*atom_at == a || *atom_at == b);
    double occ_lo = atom_at ? *atom_at : x0, occ_hi = atom_at ? *atom_at : b;

    std::vector<char> stop = mask_of(c, {0, last});
    std::vector<double> share = cell_means(c, one, occ_lo, occ_hi);
    auto r = run_paths(cfg.n_paths, cfg.seed, cfg.threads, [&](std::size_t, Rng& rng) {
        std::size_t at = x;
        double time = 0.0, occ = 0.0;
        walk(c, x, stop, INFINITY, rng,
             [&](std::size_t i, double d) {
                 time += d;
                 occ += d * share[i];
             },
             at);
        return std::array<double, 3>{at == last ? 1.0 : 0.0, time, occ};
    });
    auto column = [&r](int j) {
        std::vector<PathResult> out(r.size());
        for (std::size_t k = 0; k < r.size(); ++k) out[k] = {r[k][j], 0.0};
        return out;
    };

    MonteCarloEstimate hit = mean_of(column(0));
    hit.target = "hit_before(" + num(b) + " | floor " + num(a) + ") from " + num(x0);
    rep.checks.push_back(make_check("hitting_probability", hit, hitting_probability(spec, a, x0, b), cfg.z_max));

    MonteCarloEstimate exit = mean_of(column(1));
    exit.target = "exit_time(" + num(a) + ", " + num(b) + ") from " + num(x0);
    rep.checks.push_back(make_check("expected_exit_time", exit, expected_exit_time(spec, a, x0, b).value, cfg.z_max));

    if (!boundary_atom) {
        MonteCarloEstimate occ = mean_of(column(2));
        double oracle;
        if (atom_at) {
            oracle = green_kernel(spec, a, b, x0, *atom_at) * spec.atom_mass(*atom_at);
            occ.target = "occupation({" + num(*atom_at) + "}) before exit from (" + num(a) + ", " + num(b) + ")";
        } else {
            // G(x0, y) = 2 (s(x0) - s(a)) (s(b) - s(y)) / (s(b) - s(a)) for y >= x0.
            double left = scale_increment(spec, a, x0), total = scale_increment(spec, a, b);
            oracle = 2.0 * left / total * scale_distance_integral(spec, x0, b, b);
            occ.target = "occupation([" + num(x0) + ", " + num(b) + "]) before exit from (" + num(a) + ", " + num(b) + ")";
        }
        rep.checks.push_back(make_check("occupation", occ, oracle, cfg.z_max));
    } else {
        // Started at a sticky reflecting end, time in the atom before reaching
        // the other end is 2 |s(other) - s(end)| m({end}).
        double z = *atom_at;
        std::size_t from = z == a ? 0 : last, to = z == a ? last : 0;
        MonteCarloEstimate occ = estimate(c, from, Occupation{z, z, StopRule{std::nullopt, {to}}}, cfg.n_paths,
                                          cfg.seed, cfg.threads);
        double oracle = 2.0 * std::fabs(scale_increment(spec, std::min(a, b), std::max(a, b))) * spec.atom_mass(z);
        occ.target += " from " + num(z) + " until " + num(c.grid[to]);
        rep.checks.push_back(make_check("occupation", occ, oracle, cfg.z_max));
    }

    if (c.lower == EndMode::Reflect && c.upper == EndMode::Reflect) {
        auto id = [](double y) { return y; };
        MonteCarloEstimate erg =
            estimate(c, x, ErgodicAverage{id, cfg.ergodic_horizon, "x"}, cfg.n_paths, cfg.seed, cfg.threads);
        double num_ = speed_integral(spec, id, a, b);
        for (const auto& at : spec.speed.atoms)
            if (at.location >= a && at.location <= b) num_ += at.location * at.mass;
        IntegralVerdict den = speed_of(spec, a, b, true, true);
        rep.checks.push_back(make_check("ergodic_average", erg, num_ / den.value, cfg.z_max));
    }

    for (const auto& ch : rep.checks) rep.pass = rep.pass && ch.pass;
    rep.chain = std::move(c);
    return rep;
}

}  // namespace sepdiff
