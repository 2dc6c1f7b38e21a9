#include "sepdiff/tail.hpp"

#include <cmath>
#include <vector>

#include "sepdiff/errors.hpp"

namespace sepdiff {

std::string to_string(Method m) {
    switch (m) {
        case Method::Quadrature:
            return "quadrature";
        case Method::ExponentFit:
            return "exponent-fit";
        case Method::Override:
            return "override";
    }
    return "quadrature";
}

namespace {

constexpr int kSamples = 12;
constexpr double kResidualLimit = 0.05;
constexpr double kBand = 0.05;
constexpr double kLogBand = 0.25;
// A fit this clean is read as an exact power, so the threshold applies sharply.
constexpr double kPureResidual = 1e-5;
constexpr double kPureDrift = 1e-4;

double sample_point(double point, Side side, double scale, double innermost, int k, double* distance) {
    double off = innermost * std::ldexp(1.0, k);
    if (std::isfinite(point)) {
        double d = off * scale;
        *distance = d;
        return side == Side::Right ? point + d : point - d;
    }
    double x = scale / off;
    *distance = 1.0 / x;
    return point > 0 ? x : -x;
}

}  // namespace

bool ExponentFit::pure() const {
    return kind == Kind::Power && residual <= kPureResidual && std::fabs(max_slope - min_slope) <= kPureDrift;
}

ExponentFit fit_exponent(const Integrand& f, double point, Side side, double scale, double innermost) {
    ExponentFit fit;
    std::vector<double> t(kSamples), y(kSamples), raw(kSamples);
    for (int k = 0; k < kSamples; ++k) {
        double d = 0.0;
        double x = sample_point(point, side, scale, innermost, k, &d);
        raw[k] = std::fabs(f(x));
        t[k] = std::log(d);
    }
    bool any_nan = false, any_zero = false, any_inf = false;
    for (double v : raw) {
        if (std::isnan(v)) any_nan = true;
        else if (v == 0.0) any_zero = true;
        else if (std::isinf(v)) any_inf = true;
    }
    if (any_nan) {
        fit.undefined = true;
        return fit;
    }
    if (any_zero || any_inf) {
        // Under/overflow next to the point: settle by the monotone trend.
        bool nondecreasing = true, nonincreasing = true;
        for (int k = 0; k + 1 < kSamples; ++k) {
            if (raw[k + 1] < raw[k]) nondecreasing = false;
            if (raw[k + 1] > raw[k]) nonincreasing = false;
        }
        if (raw[0] == 0.0 && nondecreasing) fit.kind = ExponentFit::Kind::Vanishing;
        if (std::isinf(raw[0]) && nonincreasing) fit.kind = ExponentFit::Kind::Exploding;
        return fit;
    }
    for (int k = 0; k < kSamples; ++k) y[k] = std::log(raw[k]);
    double tm = 0, ym = 0;
    for (int k = 0; k < kSamples; ++k) {
        tm += t[k];
        ym += y[k];
    }
    tm /= kSamples;
    ym /= kSamples;
    double stt = 0, sty = 0;
    for (int k = 0; k < kSamples; ++k) {
        stt += (t[k] - tm) * (t[k] - tm);
        sty += (t[k] - tm) * (y[k] - ym);
    }
    fit.p = sty / stt;
    double ss = 0;
    for (int k = 0; k < kSamples; ++k) {
        double r = y[k] - (ym + fit.p * (t[k] - tm));
        ss += r * r;
    }
    fit.residual = std::sqrt(ss / kSamples);
    fit.min_slope = INFINITY;
    fit.max_slope = -INFINITY;
    for (int k = 0; k + 1 < kSamples; ++k) {
        double s = (y[k + 1] - y[k]) / (t[k + 1] - t[k]);
        fit.min_slope = std::min(fit.min_slope, s);
        fit.max_slope = std::max(fit.max_slope, s);
    }
    fit.log_flag = std::fabs(fit.max_slope - fit.min_slope) > kPureDrift;
    fit.kind = fit.residual > kResidualLimit ? ExponentFit::Kind::Unknown : ExponentFit::Kind::Power;
    return fit;
}

namespace {

// Integrability exponent in the distance variable: for an infinite point
// dx = -dd/d^2 shifts the exponent by -2.
double effective(double p, double point) { return std::isfinite(point) ? p : p - 2.0; }

std::optional<Finiteness> settle(const ExponentFit& fit, double point) {
    switch (fit.kind) {
        case ExponentFit::Kind::Vanishing:
            return Finiteness::Finite;
        case ExponentFit::Kind::Exploding:
            return Finiteness::Infinite;
        case ExponentFit::Kind::Power: {
            double q = effective(fit.p, point);
            if (fit.pure()) return q > -1.0 + kPureDrift ? Finiteness::Finite : Finiteness::Infinite;
            // Drifting local slopes hint at a logarithmic factor; widen the band.
            double band = fit.log_flag ? kLogBand : kBand;
            if (std::fabs(q + 1.0) >= band) return q > -1.0 ? Finiteness::Finite : Finiteness::Infinite;
            return std::nullopt;
        }
        case ExponentFit::Kind::Unknown: {
            if (fit.min_slope > fit.max_slope) return std::nullopt;
            double lo = effective(fit.min_slope, point), hi = effective(fit.max_slope, point);
            if (lo > -1.0 + kBand) return Finiteness::Finite;
            if (hi < -1.0 - kBand) return Finiteness::Infinite;
            return std::nullopt;
        }
    }
    return std::nullopt;
}

double deep_innermost(double point, double scale) {
    if (!std::isfinite(point) || point == 0.0) return 1e-30;
    return std::max(1e-30, 1e-12 * std::fabs(point) / scale);
}

}  // namespace

TailDecision decide_tail(const Integrand& f, double point, Side side, double scale,
                         std::optional<Finiteness> override_verdict) {
    if (override_verdict) return TailDecision{*override_verdict, Method::Override, {}};
    ExponentFit fit = fit_exponent(f, point, side, scale);
    if (auto v = settle(fit, point)) return TailDecision{*v, Method::ExponentFit, fit};
    // Borderline at the standard scale: refit much closer to the point, where
    // analytic corrections fade but logarithmic ones do not.
    double deep = deep_innermost(point, scale);
    if (deep < 1e-9) {
        ExponentFit fit2 = fit_exponent(f, point, side, scale, deep);
        if (fit2.kind == ExponentFit::Kind::Power && fit2.pure()) {
            if (auto v = settle(fit2, point)) return TailDecision{*v, Method::ExponentFit, fit2};
        }
        if (fit2.kind == ExponentFit::Kind::Vanishing || fit2.kind == ExponentFit::Kind::Exploding) {
            return TailDecision{*settle(fit2, point), Method::ExponentFit, fit2};
        }
    }
    // Samples lost to overflow meeting underflow: refit on a coarser scale.
    if (fit.undefined) {
        for (double innermost : {1e-4, 1e-2}) {
            ExponentFit fit3 = fit_exponent(f, point, side, scale, innermost);
            if (fit3.undefined) continue;
            if (auto v = settle(fit3, point)) return TailDecision{*v, Method::ExponentFit, fit3};
            break;
        }
    }
    std::string what = fit.undefined ? "integrand undefined near the point"
                       : fit.kind == ExponentFit::Kind::Unknown
                           ? "exponent fit unknown (residual " + std::to_string(fit.residual) + ")"
                           : "exponent " + std::to_string(fit.p) + " inside the refusal band";
    throw InconclusiveTail(point, what);
}

double tail_integral(const Integrand& f, double m, double e, const QuadOptions& opts) {
    QuadOptions po = opts;
    po.rel_tol = std::min(opts.rel_tol, 1e-11);
    const bool inf_end = std::isinf(e);
    const double dir = e > m ? 1.0 : -1.0;
    const double L = std::fabs(e - m);
    const double X = std::max(1.0, std::fabs(m));
    double sum = 0.0;
    double prev = NAN, prev_r = NAN, prev_r2 = NAN;
    const int kmax = inf_end ? 990 : 1020;
    for (int k = 0; k < kmax; ++k) {
        double lo, hi;  // lo nearer to m
        if (inf_end) {
            lo = m + dir * X * (std::ldexp(1.0, k) - 1.0);
            hi = m + dir * X * (std::ldexp(1.0, k + 1) - 1.0);
        } else {
            lo = e - dir * L * std::ldexp(1.0, -k);
            hi = e - dir * L * std::ldexp(1.0, -k - 1);
            if (hi == e || lo == hi || std::fabs(hi - e) < std::fabs(e) * 1e-13) {
                // Floating resolution reached; extrapolate with the last ratio.
                if (std::isfinite(prev_r) && prev_r >= 0 && prev_r < 1) return sum + prev * prev_r / (1 - prev_r);
                if (prev == 0.0) return sum;
                throw QuadratureFailure("tail toward " + std::to_string(e) + " did not settle");
            }
        }
        QuadResult q = integrate(f, std::min(lo, hi), std::max(lo, hi), po);
        if (!std::isfinite(q.value)) throw QuadratureFailure("non-finite panel toward " + std::to_string(e));
        // Oriented from m toward e.
        double Ik = dir > 0 ? q.value : -q.value;
        sum += Ik;
        if (k >= 1) {
            if (Ik == 0.0 && prev == 0.0) return sum;
            double r = prev != 0.0 ? Ik / prev : NAN;
            if (std::isfinite(r) && r >= 0 && r < 1) {
                double tail = Ik * r / (1 - r);
                if (k >= 3 && std::fabs(tail) <= 1e-13 * std::fabs(sum)) return sum + tail;
                if (k >= 6 && std::fabs(r - prev_r) <= 1e-10 && std::fabs(prev_r - prev_r2) <= 1e-10)
                    return sum + tail;
            }
            prev_r2 = prev_r;
            prev_r = r;
        }
        prev = Ik;
    }
    if (std::isfinite(prev_r) && prev_r >= 0 && prev_r < 1) return sum + prev * prev_r / (1 - prev_r);
    throw QuadratureFailure("tail toward " + std::to_string(e) + " did not settle");
}

IntegralVerdict improper_integral(const Integrand& f, double a, double b, EndpointSpec at_a, EndpointSpec at_b,
                                  const QuadOptions& opts) {
    IntegralVerdict out;
    if (a == b) return out;
    if (a > b) throw Error("improper_integral: a > b");
    bool sa = at_a.singular || std::isinf(a);
    bool sb = at_b.singular || std::isinf(b);
    double m;
    if (std::isfinite(a) && std::isfinite(b)) {
        m = 0.5 * (a + b);
    } else if (std::isfinite(a)) {
        m = a + std::max(1.0, std::fabs(a));
    } else if (std::isfinite(b)) {
        m = b - std::max(1.0, std::fabs(b));
    } else {
        m = 0.0;
    }
    Method method = Method::Quadrature;
    auto note = [&](Method mt) {
        if (mt == Method::Override || method == Method::Quadrature) method = mt;
    };
    if (sa) {
        double scale = std::isfinite(a) ? (m - a) : std::max(1.0, std::fabs(m));
        TailDecision d = decide_tail(f, a, Side::Right, scale, at_a.override_verdict);
        note(d.method);
        if (d.finiteness == Finiteness::Infinite) return IntegralVerdict{INFINITY, false, method};
    }
    if (sb) {
        double scale = std::isfinite(b) ? (b - m) : std::max(1.0, std::fabs(m));
        TailDecision d = decide_tail(f, b, Side::Left, scale, at_b.override_verdict);
        note(d.method);
        if (d.finiteness == Finiteness::Infinite) return IntegralVerdict{INFINITY, false, method};
    }
    double left = sa ? -tail_integral(f, m, a, opts) : integrate_or_throw(f, a, m, opts);
    double right = sb ? tail_integral(f, m, b, opts) : integrate_or_throw(f, m, b, opts);
    out.value = left + right;
    out.finite = true;
    out.method = method;
    return out;
}

std::optional<double> one_sided_limit(const Integrand& f, double point, Side side, double scale) {
    if (std::isfinite(point)) {
        double v = f(point);
        if (std::isfinite(v)) return v;
    }
    ExponentFit fit = fit_exponent(f, point, side, scale);
    if (fit.kind == ExponentFit::Kind::Vanishing) return 0.0;
    if (fit.kind == ExponentFit::Kind::Exploding) return INFINITY;
    if (fit.kind == ExponentFit::Kind::Power && std::fabs(fit.p) > 1e-3 && fit.residual < 1e-3) {
        return fit.p > 0 ? 0.0 : INFINITY;
    }
    double d1 = 0.0, d2 = 0.0;
    double x1 = sample_point(point, side, scale, 1e-9, 0, &d1);
    double x2 = sample_point(point, side, scale, deep_innermost(point, scale), 0, &d2);
    double v1 = f(x1), v2 = f(x2);
    if (!std::isfinite(v1) || !std::isfinite(v2)) return std::nullopt;
    if (std::fabs(v1 - v2) <= 1e-6 * std::max(std::fabs(v2), 1e-300)) return v2;
    return std::nullopt;
}

}  // namespace sepdiff
