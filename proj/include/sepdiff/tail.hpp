#pragma once

#include <optional>
#include <string>

#include "sepdiff/expr.hpp"
#include "sepdiff/quadrature.hpp"

namespace sepdiff {

enum class Finiteness { Finite, Infinite };
enum class Method { Quadrature, ExponentFit, Override };

std::string to_string(Method m);

struct ExponentFit {
    enum class Kind { Power, Vanishing, Exploding, Unknown };
    Kind kind = Kind::Unknown;
    double p = 0.0;         // slope of log|f| against log(distance)
    bool log_flag = false;  // local slopes drift, as with a logarithmic factor
    double residual = 0.0;  // RMS deviation from the fitted line
    double min_slope = 0.0;
    double max_slope = 0.0;
    bool undefined = false;  // some sample was NaN
    bool pure() const;
};

// Samples at offsets innermost*scale*2^k, k = 0..11, from a finite point; for
// infinite points at |x| = scale/(innermost*2^k) with distance 1/|x|.
ExponentFit fit_exponent(const Integrand& f, double point, Side side, double scale, double innermost = 1e-9);

struct TailDecision {
    Finiteness finiteness;
    Method method;
    ExponentFit fit;
};

// Decides whether f is integrable near point (approached from side). Throws
// InconclusiveTail inside the refusal band when no override is given.
TailDecision decide_tail(const Integrand& f, double point, Side side, double scale,
                         std::optional<Finiteness> override_verdict = std::nullopt);

struct EndpointSpec {
    bool singular = false;
    std::optional<Finiteness> override_verdict;
};

struct IntegralVerdict {
    double value = 0.0;  // +inf when not finite
    bool finite = true;
    Method method = Method::Quadrature;
};

IntegralVerdict improper_integral(const Integrand& f, double a, double b, EndpointSpec at_a = {},
                                  EndpointSpec at_b = {}, const QuadOptions& opts = {});

// Integral of f from m toward endpoint e (finite or infinite) assuming it is
// finite: geometric panels with extrapolation of the remaining tail.
double tail_integral(const Integrand& f, double m, double e, const QuadOptions& opts = {});

// Limit of f at point from side: direct evaluation when defined, otherwise
// from the exponent fit. nullopt when it cannot be settled.
std::optional<double> one_sided_limit(const Integrand& f, double point, Side side, double scale);

}  // namespace sepdiff
