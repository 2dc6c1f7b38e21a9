#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sepdiff/diffusion_model.hpp"

namespace sepdiff::detail {

using Weight = std::function<double(double)>;

// Integral of weight(y) * dens(y) over (a, b), split at breakpoints. Ends that
// are flagged singular, or where the integrand is not finite, are decided by
// exponent fit. An empty weight means 1.
IntegralVerdict integrate_piecewise(const Piecewise& dens, const Weight& weight, double a, double b,
                                    EndpointSpec at_a = {}, EndpointSpec at_b = {});

// Running integral F(x) = int_origin^x dens, cached at every evaluated point so
// that nearby evaluations only integrate the gap to the closest known knot.
class Cumulative {
public:
    Cumulative(const DiffusionSpec& spec, const Piecewise& dens, double origin,
               std::optional<Finiteness> ov_l = std::nullopt, std::optional<Finiteness> ov_r = std::nullopt);
    double operator()(double x);

private:
    double between(double a, double b);
    const Piecewise& dens_;
    double l_, r_;
    std::optional<Finiteness> ov_l_, ov_r_;
    std::map<double, double> knots_;
};

// Finite interior point of (u, v), for split points and piece lookup.
double finite_mid(double u, double v);
// n points spread over (u, v); infinite ends are reached through t/(1-t).
std::vector<double> sample_points(double u, double w, int n);

bool is_boundary(const DiffusionSpec& spec, double x);
EndpointSpec endpoint_spec(const DiffusionSpec& spec, double x, OverrideQuantity q);

// Sum of atom masses located in the interval with the given inclusion flags.
double atom_sum(const DiffusionSpec& spec, double a, double b, bool include_a, bool include_b);

constexpr double kTol = 1e-9;
constexpr double kFitTol = 1e-6;  // for limits that came from exponent fits

// Relative deviation <= tol is Equal, > 10 tol is Different.
enum class Cmp { Equal, Different, Undecided };
Cmp compare(double a, double b, double tol);
// Equal -> true, Different -> false, Undecided throws Inconclusive at point.
bool settle(Cmp c, double point, const std::string& what);

struct Limit {
    double value;
    bool fitted;
};
// One-sided limit of e at x; throws Inconclusive when it cannot be settled.
Limit limit_of(const Expr& e, double x, Side side);

}  // namespace sepdiff::detail
