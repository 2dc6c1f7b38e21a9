#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "sepdiff/expr.hpp"
#include "sepdiff/tail.hpp"

namespace sepdiff {

enum class Boundary { L, R };

std::string to_string(Boundary b);

struct StateSpace {
    double l = -INFINITY;
    double r = INFINITY;
    bool l_closed = false;
    bool r_closed = false;
};

// Densities given piece by piece between sorted interior breakpoints.
struct Piecewise {
    std::vector<double> breakpoints;
    std::vector<Expr> pieces;  // breakpoints.size() + 1 entries

    static Piecewise single(Expr e) { return Piecewise{{}, {std::move(e)}}; }
    // Piece index containing x; at a breakpoint the side picks the neighbour.
    std::size_t index(double x, Side side = Side::Right) const;
    const Expr& at(double x, Side side = Side::Right) const { return pieces[index(x, side)]; }
    double operator()(double x, Side side = Side::Right) const { return evaluate_raw(at(x, side), x); }
};

struct ScaleFunction {
    Piecewise density;  // s'
    double anchor_point = 0.0;
    double anchor_value = 0.0;
};

struct Atom {
    double location;
    double mass;  // may be +inf at a boundary
};

enum class OverrideQuantity { Scale, Speed, U, V, Accessibility, HalfGood, BetaL2 };

std::string to_string(OverrideQuantity q);
std::optional<OverrideQuantity> override_quantity_from_string(const std::string& s);

struct IntegrabilityOverride {
    Boundary boundary;
    OverrideQuantity quantity;
    Finiteness verdict;
};

struct SpeedMeasure {
    Piecewise density;
    std::vector<Atom> atoms;
    std::vector<IntegrabilityOverride> overrides;
};

struct DiffusionSpec {
    StateSpace space;
    ScaleFunction scale;
    SpeedMeasure speed;
    std::string label;

    double endpoint(Boundary b) const { return b == Boundary::L ? space.l : space.r; }
    bool closed(Boundary b) const { return b == Boundary::L ? space.l_closed : space.r_closed; }
    // Mass of the atom at x, 0 when there is none.
    double atom_mass(double x) const;
    std::optional<Finiteness> override_for(Boundary b, OverrideQuantity q) const;
    // Sorted interior breakpoints of both densities plus interior atom locations.
    std::vector<double> critical_points() const;
    // Interior point used as the reference c for u and v.
    double reference_point() const;
};

enum class BoundaryKind { Regular, Exit, Entrance, Natural };
enum class BoundaryBehavior { Absorbing, SlowlyReflecting, InstantaneouslyReflecting, NotApplicable };

std::string to_string(BoundaryKind k);
std::string to_string(BoundaryBehavior b);

struct BoundaryReport {
    Boundary boundary;
    double point;
    IntegralVerdict u;
    IntegralVerdict v;
    BoundaryKind kind;
    bool accessible;
    BoundaryBehavior behavior;
    double scale_limit;
    double atom_mass;
    bool cross_checked = false;  // the weighted-speed route agreed
};

struct Violation {
    std::string kind;
    std::string location;
    std::string message;
};

std::vector<Violation> validate_spec(const DiffusionSpec& spec);

// s(x) for x in cl(J); +-inf at boundaries where the limit diverges.
double scale_at(const DiffusionSpec& spec, double x);
// s(b) - s(a) computed directly (no cancellation near a boundary).
double scale_increment(const DiffusionSpec& spec, double a, double b);

IntegralVerdict speed_of(const DiffusionSpec& spec, double a, double b, bool include_a, bool include_b);

double green_kernel(const DiffusionSpec& spec, double a, double b, double x, double y);
double hitting_probability(const DiffusionSpec& spec, double a, double x, double b);
IntegralVerdict expected_exit_time(const DiffusionSpec& spec, double a, double x, double b);

struct UVValues {
    IntegralVerdict u;
    IntegralVerdict v;
    double reference;
};

UVValues uv_values(const DiffusionSpec& spec, Boundary b);
// Integral of |s(z) - s(b)| against m near b; infinite when |s(b)| is.
IntegralVerdict accessibility_integral(const DiffusionSpec& spec, Boundary b);
BoundaryReport classify_boundary(const DiffusionSpec& spec, Boundary b);

}  // namespace sepdiff
