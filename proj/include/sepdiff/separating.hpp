#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sepdiff/diffusion_model.hpp"

namespace sepdiff {

enum class Reason {
    RatioKink,
    BetaNotL2,
    SpeedScaleProductNotOne,
    AtomMismatch,
    ScaleLimitInfinite,
    HalfGoodIntegralDiverges,
    BoundaryBehaviorMismatch,
    DerivativeQuotientAtBoundaryFails,
    BoundaryProductNotOne,
    AccessibilityMismatch,
};

std::string to_string(Reason r);

struct PointClass {
    double point;
    bool separating = false;
    std::vector<Reason> reasons;
    bool has(Reason r) const;
};

// Ratio data on one piece where all four densities are smooth.
struct RatioPiece {
    double lo, hi;
    Expr rho;          // s' / S~'
    Expr beta;         // rho' / s'
    Expr speed_ratio;  // m / m~ densities
};

struct AtomRatio {
    double location;
    double mass_p;
    double mass_q;
};

struct RatioProfile {
    double a, b;
    std::vector<RatioPiece> pieces;
    std::vector<double> kinks;  // breakpoints where rho jumps
    std::vector<AtomRatio> atoms;
};

struct Interval {
    double lo, hi;
    bool operator==(const Interval&) const = default;
};

// Closed subset of cl(J): sorted disjoint closed intervals, singletons allowed.
struct SeparatingSet {
    std::vector<Interval> components;
    bool contains(double x) const;
    bool empty() const { return components.empty(); }
    bool operator==(const SeparatingSet&) const = default;
};

enum class TimeKind { Delta, Zero, HittingTime };

struct TimeDescriptor {
    TimeKind kind = TimeKind::Delta;
    double point = 0.0;
    std::string note;
};

enum class Tri { Yes, No, Mixed };
std::string to_string(Tri t);

struct Verdicts {
    bool p_ll_loc_q = false;  // P <<_loc P~
    bool q_ll_loc_p = false;
    bool p_ll_q = false;
    bool q_ll_p = false;
    bool equivalent = false;
    bool singular_f0 = false;
    Tri singular = Tri::No;
    // P(S <= inf) under P and under P~.
    double prob_singular_p = 0.0;
    double prob_singular_q = 0.0;
};

struct AsymptoticBehavior {
    double scale_l, scale_r;
    int regime;  // 1 oscillation, 2 drift to l, 3 drift to r, 4 split
    double prob_l;   // P(X tends to l as t increases to T_l ^ T_r)
    double prob_r;
    bool oscillates;
    bool recurrent;
};

struct SeparationReport {
    bool identical = false;
    SeparatingSet A;
    std::vector<PointClass> points;  // every classified critical point and boundary
    std::optional<double> alpha;     // nullopt encodes the cemetery point
    std::optional<double> gamma;
    TimeDescriptor U, V;
    bool R_infinite = false;
    std::string S_structure;
    Verdicts verdicts;
    std::vector<std::string> notes;
};

RatioProfile ratio_profile(const DiffusionSpec& p, const DiffusionSpec& q, double a, double b);
PointClass classify_interior(const DiffusionSpec& p, const DiffusionSpec& q, double x);
PointClass classify_boundary_pair(const DiffusionSpec& p, const DiffusionSpec& q, Boundary b);
SeparatingSet separating_set(const DiffusionSpec& p, const DiffusionSpec& q);
bool diffusions_identical(const DiffusionSpec& p, const DiffusionSpec& q);
AsymptoticBehavior asymptotic_behavior(const DiffusionSpec& spec, double x0);
SeparationReport separation_report(const DiffusionSpec& p, const DiffusionSpec& q, double x0);

}  // namespace sepdiff
