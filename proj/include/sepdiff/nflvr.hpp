#pragma once

#include <optional>
#include <string>

#include "sepdiff/diffusion_model.hpp"
#include "sepdiff/errors.hpp"

namespace sepdiff {

class KinkInScale : public Error {
public:
    explicit KinkInScale(double point)
        : Error("scale density jumps at " + std::to_string(point)), point(point) {}
    double point;
};

class BetaNotLocallyL2 : public Error {
public:
    explicit BetaNotLocallyL2(double point)
        : Error("beta is not square integrable near " + std::to_string(point)), point(point) {}
    double point;
};

class LeftBoundaryNotAbsorbing : public Error {
public:
    LeftBoundaryNotAbsorbing() : Error("left boundary belongs to the state space but is not absorbing") {}
};

enum class Horizon { Finite, Infinite };
std::string to_string(Horizon h);

// beta = s''/s' piece by piece.
struct BetaFunction {
    Piecewise beta;
    std::string provenance;
};

struct ConditionB1 {
    bool pass = false;
    std::string provenance;  // how beta was obtained, or why it failed
};

struct ConditionB2 {
    bool pass = false;
    double integral = INFINITY;  // int_(l, l+1) (x - l) beta^2 dx
    Method method = Method::Quadrature;
};

struct ConditionB3 {
    bool pass = false;
    bool scale_clause = false;     // s(l) = -inf, or int |s - s(l)| dm diverges at l
    bool integral_clause = false;  // int (x - l) s' dm diverges at l
};

struct NflvrReport {
    Horizon horizon = Horizon::Finite;
    ConditionB1 cond_b1;
    ConditionB2 cond_b2;
    ConditionB3 cond_b3;
    bool verdict_finite_horizon = false;
    bool verdict_infinite_horizon = false;
    double s_infinity = INFINITY;
    std::optional<DiffusionSpec> elmm;
    bool verdict() const { return horizon == Horizon::Finite ? verdict_finite_horizon : verdict_infinite_horizon; }
};

// Throws NotLowerBounded unless the state space is [l, inf) or (l, inf) with l finite.
void require_lower_bounded(const DiffusionSpec& spec);

BetaFunction beta_of_scale(const DiffusionSpec& spec);
ConditionB2 check_condition_b2(const DiffusionSpec& spec);
ConditionB3 check_condition_b3(const DiffusionSpec& spec);
NflvrReport nflvr_verdict(const DiffusionSpec& spec, Horizon horizon);
// Natural-scale diffusion with speed s' dm on the same state space.
DiffusionSpec elmm_characteristics(const DiffusionSpec& spec);

}  // namespace sepdiff
