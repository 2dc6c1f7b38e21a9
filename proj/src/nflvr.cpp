#include "sepdiff/nflvr.hpp"

#include <algorithm>
#include <cmath>

#include "model_internal.hpp"

namespace sepdiff {

using namespace detail;

std::string to_string(Horizon h) { return h == Horizon::Finite ? "finite" : "infinite"; }

void require_lower_bounded(const DiffusionSpec& spec) {
    if (!std::isfinite(spec.space.l) || spec.space.r != INFINITY)
        throw NotLowerBounded("state space must be [l, inf) or (l, inf) with finite l");
}

namespace {

Piecewise beta_pieces(const DiffusionSpec& spec) {
    Piecewise beta;
    beta.breakpoints = spec.scale.density.breakpoints;
    for (const Expr& p : spec.scale.density.pieces) beta.pieces.push_back(fold_constants(derivative(p) / p));
    return beta;
}

// Upper end of the window (l, l + 1) used for conditions at l.
double window_end(const DiffusionSpec& spec) { return spec.space.l + 1.0; }

void factors(const Expr& e, std::vector<Expr>& out) {
    if (e.op() == Op::Mul) {
        factors(e.lhs(), out);
        factors(e.rhs(), out);
    } else {
        out.push_back(e);
    }
}

// a * b with exponential factors merged, so that exp(u) exp(-u) does not
// evaluate as inf * 0 far out.
Expr product(const Expr& a, const Expr& b) {
    std::vector<Expr> fs;
    factors(a, fs);
    factors(b, fs);
    std::optional<Expr> exponent, rest;
    for (const Expr& f : fs) {
        if (f.op() == Op::Exp)
            exponent = exponent ? *exponent + f.lhs() : f.lhs();
        else
            rest = rest ? *rest * f : f;
    }
    Expr out = rest.value_or(Expr::constant(1.0));
    if (exponent) out = out * Expr::unary(Op::Exp, *exponent);
    return fold_constants(out);
}

}  // namespace

BetaFunction beta_of_scale(const DiffusionSpec& spec) {
    require_lower_bounded(spec);
    if (spec.space.l_closed && !std::isinf(spec.atom_mass(spec.space.l))) throw LeftBoundaryNotAbsorbing();

    const Piecewise& sd = spec.scale.density;
    for (double bp : sd.breakpoints) {
        Limit left = limit_of(sd.at(bp, Side::Left), bp, Side::Left);
        Limit right = limit_of(sd.at(bp, Side::Right), bp, Side::Right);
        if (!std::isfinite(left.value) || !std::isfinite(right.value) || left.value <= 0 || right.value <= 0)
            throw KinkInScale(bp);
        double tol = left.fitted || right.fitted ? kFitTol : kTol;
        if (!settle(compare(left.value, right.value, tol), bp, "scale density continuity")) throw KinkInScale(bp);
    }

    BetaFunction out{beta_pieces(spec), "symbolic s''/s'"};
    for (double bp : sd.breakpoints) {
        for (Side side : {Side::Left, Side::Right}) {
            const Expr& b = out.beta.at(bp, side);
            auto sq = [&b](double z) {
                double v = evaluate_raw(b, z);
                return v * v;
            };
            if (std::isfinite(sq(bp))) continue;
            if (decide_tail(sq, bp, side, std::max(1.0, std::fabs(bp))).finiteness == Finiteness::Infinite)
                throw BetaNotLocallyL2(bp);
        }
    }
    return out;
}

ConditionB2 check_condition_b2(const DiffusionSpec& spec) {
    BetaFunction beta = beta_of_scale(spec);
    Piecewise sq = beta.beta;
    for (auto& p : sq.pieces) p = p * p;
    double l = spec.space.l;
    IntegralVerdict v = integrate_piecewise(sq, [l](double x) { return x - l; }, l, window_end(spec), {true, std::nullopt}, {});
    return ConditionB2{v.finite, v.finite ? v.value : INFINITY, v.method};
}

ConditionB3 check_condition_b3(const DiffusionSpec& spec) {
    beta_of_scale(spec);
    ConditionB3 out;
    double l = spec.space.l;
    double sl = scale_at(spec, l);
    out.scale_clause = sl == -INFINITY || !accessibility_integral(spec, Boundary::L).finite;

    const Piecewise& sd = spec.scale.density;
    auto weight = [&](double x) { return (x - l) * sd(x); };
    double c = window_end(spec);
    IntegralVerdict v = integrate_piecewise(spec.speed.density, weight, l, c, {true, std::nullopt}, {});
    bool finite = v.finite;
    for (const auto& at : spec.speed.atoms)
        if (at.location > l && at.location < c && std::isinf(at.mass)) finite = false;
    out.integral_clause = !finite;
    out.pass = out.scale_clause && out.integral_clause;
    return out;
}

DiffusionSpec elmm_characteristics(const DiffusionSpec& spec) {
    DiffusionSpec out;
    out.space = spec.space;
    out.label = spec.label.empty() ? "elmm" : spec.label + "_elmm";
    double c = spec.reference_point();
    out.scale = ScaleFunction{Piecewise::single(Expr::constant(1.0)), c, c};

    const Piecewise& sd = spec.scale.density;
    const Piecewise& md = spec.speed.density;
    std::vector<double> bps = sd.breakpoints;
    bps.insert(bps.end(), md.breakpoints.begin(), md.breakpoints.end());
    std::sort(bps.begin(), bps.end());
    bps.erase(std::unique(bps.begin(), bps.end()), bps.end());
    Piecewise speed;
    speed.breakpoints = bps;
    std::vector<double> nodes{spec.space.l};
    nodes.insert(nodes.end(), bps.begin(), bps.end());
    nodes.push_back(spec.space.r);
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        double mid = finite_mid(nodes[i], nodes[i + 1]);
        speed.pieces.push_back(product(sd.at(mid), md.at(mid)));
    }
    out.speed.density = speed;
    for (const auto& at : spec.speed.atoms) {
        if (is_boundary(spec, at.location))
            out.speed.atoms.push_back(at);
        else
            out.speed.atoms.push_back({at.location, at.mass * sd(at.location)});
    }
    return out;
}

NflvrReport nflvr_verdict(const DiffusionSpec& spec, Horizon horizon) {
    require_lower_bounded(spec);
    NflvrReport rep;
    rep.horizon = horizon;
    rep.s_infinity = scale_at(spec, INFINITY);
    try {
        rep.cond_b1.provenance = beta_of_scale(spec).provenance;
        rep.cond_b1.pass = true;
    } catch (const KinkInScale& e) {
        rep.cond_b1.provenance = e.what();
    } catch (const BetaNotLocallyL2& e) {
        rep.cond_b1.provenance = e.what();
    } catch (const LeftBoundaryNotAbsorbing& e) {
        rep.cond_b1.provenance = e.what();
    }
    if (!rep.cond_b1.pass) return rep;
    rep.cond_b2 = check_condition_b2(spec);
    rep.cond_b3 = check_condition_b3(spec);
    rep.verdict_finite_horizon = rep.cond_b2.pass || rep.cond_b3.pass;
    rep.verdict_infinite_horizon = rep.cond_b2.pass && rep.s_infinity == INFINITY;
    if (rep.verdict_finite_horizon || rep.verdict_infinite_horizon) rep.elmm = elmm_characteristics(spec);
    return rep;
}

}  // namespace sepdiff
