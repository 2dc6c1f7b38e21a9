#include "sepdiff/separating.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "model_internal.hpp"
#include "sepdiff/errors.hpp"

namespace sepdiff {

std::string to_string(Reason r) {
    switch (r) {
        case Reason::RatioKink: return "RatioKink";
        case Reason::BetaNotL2: return "BetaNotL2";
        case Reason::SpeedScaleProductNotOne: return "SpeedScaleProductNotOne";
        case Reason::AtomMismatch: return "AtomMismatch";
        case Reason::ScaleLimitInfinite: return "ScaleLimitInfinite";
        case Reason::HalfGoodIntegralDiverges: return "HalfGoodIntegralDiverges";
        case Reason::BoundaryBehaviorMismatch: return "BoundaryBehaviorMismatch";
        case Reason::DerivativeQuotientAtBoundaryFails: return "DerivativeQuotientAtBoundaryFails";
        case Reason::BoundaryProductNotOne: return "BoundaryProductNotOne";
        case Reason::AccessibilityMismatch: return "AccessibilityMismatch";
    }
    return "?";
}

std::string to_string(Tri t) {
    switch (t) {
        case Tri::Yes: return "yes";
        case Tri::No: return "no";
        case Tri::Mixed: return "mixed";
    }
    return "?";
}

bool PointClass::has(Reason r) const { return std::find(reasons.begin(), reasons.end(), r) != reasons.end(); }

bool SeparatingSet::contains(double x) const {
    for (const auto& c : components)
        if (c.lo <= x && x <= c.hi) return true;
    return false;
}

namespace detail {

Cmp compare(double a, double b, double tol) {
    if (!std::isfinite(a) || !std::isfinite(b)) return a == b ? Cmp::Equal : Cmp::Different;
    double scale = std::max(std::fabs(a), std::fabs(b));
    if (scale == 0.0) return Cmp::Equal;
    double dev = std::fabs(a - b) / scale;
    if (dev <= tol) return Cmp::Equal;
    if (dev > 10 * tol) return Cmp::Different;
    return Cmp::Undecided;
}

bool settle(Cmp c, double point, const std::string& what) {
    if (c == Cmp::Undecided) throw Inconclusive(point, what + " inside the tolerance band");
    return c == Cmp::Equal;
}

Limit limit_of(const Expr& e, double x, Side side) {
    if (std::isfinite(x)) {
        double v = evaluate_raw(e, x);
        if (std::isfinite(v)) return {v, false};
    }
    auto f = [&e](double z) { return evaluate_raw(e, z); };
    auto lim = one_sided_limit(f, x, side, std::max(1.0, std::isfinite(x) ? std::fabs(x) : 1.0));
    if (!lim) throw Inconclusive(x, "one-sided limit could not be settled");
    return {*lim, true};
}

}  // namespace detail

namespace {

using namespace detail;

void require_shared_interior(const DiffusionSpec& p, const DiffusionSpec& q) {
    if (p.space.l != q.space.l || p.space.r != q.space.r)
        throw DomainMismatch("state spaces have different interiors");
}

std::vector<double> merged_critical_points(const DiffusionSpec& p, const DiffusionSpec& q) {
    std::vector<double> pts = p.critical_points();
    for (double x : q.critical_points()) pts.push_back(x);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

// The four densities on one piece of the merged partition.
struct PieceExprs {
    Expr sp, mp, sq, mq;
    Expr rho, drho;

    PieceExprs(const DiffusionSpec& p, const DiffusionSpec& q, double x, Side side)
        : sp(p.scale.density.at(x, side)), mp(p.speed.density.at(x, side)),
          sq(q.scale.density.at(x, side)), mq(q.speed.density.at(x, side)) {
        rho = fold_constants(sp / sq);
        drho = fold_constants(derivative(rho));
    }

    double rho_at(double z) const { return evaluate_raw(rho, z); }

    double beta_at(double z) const {
        double r = evaluate_raw(rho, z);
        double d = evaluate_raw(drho, z);
        if (std::fabs(d) * std::max(1.0, std::fabs(z)) < 1e-11 * std::fabs(r)) return 0.0;
        return d / evaluate_raw(sp, z);
    }

    // beta^2 against dS~.
    double beta_sq_weight(double z) const {
        double b = beta_at(z);
        return b * b * evaluate_raw(sq, z);
    }
};

PieceExprs piece_on(const DiffusionSpec& p, const DiffusionSpec& q, double lo, double hi) {
    return PieceExprs(p, q, finite_mid(lo, hi), Side::Right);
}

// m s' against m~ S~' on the open piece (lo, hi).
bool piece_product_good(const PieceExprs& e, double lo, double hi) {
    Expr a = fold_constants(e.mp * e.sp);
    Expr b = fold_constants(e.mq * e.sq);
    if (a == b) return true;
    Cmp worst = Cmp::Equal;
    double worst_at = finite_mid(lo, hi);
    for (double z : sample_points(lo, hi, 32)) {
        double va = evaluate_raw(a, z), vb = evaluate_raw(b, z);
        if (!std::isfinite(va) || !std::isfinite(vb)) continue;
        Cmp c = compare(va, vb, kTol);
        if (c == Cmp::Different) return false;
        if (c == Cmp::Undecided && worst == Cmp::Equal) {
            worst = c;
            worst_at = z;
        }
    }
    return settle(worst, worst_at, "speed-scale product");
}

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

// Integrability of g near point from side.
bool tail_finite(const Integrand& g, double point, Side side, std::optional<Finiteness> ov) {
    if (ov) return *ov == Finiteness::Finite;
    if (std::isfinite(point) && std::isfinite(g(point))) return true;
    bool all_zero = true;
    for (int k = 3; k <= 9 && all_zero; ++k) {
        double d = std::pow(10.0, -k);
        double z = std::isfinite(point) ? (side == Side::Right ? point + d * std::max(1.0, std::fabs(point)) : point - d * std::max(1.0, std::fabs(point)))
                                        : (point > 0 ? 1.0 / d : -1.0 / d);
        if (g(z) != 0.0) all_zero = false;
    }
    if (all_zero) return true;
    double scale = std::isfinite(point) ? std::max(1.0, std::fabs(point)) : 1.0;
    return decide_tail(g, point, side, scale).finiteness == Finiteness::Finite;
}

std::optional<Finiteness> override_either(const DiffusionSpec& p, const DiffusionSpec& q, Boundary b,
                                          OverrideQuantity qty) {
    if (auto v = p.override_for(b, qty)) return v;
    return q.override_for(b, qty);
}

void add(PointClass& pc, Reason r) {
    if (!pc.has(r)) pc.reasons.push_back(r);
    pc.separating = true;
}

struct Neighbours {
    double lo, hi;
};

Neighbours neighbours(const std::vector<double>& crit, double x, double l, double r) {
    Neighbours n{l, r};
    for (double c : crit) {
        if (c < x) n.lo = c;
        if (c > x) {
            n.hi = c;
            break;
        }
    }
    return n;
}

bool is_reflecting(const BoundaryReport& rep) { return rep.accessible && std::isfinite(rep.atom_mass); }

std::string fmt_point(double x) {
    if (x == INFINITY) return "inf";
    if (x == -INFINITY) return "-inf";
    std::ostringstream os;
    os.precision(12);
    os << x;
    return os.str();
}

}  // namespace

RatioProfile ratio_profile(const DiffusionSpec& p, const DiffusionSpec& q, double a, double b) {
    require_shared_interior(p, q);
    if (!(a < b) || a < p.space.l || b > p.space.r) throw DomainMismatch("ratio interval must lie inside the state space");
    RatioProfile prof{a, b, {}, {}, {}};
    std::vector<double> nodes{a};
    for (double c : merged_critical_points(p, q))
        if (c > a && c < b) nodes.push_back(c);
    nodes.push_back(b);
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        PieceExprs e = piece_on(p, q, nodes[i], nodes[i + 1]);
        prof.pieces.push_back({nodes[i], nodes[i + 1], e.rho, fold_constants(e.drho / e.sp), fold_constants(e.mp / e.mq)});
    }
    for (std::size_t i = 1; i + 1 < nodes.size(); ++i) {
        double x = nodes[i];
        Limit left = limit_of(prof.pieces[i - 1].rho, x, Side::Left);
        Limit right = limit_of(prof.pieces[i].rho, x, Side::Right);
        double tol = left.fitted || right.fitted ? kFitTol : kTol;
        if (!settle(compare(left.value, right.value, tol), x, "ratio continuity")) prof.kinks.push_back(x);
        double ma = p.atom_mass(x), mb = q.atom_mass(x);
        if (ma > 0 || mb > 0) prof.atoms.push_back({x, ma, mb});
    }
    return prof;
}

PointClass classify_interior(const DiffusionSpec& p, const DiffusionSpec& q, double x) {
    require_shared_interior(p, q);
    if (!(x > p.space.l && x < p.space.r)) throw DomainMismatch("interior classification needs an interior point");
    PointClass pc{x, false, {}};
    auto crit = merged_critical_points(p, q);
    Neighbours nb = neighbours(crit, x, p.space.l, p.space.r);
    bool critical = std::binary_search(crit.begin(), crit.end(), x);

    PieceExprs left = piece_on(p, q, nb.lo, critical ? x : nb.hi);
    PieceExprs right = critical ? piece_on(p, q, x, nb.hi) : left;
    if (!piece_product_good(left, nb.lo, critical ? x : nb.hi)) add(pc, Reason::SpeedScaleProductNotOne);
    if (critical && !piece_product_good(right, x, nb.hi)) add(pc, Reason::SpeedScaleProductNotOne);

    // (i) ratio continuous and positive-finite at x.
    Limit rl = limit_of(left.rho, x, Side::Left);
    Limit rr = limit_of(right.rho, x, Side::Right);
    if (!positive_finite(rl.value) || !positive_finite(rr.value)) {
        add(pc, Reason::RatioKink);
    } else if (critical) {
        double tol = rl.fitted || rr.fitted ? kFitTol : kTol;
        if (!settle(compare(rl.value, rr.value, tol), x, "ratio continuity")) add(pc, Reason::RatioKink);
    }

    // (ii) beta^2 integrable against dS~ on both sides.
    if (critical) {
        auto gl = [&left](double z) { return left.beta_sq_weight(z); };
        auto gr = [&right](double z) { return right.beta_sq_weight(z); };
        if (!tail_finite(gl, x, Side::Left, std::nullopt) || !tail_finite(gr, x, Side::Right, std::nullopt))
            add(pc, Reason::BetaNotL2);
    }

    // (iii) speed ratio times the right ratio equals one at x.
    if (critical && positive_finite(rr.value)) {
        double ap = p.atom_mass(x), aq = q.atom_mass(x);
        double tol = rr.fitted ? kFitTol : kTol;
        if (ap > 0 || aq > 0) {
            if (!(ap > 0 && aq > 0) || !settle(compare(ap / aq * rr.value, 1.0, tol), x, "atom ratio"))
                add(pc, Reason::AtomMismatch);
        } else {
            Limit ml = limit_of(left.mp, x, Side::Left), mr = limit_of(right.mp, x, Side::Right);
            Limit nl = limit_of(left.mq, x, Side::Left), nr = limit_of(right.mq, x, Side::Right);
            double num = ml.value + mr.value, den = nl.value + nr.value;
            if (ml.fitted || mr.fitted || nl.fitted || nr.fitted) tol = kFitTol;
            bool ok = std::isfinite(num) && std::isfinite(den) && den > 0 && num > 0;
            if (ok) {
                ok = settle(compare(num / den * rr.value, 1.0, tol), x, "speed-scale product");
            } else if (std::isinf(num) && std::isinf(den)) {
                // Both densities blow up: the ratio of the densities carries the limit.
                Limit dl = limit_of(fold_constants(right.mp / right.mq), x, Side::Right);
                ok = positive_finite(dl.value) && settle(compare(dl.value * rr.value, 1.0, kFitTol), x, "speed-scale product");
            }
            if (!ok) add(pc, Reason::SpeedScaleProductNotOne);
        }
    }
    return pc;
}

PointClass classify_boundary_pair(const DiffusionSpec& p, const DiffusionSpec& q, Boundary b) {
    require_shared_interior(p, q);
    double pt = p.endpoint(b);
    PointClass pc{pt, false, {}};
    const Side inward = b == Boundary::L ? Side::Right : Side::Left;

    BoundaryReport rp = classify_boundary(p, b);
    BoundaryReport rq = classify_boundary(q, b);
    // (0) scale limits and accessibility.
    if (std::isinf(rp.scale_limit) || std::isinf(rq.scale_limit)) add(pc, Reason::ScaleLimitInfinite);
    if (rp.accessible != rq.accessible) add(pc, Reason::AccessibilityMismatch);
    if (pc.separating) return pc;

    // (1) the adjacent piece consists of good points.
    auto crit = merged_critical_points(p, q);
    double inner = b == Boundary::L ? (crit.empty() ? p.space.r : crit.front()) : (crit.empty() ? p.space.l : crit.back());
    double lo = std::min(pt, inner), hi = std::max(pt, inner);
    PieceExprs e = piece_on(p, q, lo, hi);
    if (!piece_product_good(e, lo, hi)) {
        add(pc, Reason::SpeedScaleProductNotOne);
        return pc;
    }

    // (2) half-good integral.
    detail::Cumulative sq_from_b(q, q.scale.density, pt, q.override_for(Boundary::L, OverrideQuantity::Scale),
                                 q.override_for(Boundary::R, OverrideQuantity::Scale));
    auto half = [&](double z) { return std::fabs(sq_from_b(z)) * e.beta_sq_weight(z); };
    if (!tail_finite(half, pt, inward, override_either(p, q, b, OverrideQuantity::HalfGood))) {
        add(pc, Reason::HalfGoodIntegralDiverges);
        return pc;
    }
    if (!rp.accessible) return pc;

    // (3) matching behaviour at an accessible boundary.
    bool abs_p = std::isinf(rp.atom_mass), abs_q = std::isinf(rq.atom_mass);
    if (abs_p != abs_q) {
        add(pc, Reason::BoundaryBehaviorMismatch);
        return pc;
    }
    if (abs_p) return pc;

    // (4) both reflecting.
    Limit rho_b = limit_of(e.rho, pt, inward);
    if (!positive_finite(rho_b.value)) {
        add(pc, Reason::DerivativeQuotientAtBoundaryFails);
        return pc;
    }
    auto beta_sq = [&e](double z) { return e.beta_sq_weight(z); };
    if (!tail_finite(beta_sq, pt, inward, override_either(p, q, b, OverrideQuantity::BetaL2))) add(pc, Reason::BetaNotL2);

    double ap = rp.atom_mass, aq = rq.atom_mass;
    bool ok;
    if (ap > 0 && aq > 0) {
        ok = settle(compare(ap / aq * rho_b.value, 1.0, rho_b.fitted ? kFitTol : kTol), pt, "boundary product");
    } else if (ap > 0 || aq > 0) {
        ok = false;
    } else {
        Limit ratio = limit_of(fold_constants(e.mp / e.mq), pt, inward);
        double tol = ratio.fitted || rho_b.fitted ? kFitTol : kTol;
        ok = positive_finite(ratio.value) && settle(compare(ratio.value * rho_b.value, 1.0, tol), pt, "boundary product");
    }
    if (!ok) add(pc, Reason::BoundaryProductNotOne);
    return pc;
}

namespace {

struct Analysis {
    SeparatingSet A;
    std::vector<PointClass> points;
};

Analysis analyze(const DiffusionSpec& p, const DiffusionSpec& q) {
    require_shared_interior(p, q);
    Analysis out;
    std::vector<Interval> parts;
    double l = p.space.l, r = p.space.r;

    PointClass bl = classify_boundary_pair(p, q, Boundary::L);
    out.points.push_back(bl);
    if (bl.separating) parts.push_back({l, l});

    auto crit = merged_critical_points(p, q);
    std::vector<double> nodes{l};
    nodes.insert(nodes.end(), crit.begin(), crit.end());
    nodes.push_back(r);
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        if (i > 0) {
            PointClass pc = classify_interior(p, q, nodes[i]);
            out.points.push_back(pc);
            if (pc.separating) parts.push_back({nodes[i], nodes[i]});
        }
        double lo = nodes[i], hi = nodes[i + 1];
        if (!piece_product_good(piece_on(p, q, lo, hi), lo, hi)) {
            PointClass w{finite_mid(lo, hi), true, {Reason::SpeedScaleProductNotOne}};
            out.points.push_back(w);
            parts.push_back({lo, hi});
        }
    }

    PointClass br = classify_boundary_pair(p, q, Boundary::R);
    out.points.push_back(br);
    if (br.separating) parts.push_back({r, r});

    std::sort(parts.begin(), parts.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    for (const auto& iv : parts) {
        if (!out.A.components.empty() && iv.lo <= out.A.components.back().hi)
            out.A.components.back().hi = std::max(out.A.components.back().hi, iv.hi);
        else
            out.A.components.push_back(iv);
    }
    return out;
}

bool densities_match(const Piecewise& a, const Piecewise& b, double k, double l, double r,
                     const std::vector<double>& nodes_in) {
    std::vector<double> nodes{l};
    nodes.insert(nodes.end(), nodes_in.begin(), nodes_in.end());
    nodes.push_back(r);
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        double mid = finite_mid(nodes[i], nodes[i + 1]);
        const Expr& ea = a.at(mid);
        Expr eb = fold_constants(Expr::constant(k) * b.at(mid));
        if (fold_constants(ea) == eb) continue;
        for (double z : sample_points(nodes[i], nodes[i + 1], 64)) {
            double va = evaluate_raw(ea, z), vb = evaluate_raw(eb, z);
            if (!std::isfinite(va) || !std::isfinite(vb)) continue;
            if (compare(va, vb, kTol) != Cmp::Equal) return false;
        }
    }
    return true;
}

// Probability under spec, started at x0, that the path approaches target
// (which lies on side `toward`) while no separating point lies on the other side.
double approach_probability(const DiffusionSpec& spec, double x0, double target, Boundary toward) {
    Boundary away = toward == Boundary::R ? Boundary::L : Boundary::R;
    double e = spec.endpoint(away);
    BoundaryReport rep = classify_boundary(spec, away);
    if (x0 == e) return std::isinf(rep.atom_mass) ? 0.0 : 1.0;
    if (is_reflecting(rep) || std::isinf(rep.scale_limit)) return 1.0;
    double total = toward == Boundary::R ? scale_increment(spec, e, target) : scale_increment(spec, target, e);
    if (std::isinf(total)) return 0.0;
    double part = toward == Boundary::R ? scale_increment(spec, e, x0) : scale_increment(spec, x0, e);
    return part / total;
}

// Absolute continuity of the first law with respect to the
// second, given the separating set.
bool abs_continuous(const DiffusionSpec& first, const SeparatingSet& A, bool good_l, bool good_r) {
    for (const auto& c : A.components)
        if (c.hi > first.space.l && c.lo < first.space.r) return false;
    double sl = scale_at(first, first.space.l), sr = scale_at(first, first.space.r);
    bool ok_l = good_l || (std::isinf(sl) && good_r);
    bool ok_r = good_r || (std::isinf(sr) && good_l);
    if (!ok_l || !ok_r) return false;
    if (good_l && good_r) {
        bool refl_l = is_reflecting(classify_boundary(first, Boundary::L));
        bool refl_r = is_reflecting(classify_boundary(first, Boundary::R));
        if (refl_l && refl_r) return false;
    }
    return true;
}

bool in_state(const DiffusionSpec& s, double x) {
    if (x > s.space.l && x < s.space.r) return true;
    return (x == s.space.l && s.space.l_closed) || (x == s.space.r && s.space.r_closed);
}

bool loc_abs_continuous(const DiffusionSpec& first, const SeparatingSet& A) {
    for (const auto& c : A.components) {
        if (c.hi > first.space.l && c.lo < first.space.r) return false;
        if (in_state(first, c.lo) || in_state(first, c.hi)) return false;
    }
    return true;
}

}  // namespace

SeparatingSet separating_set(const DiffusionSpec& p, const DiffusionSpec& q) { return analyze(p, q).A; }

bool diffusions_identical(const DiffusionSpec& p, const DiffusionSpec& q) {
    if (p.space.l != q.space.l || p.space.r != q.space.r || p.space.l_closed != q.space.l_closed ||
        p.space.r_closed != q.space.r_closed)
        return false;
    double c = p.reference_point();
    double k = p.scale.density(c) / q.scale.density(c);
    if (!positive_finite(k)) return false;
    auto nodes = merged_critical_points(p, q);
    if (!densities_match(p.scale.density, q.scale.density, k, p.space.l, p.space.r, nodes)) return false;
    if (!densities_match(p.speed.density, q.speed.density, 1.0 / k, p.space.l, p.space.r, nodes)) return false;

    auto atom_locations = [](const DiffusionSpec& s) {
        std::vector<double> xs;
        for (const auto& a : s.speed.atoms)
            if (a.mass > 0) xs.push_back(a.location);
        std::sort(xs.begin(), xs.end());
        xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
        return xs;
    };
    auto locs = atom_locations(p);
    if (locs != atom_locations(q)) return false;
    for (double x : locs) {
        double mp = p.atom_mass(x), mq = q.atom_mass(x);
        if (std::isinf(mp) || std::isinf(mq)) {
            if (mp != mq) return false;
        } else if (compare(mp, mq / k, kTol) != Cmp::Equal) {
            return false;
        }
    }
    return true;
}

AsymptoticBehavior asymptotic_behavior(const DiffusionSpec& spec, double x0) {
    if (!(x0 > spec.space.l && x0 < spec.space.r)) throw DomainMismatch("start point must be interior");
    AsymptoticBehavior out{};
    out.scale_l = scale_at(spec, spec.space.l);
    out.scale_r = scale_at(spec, spec.space.r);
    bool inf_l = std::isinf(out.scale_l), inf_r = std::isinf(out.scale_r);
    if (inf_l && inf_r) {
        out.regime = 1;
        out.oscillates = true;
    } else if (!inf_l && inf_r) {
        out.regime = 2;
        out.prob_l = 1.0;
    } else if (inf_l) {
        out.regime = 3;
        out.prob_r = 1.0;
    } else {
        out.regime = 4;
        double down = scale_increment(spec, x0, spec.space.r);
        double total = scale_increment(spec, spec.space.l, spec.space.r);
        out.prob_l = down / total;
        out.prob_r = 1.0 - out.prob_l;
    }
    auto recurrent_at = [&](Boundary b, bool inf) { return inf || is_reflecting(classify_boundary(spec, b)); };
    out.recurrent = recurrent_at(Boundary::L, inf_l) && recurrent_at(Boundary::R, inf_r);
    return out;
}

SeparationReport separation_report(const DiffusionSpec& p, const DiffusionSpec& q, double x0) {
    require_shared_interior(p, q);
    if (!in_state(p, x0) || !in_state(q, x0)) throw DomainMismatch("start point must lie in both state spaces");
    SeparationReport rep;
    rep.identical = diffusions_identical(p, q);
    Analysis an = analyze(p, q);
    rep.A = an.A;
    rep.points = an.points;

    for (const auto& c : rep.A.components) {
        if (c.lo <= x0) rep.alpha = std::max(rep.alpha.value_or(-INFINITY), std::min(c.hi, x0));
        if (c.hi >= x0 && !rep.gamma) rep.gamma = std::max(c.lo, x0);
    }
    auto descriptor = [&](const std::optional<double>& pt, const char* bound) {
        TimeDescriptor d;
        if (!pt) return d;
        if (*pt == x0) {
            d.kind = TimeKind::Zero;
            d.point = x0;
            return d;
        }
        d.kind = TimeKind::HittingTime;
        d.point = *pt;
        d.note = std::string("T_") + fmt_point(*pt) + " on paths whose " + bound + " as t increases to T_" +
                 fmt_point(*pt) + " equals " + fmt_point(*pt) + ", otherwise delta";
        return d;
    };
    rep.U = descriptor(rep.alpha, "liminf");
    rep.V = descriptor(rep.gamma, "limsup");

    BoundaryReport pl = classify_boundary(p, Boundary::L), pr = classify_boundary(p, Boundary::R);
    rep.R_infinite = !rep.alpha && !rep.gamma && is_reflecting(pl) && is_reflecting(pr);

    bool in_A = rep.A.contains(x0);
    if (rep.identical) {
        rep.S_structure = "δ";
    } else if (in_A) {
        rep.S_structure = "0";
    } else {
        // A hitting time of a boundary that neither law reaches is infinite,
        // so it is left out of the minimum when a finite term remains.
        auto unreachable = [&](double pt, Boundary b) {
            return pt == p.endpoint(b) && !classify_boundary(p, b).accessible && !classify_boundary(q, b).accessible;
        };
        bool drop_a = rep.alpha && unreachable(*rep.alpha, Boundary::L);
        bool drop_g = rep.gamma && unreachable(*rep.gamma, Boundary::R);
        if (drop_a && drop_g) drop_a = drop_g = false;
        if (drop_a && !rep.gamma) drop_a = false;
        if (drop_g && !rep.alpha) drop_g = false;
        std::vector<std::string> parts;
        if (rep.alpha && !drop_a) parts.push_back("T_" + fmt_point(*rep.alpha));
        if (rep.gamma && !drop_g) parts.push_back("T_" + fmt_point(*rep.gamma));
        if (rep.R_infinite) parts.push_back("∞");
        if (parts.empty()) {
            rep.S_structure = "δ";
        } else {
            rep.S_structure = parts[0];
            for (std::size_t i = 1; i < parts.size(); ++i) rep.S_structure += " ∧ " + parts[i];
        }
    }

    Verdicts& v = rep.verdicts;
    if (rep.identical) {
        v.p_ll_loc_q = v.q_ll_loc_p = v.p_ll_q = v.q_ll_p = v.equivalent = true;
        v.singular = Tri::No;
        rep.notes.push_back("laws coincide; separating time is delta");
        return rep;
    }
    bool good_l = !rep.A.contains(p.space.l), good_r = !rep.A.contains(p.space.r);
    v.p_ll_loc_q = loc_abs_continuous(p, rep.A);
    v.q_ll_loc_p = loc_abs_continuous(q, rep.A);
    v.p_ll_q = abs_continuous(p, rep.A, good_l, good_r);
    v.q_ll_p = abs_continuous(q, rep.A, good_l, good_r);
    v.equivalent = v.p_ll_q && v.q_ll_p;
    v.singular_f0 = in_A;

    if (in_A || rep.R_infinite || (rep.alpha && rep.gamma)) {
        v.prob_singular_p = v.prob_singular_q = 1.0;
    } else if (rep.gamma) {
        v.prob_singular_p = approach_probability(p, x0, *rep.gamma, Boundary::R);
        v.prob_singular_q = approach_probability(q, x0, *rep.gamma, Boundary::R);
    } else if (rep.alpha) {
        v.prob_singular_p = approach_probability(p, x0, *rep.alpha, Boundary::L);
        v.prob_singular_q = approach_probability(q, x0, *rep.alpha, Boundary::L);
    }
    if (v.prob_singular_p == 1.0 || v.prob_singular_q == 1.0)
        v.singular = Tri::Yes;
    else if (v.prob_singular_p == 0.0 && v.prob_singular_q == 0.0)
        v.singular = Tri::No;
    else
        v.singular = Tri::Mixed;
    if (v.singular == Tri::Mixed)
        rep.notes.push_back("singularity holds only on the event that the path approaches the nearest separating point");
    if (rep.U.kind == TimeKind::HittingTime || rep.V.kind == TimeKind::HittingTime)
        rep.notes.push_back("hitting-time descriptors equal delta on paths that never approach the point");
    return rep;
}

}  // namespace sepdiff
