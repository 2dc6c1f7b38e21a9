#include "sepdiff/diffusion_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "model_internal.hpp"
#include "sepdiff/errors.hpp"

namespace sepdiff {

std::string to_string(Boundary b) { return b == Boundary::L ? "l" : "r"; }

std::string to_string(OverrideQuantity q) {
    switch (q) {
        case OverrideQuantity::Scale: return "scale";
        case OverrideQuantity::Speed: return "speed";
        case OverrideQuantity::U: return "u";
        case OverrideQuantity::V: return "v";
        case OverrideQuantity::Accessibility: return "accessibility";
        case OverrideQuantity::HalfGood: return "half_good";
        case OverrideQuantity::BetaL2: return "beta_l2";
    }
    return "?";
}

std::optional<OverrideQuantity> override_quantity_from_string(const std::string& s) {
    for (auto q : {OverrideQuantity::Scale, OverrideQuantity::Speed, OverrideQuantity::U, OverrideQuantity::V,
                   OverrideQuantity::Accessibility, OverrideQuantity::HalfGood, OverrideQuantity::BetaL2})
        if (to_string(q) == s) return q;
    return std::nullopt;
}

std::string to_string(BoundaryKind k) {
    switch (k) {
        case BoundaryKind::Regular: return "Regular";
        case BoundaryKind::Exit: return "Exit";
        case BoundaryKind::Entrance: return "Entrance";
        case BoundaryKind::Natural: return "Natural";
    }
    return "?";
}

std::string to_string(BoundaryBehavior b) {
    switch (b) {
        case BoundaryBehavior::Absorbing: return "Absorbing";
        case BoundaryBehavior::SlowlyReflecting: return "SlowlyReflecting";
        case BoundaryBehavior::InstantaneouslyReflecting: return "InstantaneouslyReflecting";
        case BoundaryBehavior::NotApplicable: return "NotApplicable";
    }
    return "?";
}

std::size_t Piecewise::index(double x, Side side) const {
    auto it = side == Side::Right ? std::upper_bound(breakpoints.begin(), breakpoints.end(), x)
                                  : std::lower_bound(breakpoints.begin(), breakpoints.end(), x);
    return static_cast<std::size_t>(it - breakpoints.begin());
}

double DiffusionSpec::atom_mass(double x) const {
    double m = 0.0;
    for (const auto& a : speed.atoms)
        if (a.location == x) m += a.mass;
    return m;
}

std::optional<Finiteness> DiffusionSpec::override_for(Boundary b, OverrideQuantity q) const {
    for (const auto& o : speed.overrides)
        if (o.boundary == b && o.quantity == q) return o.verdict;
    return std::nullopt;
}

std::vector<double> DiffusionSpec::critical_points() const {
    std::vector<double> pts;
    auto interior = [&](double x) { return x > space.l && x < space.r; };
    for (double b : scale.density.breakpoints)
        if (interior(b)) pts.push_back(b);
    for (double b : speed.density.breakpoints)
        if (interior(b)) pts.push_back(b);
    for (const auto& a : speed.atoms)
        if (interior(a.location)) pts.push_back(a.location);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

double DiffusionSpec::reference_point() const {
    bool lf = std::isfinite(space.l), rf = std::isfinite(space.r);
    if (lf && rf) return 0.5 * (space.l + space.r);
    if (lf) return space.l + 1.0;
    if (rf) return space.r - 1.0;
    return 0.0;
}

namespace detail {

double finite_mid(double u, double v) {
    if (std::isfinite(u) && std::isfinite(v)) return 0.5 * (u + v);
    if (std::isfinite(u)) return u + std::max(1.0, std::fabs(u));
    if (std::isfinite(v)) return v - std::max(1.0, std::fabs(v));
    return 0.0;
}

namespace {

Method stronger(Method a, Method b) {
    auto rank = [](Method m) { return m == Method::Override ? 2 : m == Method::ExponentFit ? 1 : 0; };
    return rank(a) >= rank(b) ? a : b;
}

}  // namespace

IntegralVerdict integrate_piecewise(const Piecewise& dens, const Weight& weight, double a, double b,
                                    EndpointSpec at_a, EndpointSpec at_b) {
    if (a == b) return {0.0, true, Method::Quadrature};
    if (a > b) {
        IntegralVerdict v = integrate_piecewise(dens, weight, b, a, at_b, at_a);
        v.value = -v.value;
        return v;
    }
    std::vector<double> nodes{a};
    for (double bp : dens.breakpoints)
        if (bp > a && bp < b) nodes.push_back(bp);
    nodes.push_back(b);

    IntegralVerdict total{0.0, true, Method::Quadrature};
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        double u = nodes[i], v = nodes[i + 1];
        const Expr& piece = dens.at(finite_mid(u, v));
        Integrand f = [&piece, &weight](double y) {
            double d = evaluate_raw(piece, y);
            return weight ? weight(y) * d : d;
        };
        EndpointSpec su = i == 0 ? at_a : EndpointSpec{};
        EndpointSpec sv = i + 2 == nodes.size() ? at_b : EndpointSpec{};
        if (!su.singular && !std::isfinite(f(u))) su.singular = true;
        if (!sv.singular && !std::isfinite(f(v))) sv.singular = true;
        IntegralVerdict part = improper_integral(f, u, v, su, sv);
        total.method = stronger(total.method, part.method);
        if (!part.finite) return {INFINITY, false, total.method};
        total.value += part.value;
    }
    return total;
}

Cumulative::Cumulative(const DiffusionSpec& spec, const Piecewise& dens, double origin,
                       std::optional<Finiteness> ov_l, std::optional<Finiteness> ov_r)
    : dens_(dens), l_(spec.space.l), r_(spec.space.r), ov_l_(ov_l), ov_r_(ov_r) {
    knots_[origin] = 0.0;
}

double Cumulative::between(double a, double b) {
    auto spec_for = [&](double p) {
        if (p == l_) return EndpointSpec{true, ov_l_};
        if (p == r_) return EndpointSpec{true, ov_r_};
        return EndpointSpec{};
    };
    return integrate_piecewise(dens_, {}, a, b, spec_for(a), spec_for(b)).value;
}

double Cumulative::operator()(double x) {
    if (auto it = knots_.find(x); it != knots_.end()) return it->second;
    auto hi = knots_.lower_bound(x);
    const std::pair<const double, double>* best = nullptr;
    auto consider = [&](std::map<double, double>::iterator it) {
        if (!std::isfinite(it->second)) return;
        if (!best || std::fabs(it->first - x) < std::fabs(best->first - x)) best = &*it;
    };
    if (hi != knots_.end()) consider(hi);
    if (hi != knots_.begin()) consider(std::prev(hi));
    if (!best) {
        for (auto it = knots_.begin(); it != knots_.end(); ++it) consider(it);
    }
    if (!best) throw InternalInconsistency("cumulative integral has no finite knot");
    double val = best->second + between(best->first, x);
    knots_[x] = val;
    return val;
}

std::vector<double> sample_points(double u, double w, int n) {
    std::vector<double> xs;
    xs.reserve(n);
    for (int k = 0; k < n; ++k) {
        double t = (k + 0.5) / n;
        double x;
        if (std::isfinite(u) && std::isfinite(w))
            x = u + (w - u) * t;
        else if (std::isfinite(u))
            x = u + t / (1.0 - t);
        else if (std::isfinite(w))
            x = w - (1.0 - t) / t;
        else
            x = std::tan(M_PI * (t - 0.5));
        xs.push_back(x);
    }
    return xs;
}

bool is_boundary(const DiffusionSpec& spec, double x) { return x == spec.space.l || x == spec.space.r; }

EndpointSpec endpoint_spec(const DiffusionSpec& spec, double x, OverrideQuantity q) {
    if (x == spec.space.l) return {true, spec.override_for(Boundary::L, q)};
    if (x == spec.space.r) return {true, spec.override_for(Boundary::R, q)};
    return {};
}

double atom_sum(const DiffusionSpec& spec, double a, double b, bool include_a, bool include_b) {
    double total = 0.0;
    for (const auto& at : spec.speed.atoms) {
        double x = at.location;
        bool in = (x > a && x < b) || (x == a && include_a) || (x == b && include_b);
        if (in) total += at.mass;
    }
    return total;
}

}  // namespace detail

using detail::atom_sum;
using detail::Cumulative;
using detail::endpoint_spec;
using detail::integrate_piecewise;

double scale_increment(const DiffusionSpec& spec, double a, double b) {
    return integrate_piecewise(spec.scale.density, {}, a, b, endpoint_spec(spec, a, OverrideQuantity::Scale),
                               endpoint_spec(spec, b, OverrideQuantity::Scale))
        .value;
}

double scale_at(const DiffusionSpec& spec, double x) {
    return spec.scale.anchor_value + scale_increment(spec, spec.scale.anchor_point, x);
}

IntegralVerdict speed_of(const DiffusionSpec& spec, double a, double b, bool include_a, bool include_b) {
    IntegralVerdict dens = integrate_piecewise(spec.speed.density, {}, a, b, endpoint_spec(spec, a, OverrideQuantity::Speed),
                                               endpoint_spec(spec, b, OverrideQuantity::Speed));
    if (!dens.finite) return dens;
    double atoms = atom_sum(spec, a, b, include_a, include_b);
    if (std::isinf(atoms)) return {INFINITY, false, dens.method};
    dens.value += atoms;
    return dens;
}

double green_kernel(const DiffusionSpec& spec, double a, double b, double x, double y) {
    if (!(x > a && x < b && y > a && y < b)) return 0.0;
    double lo = std::min(x, y), hi = std::max(x, y);
    double left = scale_increment(spec, a, lo);
    double right = scale_increment(spec, hi, b);
    double total = scale_increment(spec, a, b);
    if (std::isfinite(total)) return 2.0 * left * right / total;
    // One scale end infinite: the kernel tends to twice the finite factor.
    if (std::isinf(left) && std::isinf(right)) return INFINITY;
    return 2.0 * (std::isinf(left) ? right : left);
}

double hitting_probability(const DiffusionSpec& spec, double a, double x, double b) {
    double up = scale_increment(spec, a, x);
    double down = scale_increment(spec, x, b);
    if (std::isinf(up) && std::isinf(down)) return NAN;
    if (std::isinf(up)) return 1.0;
    if (std::isinf(down)) return 0.0;
    return up / (up + down);
}

IntegralVerdict expected_exit_time(const DiffusionSpec& spec, double a, double x, double b) {
    if (!(a < x && x < b)) return {0.0, true, Method::Quadrature};
    double sa_x = scale_increment(spec, a, x);
    double sx_b = scale_increment(spec, x, b);
    if (!std::isfinite(sa_x) || !std::isfinite(sx_b))
        throw DomainMismatch("exit interval must have finite scale at both ends");
    double total = sa_x + sx_b;
    Cumulative from_a(spec, spec.scale.density, a, spec.override_for(Boundary::L, OverrideQuantity::Scale),
                      spec.override_for(Boundary::R, OverrideQuantity::Scale));
    Cumulative from_b(spec, spec.scale.density, b, spec.override_for(Boundary::L, OverrideQuantity::Scale),
                      spec.override_for(Boundary::R, OverrideQuantity::Scale));
    EndpointSpec ea{detail::is_boundary(spec, a), std::nullopt};
    EndpointSpec eb{detail::is_boundary(spec, b), std::nullopt};
    IntegralVerdict left = integrate_piecewise(spec.speed.density, [&](double y) { return from_a(y); }, a, x, ea, {});
    IntegralVerdict right = integrate_piecewise(spec.speed.density, [&](double y) { return -from_b(y); }, x, b, {}, eb);
    Method method = left.method == Method::Quadrature ? right.method : left.method;
    if (!left.finite || !right.finite) return {INFINITY, false, method};
    double value = 2.0 / total * (sx_b * left.value + sa_x * right.value);
    for (const auto& at : spec.speed.atoms) {
        if (at.location > a && at.location < b) {
            if (std::isinf(at.mass)) return {INFINITY, false, method};
            value += green_kernel(spec, a, b, x, at.location) * at.mass;
        }
    }
    return {value, true, method};
}

namespace {

struct Segment {
    IntegralVerdict u;
    IntegralVerdict v;
};

// u and v accumulated from reference c toward end (a boundary or an interior
// point). v covers the open interval between c and end.
Segment uv_segment(const DiffusionSpec& spec, double c, double end, Boundary side) {
    bool right = side == Boundary::R;
    bool at_boundary = detail::is_boundary(spec, end);
    Boundary b = side;
    EndpointSpec eu = at_boundary ? EndpointSpec{true, spec.override_for(b, OverrideQuantity::U)} : EndpointSpec{};
    EndpointSpec ev = at_boundary ? EndpointSpec{true, spec.override_for(b, OverrideQuantity::V)} : EndpointSpec{};

    Cumulative mass(spec, spec.speed.density, c);
    Cumulative scale(spec, spec.scale.density, c);
    // Speed mass between c and z: (c, z] on the right, [z, c) on the left.
    auto m_between = [&](double z) {
        double dens = right ? mass(z) : -mass(z);
        return dens + (right ? atom_sum(spec, c, z, false, true) : atom_sum(spec, z, c, true, false));
    };
    auto s_between = [&](double y) { return right ? scale(y) : -scale(y); };

    Segment seg;
    if (right) {
        seg.u = integrate_piecewise(spec.scale.density, m_between, c, end, {}, eu);
        seg.v = integrate_piecewise(spec.speed.density, s_between, c, end, {}, ev);
    } else {
        seg.u = integrate_piecewise(spec.scale.density, m_between, end, c, eu, {});
        seg.v = integrate_piecewise(spec.speed.density, s_between, end, c, ev, {});
    }
    if (seg.v.finite) {
        for (const auto& at : spec.speed.atoms) {
            double x = at.location;
            bool inside = right ? (x > c && x < end) : (x > end && x < c);
            if (!inside) continue;
            if (std::isinf(at.mass)) {
                seg.v = {INFINITY, false, seg.v.method};
                break;
            }
            seg.v.value += s_between(x) * at.mass;
        }
    }
    return seg;
}

bool close_rel(double a, double b, double tol) {
    return std::fabs(a - b) <= tol * std::max({std::fabs(a), std::fabs(b), 1e-300});
}

}  // namespace

UVValues uv_values(const DiffusionSpec& spec, Boundary b) {
    double end = spec.endpoint(b);
    double c1 = spec.reference_point();
    bool right = b == Boundary::R;
    double c2;
    if (std::isfinite(end))
        c2 = c1 + 0.5 * (end - c1);
    else
        c2 = right ? c1 + 1.0 : c1 - 1.0;

    Segment whole = uv_segment(spec, c1, end, b);
    Segment outer = uv_segment(spec, c2, end, b);
    Segment inner = uv_segment(spec, c1, c2, b);

    if (whole.u.finite != outer.u.finite || whole.v.finite != outer.v.finite)
        throw InternalInconsistency("u/v finiteness depends on the reference point at " + to_string(b));

    // Shift identities relating the two reference points.
    double ds_outer = right ? scale_increment(spec, c2, end) : scale_increment(spec, end, c2);
    double ds_inner = right ? scale_increment(spec, c1, c2) : scale_increment(spec, c2, c1);
    double m_inner = right ? speed_of(spec, c1, c2, false, true).value : speed_of(spec, c2, c1, true, false).value;
    if (whole.u.finite) {
        double predicted = inner.u.value + outer.u.value + m_inner * ds_outer;
        if (!close_rel(whole.u.value, predicted, 1e-6))
            throw InternalInconsistency("u at " + to_string(b) + " disagrees between reference points");
    }
    if (whole.v.finite) {
        IntegralVerdict m_outer = right ? speed_of(spec, c2, end, false, false) : speed_of(spec, end, c2, false, false);
        double at_c2 = spec.atom_mass(c2) * ds_inner;
        double predicted = inner.v.value + at_c2 + outer.v.value + ds_inner * m_outer.value;
        if (!m_outer.finite || !close_rel(whole.v.value, predicted, 1e-6))
            throw InternalInconsistency("v at " + to_string(b) + " disagrees between reference points");
    }
    return {whole.u, whole.v, c1};
}

IntegralVerdict accessibility_integral(const DiffusionSpec& spec, Boundary b) {
    double end = spec.endpoint(b);
    auto ov = spec.override_for(b, OverrideQuantity::Accessibility);
    double sb = scale_at(spec, end);
    if (!std::isfinite(sb)) return {INFINITY, false, ov ? Method::Override : Method::ExponentFit};
    double c = spec.reference_point();
    Cumulative from_end(spec, spec.scale.density, end, spec.override_for(Boundary::L, OverrideQuantity::Scale),
                        spec.override_for(Boundary::R, OverrideQuantity::Scale));
    auto dist = [&](double z) { return std::fabs(from_end(z)); };
    IntegralVerdict res = b == Boundary::R
                              ? integrate_piecewise(spec.speed.density, dist, c, end, {}, EndpointSpec{true, ov})
                              : integrate_piecewise(spec.speed.density, dist, end, c, EndpointSpec{true, ov}, {});
    if (!res.finite) return res;
    for (const auto& at : spec.speed.atoms) {
        double x = at.location;
        bool inside = b == Boundary::R ? (x >= c && x < end) : (x > end && x <= c);
        if (inside) res.value += dist(x) * at.mass;
    }
    return res;
}

BoundaryReport classify_boundary(const DiffusionSpec& spec, Boundary b) {
    BoundaryReport rep;
    rep.boundary = b;
    rep.point = spec.endpoint(b);
    UVValues uv = uv_values(spec, b);
    rep.u = uv.u;
    rep.v = uv.v;
    if (uv.u.finite)
        rep.kind = uv.v.finite ? BoundaryKind::Regular : BoundaryKind::Exit;
    else
        rep.kind = uv.v.finite ? BoundaryKind::Entrance : BoundaryKind::Natural;
    rep.accessible = uv.u.finite;
    rep.scale_limit = scale_at(spec, rep.point);
    if (rep.accessible && !std::isfinite(rep.scale_limit))
        throw InternalInconsistency("accessible boundary " + to_string(b) + " with infinite scale limit");

    // Second route to accessibility: finite scale limit and finite weighted speed.
    std::optional<IntegralVerdict> route2;
    try {
        route2 = accessibility_integral(spec, b);
    } catch (const InconclusiveTail&) {
        // Left undecided; the u integral stands alone.
    }
    rep.cross_checked = route2.has_value();
    if (route2 && route2->finite != rep.accessible)
        throw InternalInconsistency("accessibility of " + to_string(b) + " differs between the u integral and the weighted speed integral");

    if (rep.accessible) {
        rep.atom_mass = spec.atom_mass(rep.point);
        if (std::isinf(rep.atom_mass))
            rep.behavior = BoundaryBehavior::Absorbing;
        else if (rep.atom_mass > 0)
            rep.behavior = BoundaryBehavior::SlowlyReflecting;
        else
            rep.behavior = BoundaryBehavior::InstantaneouslyReflecting;
    } else {
        rep.atom_mass = 0.0;
        rep.behavior = BoundaryBehavior::NotApplicable;
    }
    return rep;
}

namespace {

std::string fmt(double x) {
    std::ostringstream os;
    os << x;
    return os.str();
}

void check_piecewise(const DiffusionSpec& spec, const Piecewise& p, const std::string& name, bool strictly_positive,
                     std::vector<Violation>& out) {
    if (p.pieces.size() != p.breakpoints.size() + 1) {
        out.push_back({"MalformedPiecewise", name, "need one piece per gap between breakpoints"});
        return;
    }
    for (std::size_t i = 0; i < p.breakpoints.size(); ++i) {
        double bp = p.breakpoints[i];
        if (!(bp > spec.space.l && bp < spec.space.r) || (i > 0 && !(bp > p.breakpoints[i - 1])))
            out.push_back({"MalformedPiecewise", name + "@" + fmt(bp), "breakpoints must be sorted interior points"});
    }
    for (std::size_t i = 0; i < p.pieces.size(); ++i) {
        double u = i == 0 ? spec.space.l : p.breakpoints[i - 1];
        double w = i == p.breakpoints.size() ? spec.space.r : p.breakpoints[i];
        if (!(u < w)) continue;
        bool any_positive = false;
        for (double x : detail::sample_points(u, w, 64)) {
            double v = evaluate_raw(p.pieces[i], x);
            if (std::isnan(v)) {
                out.push_back({"UndefinedDensity", name + "@" + fmt(x), "density undefined inside its piece"});
                break;
            }
            if (v < 0 || (strictly_positive && v == 0)) {
                out.push_back({strictly_positive ? "NonPositiveScaleDensity" : "NegativeDensity", name + "@" + fmt(x),
                               "density must be " + std::string(strictly_positive ? "> 0" : ">= 0")});
                break;
            }
            if (v > 0) any_positive = true;
        }
        if (!any_positive && !strictly_positive)
            out.push_back({"ZeroDensity", name + " piece " + std::to_string(i), "density vanishes on a whole piece"});
    }
}

void check_local_finiteness(const Piecewise& p, const std::string& name, const std::string& kind,
                            std::vector<Violation>& out) {
    for (std::size_t i = 0; i < p.breakpoints.size(); ++i) {
        double bp = p.breakpoints[i];
        for (Side side : {Side::Left, Side::Right}) {
            const Expr& piece = p.pieces[side == Side::Left ? i : i + 1];
            if (std::isfinite(evaluate_raw(piece, bp))) continue;
            Integrand f = [&piece](double x) { return evaluate_raw(piece, x); };
            if (decide_tail(f, bp, side, std::max(1.0, std::fabs(bp))).finiteness == Finiteness::Infinite) {
                out.push_back({kind, name + "@" + fmt(bp), "density not integrable next to a breakpoint"});
                break;
            }
        }
    }
}

}  // namespace

std::vector<Violation> validate_spec(const DiffusionSpec& spec) {
    std::vector<Violation> out;
    const auto& sp = spec.space;
    if (!(sp.l < sp.r) || std::isnan(sp.l) || std::isnan(sp.r)) {
        out.push_back({"InvalidStateSpace", "space", "need l < r"});
        return out;
    }
    if (sp.l_closed && !std::isfinite(sp.l)) out.push_back({"InvalidStateSpace", "l", "infinite endpoint cannot be closed"});
    if (sp.r_closed && !std::isfinite(sp.r)) out.push_back({"InvalidStateSpace", "r", "infinite endpoint cannot be closed"});

    check_piecewise(spec, spec.scale.density, "scale", true, out);
    check_piecewise(spec, spec.speed.density, "speed", false, out);

    double anchor = spec.scale.anchor_point;
    if (!(anchor >= sp.l && anchor <= sp.r) || !std::isfinite(anchor) || !std::isfinite(spec.scale.anchor_value))
        out.push_back({"InvalidAnchor", "scale.anchor", "anchor must be a finite point of the closure of J"});

    for (const auto& at : spec.speed.atoms) {
        std::string loc = "atom@" + fmt(at.location);
        if (!(at.location >= sp.l && at.location <= sp.r) || !std::isfinite(at.location)) {
            out.push_back({"AtomOutsideState", loc, "atom location outside the closure of J"});
            continue;
        }
        if (!(at.mass > 0)) out.push_back({"NonPositiveAtom", loc, "atom mass must be positive"});
        bool at_l = at.location == sp.l, at_r = at.location == sp.r;
        if ((at_l && !sp.l_closed) || (at_r && !sp.r_closed))
            out.push_back({"BoundaryAtomAtOpenEndpoint", loc, "boundary atoms need a closed endpoint"});
        if (!at_l && !at_r && std::isinf(at.mass))
            out.push_back({"InfiniteInteriorAtom", loc, "interior atoms must have finite mass"});
    }
    if (!out.empty()) return out;

    check_local_finiteness(spec.scale.density, "scale", "ScaleNotLocallyIntegrable", out);
    check_local_finiteness(spec.speed.density, "speed", "SpeedNotLocallyFinite", out);
    if (!out.empty()) return out;

    if (anchor == sp.l || anchor == sp.r) {
        if (!std::isfinite(scale_increment(spec, anchor, spec.reference_point())))
            out.push_back({"InvalidAnchor", "scale.anchor", "scale diverges at the anchoring endpoint"});
        if (!out.empty()) return out;
    }

    for (Boundary b : {Boundary::L, Boundary::R}) {
        BoundaryReport rep = classify_boundary(spec, b);
        double e = spec.endpoint(b);
        std::string loc = to_string(b);
        if (!std::isfinite(e)) {
            if (rep.accessible)
                out.push_back({"AccessibleInfiniteBoundary", loc, "an accessible infinite endpoint is not supported"});
            continue;
        }
        if (rep.accessible != spec.closed(b))
            out.push_back({"AccessibilityMismatch", loc,
                           rep.accessible ? "accessible endpoint must be closed" : "inaccessible endpoint must be open"});
        if (rep.accessible && rep.kind == BoundaryKind::Exit && !std::isinf(spec.atom_mass(e)))
            out.push_back({"ExitBoundaryNotAbsorbing", loc, "an exit boundary needs an infinite atom"});
    }
    return out;
}

}  // namespace sepdiff
