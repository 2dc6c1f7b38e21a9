#include "sepdiff/report_json.hpp"

#include <algorithm>
#include <cmath>

#include "sepdiff/specfile.hpp"

namespace sepdiff {

Json json_number(double x) {
    if (std::isnan(x)) return nullptr;
    if (x == INFINITY) return "inf";
    if (x == -INFINITY) return "-inf";
    return x;
}

Json json_point(const std::optional<double>& x) { return x ? json_number(*x) : Json("none"); }

Json to_json(const IntegralVerdict& v) {
    return Json{{"value", json_number(v.finite ? v.value : INFINITY)},
                {"finite", v.finite},
                {"method", to_string(v.method)}};
}

Json to_json(const BoundaryReport& r) {
    return Json{{"boundary", to_string(r.boundary)},
                {"point", json_number(r.point)},
                {"kind", to_string(r.kind)},
                {"accessible", r.accessible},
                {"behavior", to_string(r.behavior)},
                {"u", to_json(r.u)},
                {"v", to_json(r.v)},
                {"scale_limit", json_number(r.scale_limit)},
                {"atom_mass", json_number(r.atom_mass)},
                {"cross_checked", r.cross_checked}};
}

Json to_json(const Violation& v) { return Json{{"kind", v.kind}, {"location", v.location}, {"message", v.message}}; }

Json to_json(const PointClass& p) {
    Json reasons = Json::array();
    for (Reason r : p.reasons) reasons.push_back(to_string(r));
    return Json{{"point", json_number(p.point)}, {"separating", p.separating}, {"reasons", reasons}};
}

Json to_json(const SeparatingSet& a) {
    Json out = Json::array();
    for (const auto& c : a.components) out.push_back(Json::array({json_number(c.lo), json_number(c.hi)}));
    return out;
}

Json to_json(const TimeDescriptor& t) {
    switch (t.kind) {
        case TimeKind::Delta:
            return Json{{"kind", "delta"}};
        case TimeKind::Zero:
            return Json{{"kind", "zero"}};
        case TimeKind::HittingTime:
            return Json{{"kind", "hitting_time"}, {"point", json_number(t.point)}, {"note", t.note}};
    }
    return nullptr;
}

namespace {

std::string yes_no(bool b) { return b ? "yes" : "no"; }

}  // namespace

Json to_json(const SeparationReport& r) {
    Json points = Json::array();
    for (const auto& p : r.points) points.push_back(to_json(p));
    const Verdicts& v = r.verdicts;
    Json verdicts{{"P_ll_loc_Q", yes_no(v.p_ll_loc_q)},
                  {"Q_ll_loc_P", yes_no(v.q_ll_loc_p)},
                  {"P_ll_Q", yes_no(v.p_ll_q)},
                  {"Q_ll_P", yes_no(v.q_ll_p)},
                  {"equivalent", yes_no(v.equivalent)},
                  {"equivalent_loc", yes_no(v.p_ll_loc_q && v.q_ll_loc_p)},
                  {"singular_on_F0", yes_no(v.singular_f0)},
                  {"singular", to_string(v.singular)},
                  {"prob_S_finite_P", json_number(v.prob_singular_p)},
                  {"prob_S_finite_Q", json_number(v.prob_singular_q)}};
    return Json{{"identical", r.identical},
                {"A", to_json(r.A)},
                {"points", points},
                {"alpha", json_point(r.alpha)},
                {"gamma", json_point(r.gamma)},
                {"U", to_json(r.U)},
                {"V", to_json(r.V)},
                {"R", r.R_infinite ? Json("inf") : Json("none")},
                {"S_structure", r.S_structure},
                {"verdicts", verdicts},
                {"notes", r.notes}};
}

Json to_json(const NflvrReport& r) {
    Json out{{"horizon", to_string(r.horizon)},
             {"verdict", r.verdict()},
             {"verdict_finite_horizon", r.verdict_finite_horizon},
             {"verdict_infinite_horizon", r.verdict_infinite_horizon},
             {"s_infinity", json_number(r.s_infinity)},
             {"cond_b1", {{"pass", r.cond_b1.pass}, {"provenance", r.cond_b1.provenance}}},
             {"cond_b2",
              {{"pass", r.cond_b2.pass}, {"integral", json_number(r.cond_b2.integral)}, {"method", to_string(r.cond_b2.method)}}},
             {"cond_b3",
              {{"pass", r.cond_b3.pass},
               {"scale_clause", r.cond_b3.scale_clause},
               {"integral_clause", r.cond_b3.integral_clause}}}};
    out["elmm"] = r.elmm ? Json(write_spec(*r.elmm)) : Json("none");
    return out;
}

Json to_json(const GridChain& c) {
    return Json{{"nodes", c.size()},
                {"lo", json_number(c.grid.front())},
                {"hi", json_number(c.grid.back())},
                {"lower", to_string(c.lower)},
                {"upper", to_string(c.upper)},
                {"truncated_lower", c.truncated_lower},
                {"truncated_upper", c.truncated_upper},
                {"notes", c.notes}};
}

Json to_json(const MonteCarloEstimate& e) {
    return Json{{"target", e.target},
                {"value", json_number(e.value)},
                {"std_error", json_number(e.std_error)},
                {"n_paths", e.n_paths},
                {"truncated", e.truncated},
                {"truncation_leakage", json_number(e.truncation_leakage)}};
}

Json to_json(const ValidationReport& r) {
    Json checks = Json::array();
    for (const auto& c : r.checks)
        checks.push_back(Json{{"name", c.name},
                              {"target", c.target},
                              {"estimate", json_number(c.estimate)},
                              {"std_error", json_number(c.std_error)},
                              {"oracle", json_number(c.oracle)},
                              {"z", json_number(c.z)},
                              {"pass", c.pass}});
    return Json{{"pass", r.pass},
                {"window", Json::array({json_number(r.lo), json_number(r.hi)})},
                {"x0", json_number(r.x0)},
                {"nodes", r.nodes},
                {"lower", to_string(r.lower)},
                {"upper", to_string(r.upper)},
                {"checks", checks},
                {"notes", r.notes}};
}

Json classification_json(const DiffusionSpec& spec) {
    Json points = Json::array();
    for (double x : spec.critical_points()) {
        Json kinds = Json::array();
        const auto& sb = spec.scale.density.breakpoints;
        const auto& mb = spec.speed.density.breakpoints;
        if (std::find(sb.begin(), sb.end(), x) != sb.end()) {
            double jump = spec.scale.density(x, Side::Right) / spec.scale.density(x, Side::Left);
            kinds.push_back(Json{{"kind", "scale_breakpoint"}, {"density_ratio", json_number(jump)}});
        }
        if (std::find(mb.begin(), mb.end(), x) != mb.end()) kinds.push_back(Json{{"kind", "speed_breakpoint"}});
        if (double m = spec.atom_mass(x); m > 0) kinds.push_back(Json{{"kind", "sticky"}, {"mass", json_number(m)}});
        points.push_back(Json{{"point", json_number(x)}, {"features", kinds}});
    }
    return Json{{"label", spec.label},
                {"boundaries", Json::array({to_json(classify_boundary(spec, Boundary::L)),
                                            to_json(classify_boundary(spec, Boundary::R))})},
                {"critical_points", points}};
}

}  // namespace sepdiff
