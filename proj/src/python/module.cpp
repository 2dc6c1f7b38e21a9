#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sepdiff/errors.hpp"
#include "sepdiff/nflvr.hpp"
#include "sepdiff/report_json.hpp"
#include "sepdiff/separating.hpp"
#include "sepdiff/simulator.hpp"
#include "sepdiff/specfile.hpp"

namespace py = pybind11;
using namespace sepdiff;

namespace {

// Reports cross the boundary as JSON text; the Python layer decodes them.
std::string dump(const Json& j) { return j.dump(); }

Truncation truncation(std::optional<double> lo, std::optional<double> hi) { return Truncation{lo, hi}; }

Refinement refinement(const std::string& s) {
    if (s == "uniform-x") return Refinement::UniformX;
    if (s == "uniform-scale") return Refinement::UniformScale;
    throw SpecError("refinement must be uniform-x or uniform-scale");
}

Horizon horizon(const std::string& s) {
    if (s == "finite") return Horizon::Finite;
    if (s == "infinite") return Horizon::Infinite;
    throw SpecError("horizon must be finite or infinite");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Scale/speed diffusion toolkit: classification, separating times, NFLVR screening, chain simulation";

    static py::exception<Error> base(m, "Error");
    static py::exception<SpecError> spec_error(m, "SpecError", base.ptr());
    static py::exception<SyntaxError> expr_error(m, "ExpressionError", base.ptr());
    static py::exception<Inconclusive> inconclusive(m, "Inconclusive", base.ptr());
    static py::exception<DomainMismatch> mismatch(m, "DomainMismatch", base.ptr());
    static py::exception<NotLowerBounded> lower(m, "NotLowerBounded", base.ptr());
    static py::exception<UnboundedDomainWithoutTruncation> trunc(m, "UnboundedDomainWithoutTruncation", base.ptr());
    static py::exception<NotRecurrent> recurrent(m, "NotRecurrent", base.ptr());
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const SpecError& e) {
            py::set_error(spec_error, e.what());
        } catch (const SyntaxError& e) {
            py::set_error(expr_error, e.what());
        } catch (const UnknownFunction& e) {
            py::set_error(expr_error, e.what());
        } catch (const Inconclusive& e) {
            py::set_error(inconclusive, e.what());
        } catch (const InconclusiveTail& e) {
            py::set_error(inconclusive, e.what());
        } catch (const QuadratureFailure& e) {
            py::set_error(inconclusive, e.what());
        } catch (const InternalInconsistency& e) {
            py::set_error(inconclusive, e.what());
        } catch (const DomainMismatch& e) {
            py::set_error(mismatch, e.what());
        } catch (const NotLowerBounded& e) {
            py::set_error(lower, e.what());
        } catch (const UnboundedDomainWithoutTruncation& e) {
            py::set_error(trunc, e.what());
        } catch (const NotRecurrent& e) {
            py::set_error(recurrent, e.what());
        } catch (const Error& e) {
            py::set_error(base, e.what());
        }
    });

    py::class_<DiffusionSpec>(m, "Diffusion")
        .def_static("from_toml", &parse_spec, py::arg("text"), py::arg("origin") = "<string>")
        .def_static("load", &load_spec, py::arg("path"))
        .def("to_toml", &write_spec)
        .def_readwrite("label", &DiffusionSpec::label)
        .def_property_readonly("interval", [](const DiffusionSpec& s) { return py::make_tuple(s.space.l, s.space.r); })
        .def_property_readonly("critical_points", &DiffusionSpec::critical_points)
        .def("reference_point", &DiffusionSpec::reference_point)
        .def("scale", [](const DiffusionSpec& s, double x) { return scale_at(s, x); }, py::arg("x"))
        .def("violations_json",
             [](const DiffusionSpec& s) {
                 Json out = Json::array();
                 for (const auto& v : validate_spec(s)) out.push_back(to_json(v));
                 return dump(out);
             })
        .def("__repr__", [](const DiffusionSpec& s) { return "<Diffusion '" + s.label + "'>"; });

    m.def("classify_json", [](const DiffusionSpec& s) { return dump(classification_json(s)); }, py::arg("spec"));

    m.def(
        "separate_json",
        [](const DiffusionSpec& p, const DiffusionSpec& q, std::optional<double> x0) {
            return dump(to_json(separation_report(p, q, x0.value_or(p.reference_point()))));
        },
        py::arg("p"), py::arg("q"), py::arg("x0") = py::none());

    m.def("separating_points_json", [](const DiffusionSpec& p, const DiffusionSpec& q) {
        return dump(to_json(separating_set(p, q)));
    });

    m.def("identical", &diffusions_identical, py::arg("p"), py::arg("q"));

    m.def(
        "nflvr_json", [](const DiffusionSpec& s, const std::string& h) { return dump(to_json(nflvr_verdict(s, horizon(h)))); },
        py::arg("spec"), py::arg("horizon") = "finite");

    m.def(
        "simulate_json",
        [](const DiffusionSpec& s, std::size_t cells, std::size_t paths, std::uint64_t seed, double hz,
           std::optional<double> lo, std::optional<double> hi, std::optional<double> x0, const std::string& ref,
           unsigned threads) {
            py::gil_scoped_release release;
            GridChain chain = build_chain(s, cells, refinement(ref), truncation(lo, hi));
            std::size_t start = chain.nearest(x0.value_or(s.reference_point()));
            HorizonSummary sum = simulate_horizon(chain, start, hz, paths, seed, threads);
            return dump(Json{{"chain", to_json(chain)},
                             {"x0", json_number(chain.grid[start])},
                             {"horizon", json_number(hz)},
                             {"seed", seed},
                             {"estimates", Json::array({to_json(sum.absorbed), to_json(sum.terminal_state)})}});
        },
        py::arg("spec"), py::arg("cells") = 200, py::arg("paths") = 1000, py::arg("seed") = 1, py::arg("horizon") = 1.0,
        py::arg("lo") = py::none(), py::arg("hi") = py::none(), py::arg("x0") = py::none(),
        py::arg("refinement") = "uniform-x", py::arg("threads") = 0);

    m.def(
        "validate_json",
        [](const DiffusionSpec& s, std::size_t cells, std::size_t paths, std::uint64_t seed, std::optional<double> lo,
           std::optional<double> hi, std::optional<double> x0, double bias, double ergodic_horizon, unsigned threads) {
            py::gil_scoped_release release;
            ValidationConfig cfg;
            cfg.n_cells = cells;
            cfg.n_paths = paths;
            cfg.seed = seed;
            cfg.window = truncation(lo, hi);
            cfg.x0 = x0;
            cfg.p_up_bias = bias;
            cfg.ergodic_horizon = ergodic_horizon;
            cfg.threads = threads;
            return dump(to_json(validate_against_analytic(s, cfg)));
        },
        py::arg("spec"), py::arg("cells") = 200, py::arg("paths") = 100000, py::arg("seed") = 7,
        py::arg("lo") = py::none(), py::arg("hi") = py::none(), py::arg("x0") = py::none(), py::arg("p_up_bias") = 0.0,
        py::arg("ergodic_horizon") = 1.0, py::arg("threads") = 0);

    m.def(
        "sample_path",
        [](const DiffusionSpec& s, double x0, double hz, std::uint64_t seed, std::uint64_t stream, std::size_t cells,
           std::optional<double> lo, std::optional<double> hi) {
            GridChain chain = build_chain(s, cells, Refinement::UniformX, truncation(lo, hi));
            PathSample p = sample_path(chain, chain.nearest(x0), StopRule{hz, {}}, seed, stream);
            std::vector<std::pair<double, double>> out;
            out.reserve(p.events.size());
            for (const auto& e : p.events) out.emplace_back(e.state, e.holding);
            return out;
        },
        py::arg("spec"), py::arg("x0"), py::arg("horizon") = 1.0, py::arg("seed") = 1, py::arg("stream") = 0,
        py::arg("cells") = 200, py::arg("lo") = py::none(), py::arg("hi") = py::none());

    m.def(
        "chain_exit_time",
        [](const DiffusionSpec& s, double a, double x, double b, std::size_t cells, std::optional<double> lo,
           std::optional<double> hi) {
            GridChain chain = build_chain(s, cells, Refinement::UniformX, truncation(lo, hi));
            return chain_exit_time(chain, chain.nearest(a), chain.nearest(x), chain.nearest(b));
        },
        py::arg("spec"), py::arg("a"), py::arg("x"), py::arg("b"), py::arg("cells") = 200, py::arg("lo") = py::none(),
        py::arg("hi") = py::none());

    m.def(
        "expected_exit_time",
        [](const DiffusionSpec& s, double a, double x, double b) { return expected_exit_time(s, a, x, b).value; },
        py::arg("spec"), py::arg("a"), py::arg("x"), py::arg("b"));
}
