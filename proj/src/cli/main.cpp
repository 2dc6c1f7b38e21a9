#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "sepdiff/errors.hpp"
#include "sepdiff/nflvr.hpp"
#include "sepdiff/report_json.hpp"
#include "sepdiff/separating.hpp"
#include "sepdiff/simulator.hpp"
#include "sepdiff/specfile.hpp"

#ifndef SEPDIFF_VERSION
#define SEPDIFF_VERSION "0.0.0"
#endif

using namespace sepdiff;
namespace fs = std::filesystem;

namespace {

enum Exit {
    kOk = 0,
    kInvalid = 2,
    kInconclusive = 3,
    kDomainMismatch = 4,
    kNotLowerBounded = 5,
    kMissingTruncation = 6,
    kValidationFailed = 7,
};

std::string sha256_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return "";
    std::ostringstream os;
    os << in.rdbuf();
    std::string data = os.str();
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr);
    std::ostringstream hex;
    for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
    return hex.str();
}

std::string utc_now() {
    std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

class Envelope {
public:
    Envelope(std::string command, const std::vector<std::string>& inputs) {
        json_["tool"] = "sepdiff";
        json_["version"] = SEPDIFF_VERSION;
        json_["command"] = std::move(command);
        json_["timestamp"] = utc_now();
        Json files = Json::array();
        for (const auto& p : inputs)
            files.push_back(Json{{"file", fs::path(p).filename().string()}, {"sha256", sha256_file(p)}});
        json_["inputs"] = files;
        json_["payload"] = nullptr;
        json_["diagnostics"] = Json::array();
    }
    void payload(Json p) { json_["payload"] = std::move(p); }
    void note(const std::string& s) { json_["diagnostics"].push_back(s); }
    void notes(const std::vector<std::string>& v) {
        for (const auto& s : v) note(s);
    }
    void error(const std::string& kind, const std::string& message) {
        json_["error"] = Json{{"kind", kind}, {"message", message}};
    }
    int emit(int code) {
        json_["exit_code"] = code;
        std::cout << json_.dump(2) << "\n";
        return code;
    }

private:
    Json json_;
};

void note_overrides(Envelope& env, const DiffusionSpec& spec) {
    for (const auto& o : spec.speed.overrides)
        env.note("override used: " + spec.label + " " + to_string(o.boundary) + " " + to_string(o.quantity) + " = " +
                 (o.verdict == Finiteness::Finite ? "finite" : "infinite"));
}

// Loads and validates; on violations fills the envelope and returns false.
bool load_checked(Envelope& env, const std::string& path, DiffusionSpec& out) {
    out = load_spec(path);
    auto violations = validate_spec(out);
    if (violations.empty()) return true;
    Json v = Json::array();
    for (const auto& x : violations) v.push_back(to_json(x));
    env.payload(Json{{"file", fs::path(path).filename().string()}, {"violations", v}});
    env.error("ValidationFailure", path + ": specification violates " + std::to_string(violations.size()) + " rule(s)");
    return false;
}

Truncation parse_truncation(const std::string& s) {
    Truncation t;
    if (s.empty()) return t;
    auto comma = s.find(',');
    if (comma == std::string::npos) throw SpecError("--truncate expects LO,HI (either side may be empty)");
    auto side = [](const std::string& part) -> std::optional<double> {
        if (part.empty() || part == "inf" || part == "-inf" || part == "none") return std::nullopt;
        try {
            std::size_t used = 0;
            double v = std::stod(part, &used);
            if (used != part.size()) throw SpecError("bad truncation level '" + part + "'");
            return v;
        } catch (const std::logic_error&) {
            throw SpecError("bad truncation level '" + part + "'");
        }
    };
    t.lo = side(s.substr(0, comma));
    t.hi = side(s.substr(comma + 1));
    return t;
}

Refinement parse_refinement(const std::string& s) {
    if (s == "uniform-x") return Refinement::UniformX;
    if (s == "uniform-scale") return Refinement::UniformScale;
    throw SpecError("--refinement must be uniform-x or uniform-scale");
}

void dump_paths(const GridChain& chain, std::size_t start, const StopRule& stop, std::uint64_t seed, std::size_t count,
                const std::string& dir, Envelope& env) {
    fs::create_directories(dir);
    for (std::size_t k = 0; k < count; ++k) {
        PathSample p = sample_path(chain, start, stop, seed, k);
        std::ostringstream name;
        name << "path_" << std::setw(6) << std::setfill('0') << k << ".csv";
        std::ofstream out(fs::path(dir) / name.str());
        out << "state,holding_duration\n";
        out.precision(17);
        for (const auto& e : p.events) out << e.state << "," << e.holding << "\n";
    }
    env.note("wrote " + std::to_string(count) + " path file(s) to " + dir);
}

// Runs body, mapping library errors onto exit codes.
template <class Body>
int guarded(Envelope& env, Body&& body) {
    try {
        return body();
    } catch (const UnboundedDomainWithoutTruncation& e) {
        env.error("UnboundedDomainWithoutTruncation", e.what());
        return env.emit(kMissingTruncation);
    } catch (const NotLowerBounded& e) {
        env.error("NotLowerBounded", e.what());
        return env.emit(kNotLowerBounded);
    } catch (const DomainMismatch& e) {
        env.error("DomainMismatch", e.what());
        return env.emit(kDomainMismatch);
    } catch (const Inconclusive& e) {
        env.error("Inconclusive", e.what());
        return env.emit(kInconclusive);
    } catch (const InconclusiveTail& e) {
        env.error("Inconclusive", e.what());
        return env.emit(kInconclusive);
    } catch (const QuadratureFailure& e) {
        env.error("Inconclusive", e.what());
        return env.emit(kInconclusive);
    } catch (const InternalInconsistency& e) {
        env.error("Inconclusive", e.what());
        return env.emit(kInconclusive);
    } catch (const SyntaxError& e) {
        env.error("MalformedInput", e.what());
        return env.emit(kInvalid);
    } catch (const UnknownFunction& e) {
        env.error("MalformedInput", e.what());
        return env.emit(kInvalid);
    } catch (const SpecError& e) {
        env.error("MalformedInput", e.what());
        return env.emit(kInvalid);
    } catch (const NotRecurrent& e) {
        env.error("NotRecurrent", e.what());
        return env.emit(kInvalid);
    } catch (const std::exception& e) {
        env.error("Error", e.what());
        return env.emit(kInvalid);
    }
}

struct SimOptions {
    int cells = 200;
    std::size_t paths = 0;
    std::uint64_t seed = 1;
    std::string truncate;
    std::optional<double> x0;
    std::optional<double> horizon;
    bool dump = false;
    std::string out = ".";
    std::optional<std::size_t> dump_count;
    std::string refinement = "uniform-x";
    unsigned threads = 0;
    double p_up_bias = 0.0;
};

void add_sim_options(CLI::App* cmd, SimOptions& o) {
    cmd->add_option("--cells", o.cells, "grid cells")->capture_default_str();
    cmd->add_option("--paths", o.paths, "number of sample paths");
    cmd->add_option("--seed", o.seed, "master seed")->capture_default_str();
    cmd->add_option("--truncate", o.truncate, "truncation levels LO,HI; either side may be empty");
    cmd->add_option("--x0", o.x0, "start point (snapped to the grid)");
    cmd->add_option("--horizon", o.horizon, "time horizon");
    cmd->add_flag("--dump", o.dump, "write one CSV per path");
    cmd->add_option("--out", o.out, "directory for CSV output")->capture_default_str();
    cmd->add_option("--dump-count", o.dump_count, "number of paths to dump");
    cmd->add_option("--refinement", o.refinement, "uniform-x or uniform-scale")->capture_default_str();
    cmd->add_option("--threads", o.threads, "worker cap (SEPDIFF_THREADS also applies)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Scale/speed analysis of one-dimensional diffusions"};
    app.set_version_flag("--version", SEPDIFF_VERSION);
    app.require_subcommand(1);

    std::string spec1, spec2, horizon_name = "finite";
    std::optional<double> x0;
    SimOptions sim;
    sim.paths = 1000;
    SimOptions val;
    val.paths = 100000;
    val.seed = 7;

    auto* classify = app.add_subcommand("classify", "boundary classification and critical points");
    classify->add_option("spec", spec1, "diffusion spec file")->required();

    auto* separate = app.add_subcommand("separate", "separating set and separating time of two diffusions");
    separate->add_option("spec1", spec1, "spec of P")->required();
    separate->add_option("spec2", spec2, "spec of P~")->required();
    separate->add_option("--x0", x0, "start point (default: reference point of the first spec)");

    auto* nflvr = app.add_subcommand("nflvr", "no free lunch with vanishing risk for a price process");
    nflvr->add_option("spec", spec1, "diffusion spec file")->required();
    nflvr->add_option("--horizon", horizon_name, "finite or infinite")
        ->check(CLI::IsMember({"finite", "infinite"}))
        ->capture_default_str();

    auto* simulate = app.add_subcommand("simulate", "sample paths of the grid chain up to a horizon");
    simulate->add_option("spec", spec1, "diffusion spec file")->required();
    add_sim_options(simulate, sim);

    auto* validate = app.add_subcommand("validate", "Monte Carlo checks against analytic values");
    validate->add_option("spec", spec1, "diffusion spec file")->required();
    add_sim_options(validate, val);
    validate->add_option("--p-up-bias", val.p_up_bias, "shift every interior up-probability (negative control)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kOk : kInvalid;
    }

    if (classify->parsed()) {
        Envelope env("classify", {spec1});
        return guarded(env, [&] {
            DiffusionSpec s;
            if (!load_checked(env, spec1, s)) return env.emit(kInvalid);
            note_overrides(env, s);
            env.payload(classification_json(s));
            return env.emit(kOk);
        });
    }

    if (separate->parsed()) {
        Envelope env("separate", {spec1, spec2});
        return guarded(env, [&] {
            DiffusionSpec p, q;
            if (!load_checked(env, spec1, p) || !load_checked(env, spec2, q)) return env.emit(kInvalid);
            note_overrides(env, p);
            note_overrides(env, q);
            double x = x0.value_or(p.reference_point());
            SeparationReport rep = separation_report(p, q, x);
            Json payload{{"x0", json_number(x)}};
            payload.update(to_json(rep));
            env.payload(payload);
            return env.emit(kOk);
        });
    }

    if (nflvr->parsed()) {
        Envelope env("nflvr", {spec1});
        return guarded(env, [&] {
            DiffusionSpec s;
            if (!load_checked(env, spec1, s)) return env.emit(kInvalid);
            note_overrides(env, s);
            NflvrReport rep = nflvr_verdict(s, horizon_name == "finite" ? Horizon::Finite : Horizon::Infinite);
            if (!rep.cond_b1.pass) env.note("beta unavailable: " + rep.cond_b1.provenance);
            env.payload(to_json(rep));
            return env.emit(kOk);
        });
    }

    if (simulate->parsed()) {
        Envelope env("simulate", {spec1});
        return guarded(env, [&] {
            DiffusionSpec s;
            if (!load_checked(env, spec1, s)) return env.emit(kInvalid);
            note_overrides(env, s);
            GridChain chain = build_chain(s, sim.cells, parse_refinement(sim.refinement), parse_truncation(sim.truncate));
            env.notes(chain.notes);
            std::size_t start = chain.nearest(sim.x0.value_or(s.reference_point()));
            double horizon = sim.horizon.value_or(1.0);
            HorizonSummary sum = simulate_horizon(chain, start, horizon, sim.paths, sim.seed, sim.threads);
            if (sum.absorbed.truncated)
                env.note("truncation leakage bound " + std::to_string(sum.absorbed.truncation_leakage) +
                         " (no time limit); fraction of paths absorbed by the horizon " +
                         std::to_string(sum.absorbed.value));
            env.payload(Json{{"chain", to_json(chain)},
                             {"x0", json_number(chain.grid[start])},
                             {"horizon", json_number(horizon)},
                             {"seed", sim.seed},
                             {"estimates", Json::array({to_json(sum.absorbed), to_json(sum.terminal_state)})}});
            if (sim.dump)
                dump_paths(chain, start, StopRule{horizon, {}}, sim.seed, sim.dump_count.value_or(sim.paths), sim.out, env);
            return env.emit(kOk);
        });
    }

    Envelope env("validate", {spec1});
    return guarded(env, [&] {
        DiffusionSpec s;
        if (!load_checked(env, spec1, s)) return env.emit(kInvalid);
        note_overrides(env, s);
        ValidationConfig cfg;
        cfg.n_cells = val.cells;
        cfg.n_paths = val.paths;
        cfg.seed = val.seed;
        cfg.refinement = parse_refinement(val.refinement);
        cfg.window = parse_truncation(val.truncate);
        cfg.x0 = val.x0;
        if (val.horizon) cfg.ergodic_horizon = *val.horizon;
        cfg.p_up_bias = val.p_up_bias;
        cfg.threads = val.threads;
        ValidationReport rep = validate_against_analytic(s, cfg);
        env.notes(rep.notes);
        env.payload(to_json(rep));
        if (val.dump) {
            const GridChain& c = rep.chain;
            dump_paths(c, c.nearest(rep.x0), StopRule{std::nullopt, {0, c.last()}}, val.seed,
                       std::min(val.dump_count.value_or(100), val.paths), val.out, env);
        }
        if (!rep.pass) {
            std::size_t bad = 0;
            for (const auto& c : rep.checks) bad += !c.pass;
            env.error("ValidationFailed", std::to_string(bad) + " check(s) outside the z bound");
        }
        return env.emit(rep.pass ? kOk : kValidationFailed);
    });
}
