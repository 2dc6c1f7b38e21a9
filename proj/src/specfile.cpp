#include "sepdiff/specfile.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "sepdiff/errors.hpp"
#include "toml.hpp"

namespace sepdiff {

namespace {

[[noreturn]] void fail(const std::string& origin, const std::string& where, const std::string& what) {
    throw SpecError(origin + ": " + where + ": " + what);
}

double number(const toml::node& n, const std::string& origin, const std::string& where) {
    if (auto v = n.value<double>()) return *v;
    if (auto s = n.value<std::string>()) {
        if (*s == "inf" || *s == "+inf") return INFINITY;
        if (*s == "-inf") return -INFINITY;
    }
    fail(origin, where, "expected a number, inf or -inf");
}

double number_at(const toml::table& t, const char* key, const std::string& origin, const std::string& where,
                 std::optional<double> fallback = std::nullopt) {
    const toml::node* n = t.get(key);
    if (!n) {
        if (fallback) return *fallback;
        fail(origin, where + "." + key, "missing");
    }
    return number(*n, origin, where + "." + key);
}

bool flag_at(const toml::table& t, const char* key, const std::string& origin, const std::string& where) {
    const toml::node* n = t.get(key);
    if (!n) return false;
    if (auto v = n->value<bool>()) return *v;
    fail(origin, where + "." + key, "expected true or false");
}

const toml::table& section(const toml::table& root, const char* key, const std::string& origin) {
    const toml::table* t = root[key].as_table();
    if (!t) fail(origin, key, "missing table");
    return *t;
}

Piecewise piecewise(const toml::table& t, const std::string& origin, const std::string& where) {
    Piecewise p;
    if (const toml::node* bp = t.get("breakpoints")) {
        const toml::array* arr = bp->as_array();
        if (!arr) fail(origin, where + ".breakpoints", "expected an array");
        for (std::size_t i = 0; i < arr->size(); ++i)
            p.breakpoints.push_back(number(*arr->get(i), origin, where + ".breakpoints"));
    }
    const toml::node* d = t.get("density");
    if (!d) fail(origin, where + ".density", "missing");
    auto expr = [&](const toml::node& n) {
        auto s = n.value<std::string>();
        if (!s) fail(origin, where + ".density", "expected expression strings");
        return parse_expression(*s);
    };
    if (const toml::array* arr = d->as_array()) {
        for (std::size_t i = 0; i < arr->size(); ++i) p.pieces.push_back(expr(*arr->get(i)));
    } else {
        p.pieces.push_back(expr(*d));
    }
    if (p.pieces.size() != p.breakpoints.size() + 1)
        fail(origin, where, "need one density piece more than breakpoints");
    for (std::size_t i = 1; i < p.breakpoints.size(); ++i)
        if (!(p.breakpoints[i] > p.breakpoints[i - 1])) fail(origin, where + ".breakpoints", "must increase strictly");
    return p;
}

std::string str(double x) {
    if (x == INFINITY) return "inf";
    if (x == -INFINITY) return "-inf";
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

}  // namespace

DiffusionSpec parse_spec(const std::string& text, const std::string& origin) {
    toml::table root;
    try {
        root = toml::parse(text, origin);
    } catch (const toml::parse_error& e) {
        std::ostringstream os;
        os << e.description() << " (line " << e.source().begin.line << ", column " << e.source().begin.column << ")";
        fail(origin, "toml", os.str());
    }
    DiffusionSpec spec;
    if (const toml::node* l = root.get("label")) {
        auto s = l->value<std::string>();
        if (!s) fail(origin, "label", "expected a string");
        spec.label = *s;
    }

    const toml::table& space = section(root, "space", origin);
    spec.space.l = number_at(space, "l", origin, "space");
    spec.space.r = number_at(space, "r", origin, "space");
    spec.space.l_closed = flag_at(space, "l_closed", origin, "space");
    spec.space.r_closed = flag_at(space, "r_closed", origin, "space");

    const toml::table& scale = section(root, "scale", origin);
    spec.scale.density = piecewise(scale, origin, "scale");
    spec.scale.anchor_point = number_at(scale, "anchor", origin, "scale");
    spec.scale.anchor_value = number_at(scale, "anchor_value", origin, "scale", 0.0);

    const toml::table& speed = section(root, "speed", origin);
    spec.speed.density = piecewise(speed, origin, "speed");
    if (const toml::node* a = speed.get("atoms")) {
        const toml::array* arr = a->as_array();
        if (!arr) fail(origin, "speed.atoms", "expected an array of tables");
        for (std::size_t i = 0; i < arr->size(); ++i) {
            const toml::table* at = arr->get(i)->as_table();
            if (!at) fail(origin, "speed.atoms", "expected { location = ..., mass = ... }");
            spec.speed.atoms.push_back(
                {number_at(*at, "location", origin, "speed.atoms"), number_at(*at, "mass", origin, "speed.atoms")});
        }
    }
    if (const toml::node* o = speed.get("overrides")) {
        const toml::array* arr = o->as_array();
        if (!arr) fail(origin, "speed.overrides", "expected an array of tables");
        for (std::size_t i = 0; i < arr->size(); ++i) {
            const toml::table* ov = arr->get(i)->as_table();
            if (!ov) fail(origin, "speed.overrides", "expected { boundary, quantity, verdict }");
            auto b = (*ov)["boundary"].value<std::string>();
            auto q = (*ov)["quantity"].value<std::string>();
            auto v = (*ov)["verdict"].value<std::string>();
            if (!b || (*b != "l" && *b != "r")) fail(origin, "speed.overrides.boundary", "expected \"l\" or \"r\"");
            auto quantity = q ? override_quantity_from_string(*q) : std::nullopt;
            if (!quantity) fail(origin, "speed.overrides.quantity", "unknown quantity");
            if (!v || (*v != "finite" && *v != "infinite"))
                fail(origin, "speed.overrides.verdict", "expected \"finite\" or \"infinite\"");
            spec.speed.overrides.push_back({*b == "l" ? Boundary::L : Boundary::R, *quantity,
                                            *v == "finite" ? Finiteness::Finite : Finiteness::Infinite});
        }
    }
    return spec;
}

DiffusionSpec load_spec(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SpecError(path + ": cannot open file");
    std::ostringstream os;
    os << in.rdbuf();
    return parse_spec(os.str(), path);
}

std::string write_spec(const DiffusionSpec& spec) {
    // Written by hand so that numbers round-trip exactly and keys keep a
    // readable order.
    auto array = [](const std::vector<double>& xs) {
        std::string s = "[";
        for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? ", " : "") + str(xs[i]);
        return s + "]";
    };
    auto densities = [](const Piecewise& p) {
        std::string s = "[";
        for (std::size_t i = 0; i < p.pieces.size(); ++i) s += (i ? ", \"" : "\"") + to_string(p.pieces[i]) + "\"";
        return s + "]";
    };
    std::ostringstream os;
    os << "label = \"" << spec.label << "\"\n\n";
    os << "[space]\nl = " << str(spec.space.l) << "\nr = " << str(spec.space.r)
       << "\nl_closed = " << (spec.space.l_closed ? "true" : "false")
       << "\nr_closed = " << (spec.space.r_closed ? "true" : "false") << "\n\n";
    os << "[scale]\nanchor = " << str(spec.scale.anchor_point) << "\nanchor_value = " << str(spec.scale.anchor_value)
       << "\nbreakpoints = " << array(spec.scale.density.breakpoints) << "\ndensity = " << densities(spec.scale.density)
       << "\n\n";
    os << "[speed]\nbreakpoints = " << array(spec.speed.density.breakpoints)
       << "\ndensity = " << densities(spec.speed.density) << "\natoms = [";
    for (std::size_t i = 0; i < spec.speed.atoms.size(); ++i)
        os << (i ? ", " : "") << "{ location = " << str(spec.speed.atoms[i].location)
           << ", mass = " << str(spec.speed.atoms[i].mass) << " }";
    os << "]\n";
    if (!spec.speed.overrides.empty()) {
        os << "overrides = [";
        for (std::size_t i = 0; i < spec.speed.overrides.size(); ++i) {
            const auto& o = spec.speed.overrides[i];
            os << (i ? ", " : "") << "{ boundary = \"" << to_string(o.boundary) << "\", quantity = \""
               << to_string(o.quantity) << "\", verdict = \""
               << (o.verdict == Finiteness::Finite ? "finite" : "infinite") << "\" }";
        }
        os << "]\n";
    }
    return os.str();
}

}  // namespace sepdiff
