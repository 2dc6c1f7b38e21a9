#pragma once

#include <cmath>
#include <random>
#include <string>

#include "sepdiff/diffusion_model.hpp"

namespace fx {

using namespace sepdiff;

inline Piecewise one(const std::string& e) { return Piecewise::single(parse_expression(e)); }

inline DiffusionSpec make(StateSpace sp, Piecewise scale, double anchor, double anchor_value, Piecewise speed,
                          std::vector<Atom> atoms = {}, std::string label = "") {
    DiffusionSpec s;
    s.space = sp;
    s.scale = ScaleFunction{std::move(scale), anchor, anchor_value};
    s.speed.density = std::move(speed);
    s.speed.atoms = std::move(atoms);
    s.label = std::move(label);
    return s;
}

inline const StateSpace kReal{-INFINITY, INFINITY, false, false};

inline DiffusionSpec bm() { return make(kReal, one("1"), 0, 0, one("1"), {}, "bm"); }

inline DiffusionSpec sticky(double gamma) { return make(kReal, one("1"), 0, 0, one("1"), {{0.0, gamma}}, "sticky"); }

inline DiffusionSpec skew(double alpha) {
    Piecewise s{{0.0}, {Expr::constant(1.0 / alpha), Expr::constant(1.0 / (1.0 - alpha))}};
    Piecewise m{{0.0}, {Expr::constant(alpha), Expr::constant(1.0 - alpha)}};
    return make(kReal, s, 0, 0, m, {}, "skew");
}

// Generalized squared Bessel process of dimension gamma; atom0 < 0 means no atom.
inline DiffusionSpec bessel(double gamma, double atom0 = 0.0) {
    double nu = gamma / 2 - 1;
    bool regular = gamma < 2;
    StateSpace sp{0.0, INFINITY, regular, false};
    std::vector<Atom> atoms;
    if (regular && atom0 > 0) atoms.push_back({0.0, atom0});
    if (nu == 0) return make(sp, one("2/x"), 1, 0, one("x/2"), atoms, "bessel");
    double c = 2 * std::fabs(nu);
    Piecewise s = Piecewise::single(Expr::constant(c) * Expr::pow(Expr::var(), -2 * nu - 1));
    Piecewise m = Piecewise::single(Expr::pow(Expr::var(), 2 * nu + 1) / Expr::constant(c));
    return make(sp, s, 1, nu > 0 ? -1.0 : 1.0, m, atoms, "bessel");
}

// Scale density exp(-2 sqrt x) with m = dx / s'; closed at the regular origin.
inline DiffusionSpec exp_sqrt(double atom0) {
    std::vector<Atom> atoms;
    if (atom0 > 0) atoms.push_back({0.0, atom0});
    return make({0.0, INFINITY, true, false}, one("exp(-2*sqrt(x))"), 0, 0, one("exp(2*sqrt(x))"), atoms, "exp_sqrt");
}

inline DiffusionSpec bm_half_line(double atom0) {
    std::vector<Atom> atoms;
    if (atom0 > 0) atoms.push_back({0.0, atom0});
    return make({0.0, INFINITY, true, false}, one("1"), 0, 0, one("1"), atoms, "bm_half_line");
}

inline DiffusionSpec reflected_drift(double mu) {
    Piecewise s = Piecewise::single(parse_expression("exp(" + std::to_string(-2 * mu) + "*x)"));
    Piecewise m = Piecewise::single(parse_expression("exp(" + std::to_string(2 * mu) + "*x)"));
    return make({0.0, 1.0, true, true}, s, 0, 0, m, {}, "reflected_drift");
}

inline DiffusionSpec reflected_bm() { return make({0.0, 1.0, true, true}, one("1"), 0, 0, one("1"), {}, "reflected_bm"); }

inline DiffusionSpec gbm() { return make({0.0, INFINITY, false, false}, one("x^(-2)"), 1, 0, one("1"), {}, "gbm"); }

inline DiffusionSpec bm_drift(double mu) {
    Piecewise s = Piecewise::single(parse_expression("exp(" + std::to_string(-2 * mu) + "*x)"));
    Piecewise m = Piecewise::single(parse_expression("exp(" + std::to_string(2 * mu) + "*x)"));
    return make({0.0, INFINITY, true, false}, s, 0, 0, m, {{0.0, INFINITY}}, "bm_drift");
}

inline DiffusionSpec bm_absorbed() {
    return make({0.0, INFINITY, true, false}, one("1"), 0, 0, one("1"), {{0.0, INFINITY}}, "bm_absorbed");
}

// Same law under the scale s -> k s + c.
inline DiffusionSpec gauge(DiffusionSpec s, double k, double c) {
    for (auto& p : s.scale.density.pieces) p = Expr::constant(k) * p;
    s.scale.anchor_value = k * s.scale.anchor_value + c;
    for (auto& p : s.speed.density.pieces) p = p / Expr::constant(k);
    for (auto& a : s.speed.atoms) a.mass /= k;
    return s;
}

// Random member of one of five families; two draws from the same family share a state space.
inline DiffusionSpec random_fixture(std::mt19937_64& rng, int family) {
    std::uniform_real_distribution<double> U(0.1, 0.9);
    std::uniform_int_distribution<int> atom(0, 2);
    auto atom_choice = [&]() {
        int k = atom(rng);
        return k == 0 ? -1.0 : k == 1 ? U(rng) : INFINITY;
    };
    switch (family) {
        case 0: return fx::sticky(U(rng) * 2);
        case 1: return fx::skew(U(rng));
        case 2: return fx::bessel(U(rng) * 2, atom_choice());
        case 3: return std::uniform_int_distribution<int>(0, 1)(rng) ? fx::exp_sqrt(atom_choice()) : fx::bm_half_line(atom_choice());
        default: return fx::reflected_drift(U(rng) * 3 - 1.5);
    }
}

}  // namespace fx
