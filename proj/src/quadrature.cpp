#include "sepdiff/quadrature.hpp"

#include <cmath>
#include <queue>
#include <vector>

#include "sepdiff/errors.hpp"

namespace sepdiff {

namespace {

constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                            0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                            0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                            0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                            0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                            0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                            0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a, b, value, error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

Panel gk15(const Integrand& f, double a, double b) {
    double c = 0.5 * (a + b);
    double h = 0.5 * (b - a);
    double fc = f(c);
    double kronrod = fc * kWgk[7];
    double gauss = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
        double dx = h * kXgk[j];
        double s = f(c - dx) + f(c + dx);
        kronrod += kWgk[j] * s;
        if (j % 2 == 1) gauss += kWg[j / 2] * s;
    }
    return Panel{a, b, kronrod * h, std::fabs((kronrod - gauss) * h)};
}

QuadResult integrate_finite(const Integrand& f, double a, double b, const QuadOptions& opts) {
    QuadResult res;
    if (a == b) {
        res.converged = true;
        return res;
    }
    std::priority_queue<Panel> heap;
    Panel first = gk15(f, a, b);
    heap.push(first);
    double total = first.value;
    double err = first.error;
    int panels = 1;
    auto done = [&] { return err <= std::max(opts.abs_tol, opts.rel_tol * std::fabs(total)); };
    while (!done() && panels < opts.max_panels) {
        if (!std::isfinite(total) || !std::isfinite(err)) break;
        Panel worst = heap.top();
        double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) break;  // panel below floating resolution
        heap.pop();
        Panel l = gk15(f, worst.a, mid);
        Panel r = gk15(f, mid, worst.b);
        total += l.value + r.value - worst.value;
        err += l.error + r.error - worst.error;
        heap.push(l);
        heap.push(r);
        ++panels;
    }
    // Re-sum to shed the drift of incremental updates.
    double sum = 0.0, esum = 0.0;
    while (!heap.empty()) {
        sum += heap.top().value;
        esum += heap.top().error;
        heap.pop();
    }
    res.value = sum;
    res.error = esum;
    res.panels = panels;
    res.converged = std::isfinite(sum) && esum <= std::max(opts.abs_tol, opts.rel_tol * std::fabs(sum));
    return res;
}

}  // namespace

QuadResult integrate(const Integrand& f, double a, double b, const QuadOptions& opts) {
    if (a > b) {
        QuadResult r = integrate(f, b, a, opts);
        r.value = -r.value;
        return r;
    }
    bool ia = std::isinf(a), ib = std::isinf(b);
    if (!ia && !ib) return integrate_finite(f, a, b, opts);
    if (ia && ib) {
        QuadResult l = integrate(f, a, 0.0, opts);
        QuadResult r = integrate(f, 0.0, b, opts);
        return QuadResult{l.value + r.value, l.error + r.error, l.panels + r.panels, l.converged && r.converged};
    }
    if (ib) {
        Integrand g = [&](double t) {
            double u = 1.0 - t;
            return f(a + t / u) / (u * u);
        };
        return integrate_finite(g, 0.0, 1.0, opts);
    }
    Integrand g = [&](double t) {
        double u = 1.0 - t;
        return f(b - t / u) / (u * u);
    };
    return integrate_finite(g, 0.0, 1.0, opts);
}

double integrate_or_throw(const Integrand& f, double a, double b, const QuadOptions& opts) {
    QuadResult r = integrate(f, a, b, opts);
    if (!r.converged) {
        throw QuadratureFailure("quadrature on [" + std::to_string(a) + ", " + std::to_string(b) +
                                "] did not converge (estimate " + std::to_string(r.value) + ", error " +
                                std::to_string(r.error) + ")");
    }
    return r.value;
}

std::vector<double> solve_tridiagonal(std::vector<double> sub, std::vector<double> diag, std::vector<double> sup,
                                      std::vector<double> rhs) {
    const std::size_t n = diag.size();
    if (n == 0) return {};
    // Thomas algorithm; forward sweep then back substitution.
    for (std::size_t i = 1; i < n; ++i) {
        double w = sub[i] / diag[i - 1];
        diag[i] -= w * sup[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    std::vector<double> x(n);
    x[n - 1] = rhs[n - 1] / diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = (rhs[i] - sup[i] * x[i + 1]) / diag[i];
    return x;
}

}  // namespace sepdiff
