#include "hzeta/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <queue>

namespace hzeta::num {

namespace {

// Gauss-Kronrod 7/15 nodes and weights (positive half; node 0 is last).
constexpr double kron_x[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kron_w[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double gauss_w[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a, b;
    Complex value;
    double error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

Panel eval_panel(const std::function<Complex(double)>& f, double a, double b, long& evals) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    Complex kron = kron_w[7] * f(mid);
    Complex gauss = gauss_w[3] * f(mid);
    for (int i = 0; i < 7; ++i) {
        const Complex lo = f(mid - half * kron_x[i]);
        const Complex hi = f(mid + half * kron_x[i]);
        kron += kron_w[i] * (lo + hi);
        if (i % 2 == 1) gauss += gauss_w[i / 2] * (lo + hi);
    }
    evals += 15;
    const Complex value = kron * half;
    const double diff = std::abs((kron - gauss) * half);
    // QUADPACK-style sharpened error estimate.
    const double scale = std::abs(value) + 1e-300;
    double err = diff;
    if (diff > 0) err = scale * std::min(1.0, std::pow(200.0 * diff / scale, 1.5));
    return Panel{a, b, value, std::max(err, 1e-18 * scale)};
}

}  // namespace

QuadResult integrate_gk(const std::function<Complex(double)>& f, double a, double b,
                        double abs_tol, int initial_panels, long max_evals) {
    if (!(b > a)) return QuadResult{Complex(0, 0), 0.0, 0};
    initial_panels = std::max(1, initial_panels);
    long evals = 0;
    std::priority_queue<Panel> panels;
    Complex total(0, 0);
    double total_err = 0;
    const double step = (b - a) / initial_panels;
    for (int i = 0; i < initial_panels; ++i) {
        Panel pnl = eval_panel(f, a + i * step, (i + 1 == initial_panels) ? b : a + (i + 1) * step, evals);
        total += pnl.value;
        total_err += pnl.error;
        panels.push(pnl);
    }
    while (total_err > abs_tol && evals + 30 <= max_evals) {
        Panel worst = panels.top();
        if (worst.b - worst.a < 1e-14 * (b - a)) break;  // refinement exhausted
        panels.pop();
        total -= worst.value;
        total_err -= worst.error;
        const double mid = 0.5 * (worst.a + worst.b);
        for (const Panel& pnl : {eval_panel(f, worst.a, mid, evals), eval_panel(f, mid, worst.b, evals)}) {
            total += pnl.value;
            total_err += pnl.error;
            panels.push(pnl);
        }
    }
    return QuadResult{total, total_err, evals};
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_line: need >= 2 points");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double det = n * sxx - sx * sx;
    if (std::abs(det) < 1e-30) throw std::invalid_argument("fit_line: degenerate abscissae");
    LineFit fit;
    fit.slope = (n * sxy - sx * sy) / det;
    fit.intercept = (sy - fit.slope * sx) / n;
    for (size_t i = 0; i < x.size(); ++i)
        fit.max_residual = std::max(fit.max_residual, std::abs(y[i] - fit.intercept - fit.slope * x[i]));
    return fit;
}

LineFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y, double floor) {
    std::vector<double> lx, ly;
    for (size_t i = 0; i < x.size() && i < y.size(); ++i) {
        if (y[i] > floor && x[i] > 0) {
            lx.push_back(std::log(x[i]));
            ly.push_back(std::log(y[i]));
        }
    }
    if (lx.size() < 2) throw std::invalid_argument("fit_loglog: fewer than two points above floor");
    return fit_line(lx, ly);
}

double round12(double v) {
    if (!std::isfinite(v)) return v;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return std::strtod(buf, nullptr);
}

}  // namespace hzeta::num
