#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "hecke/io.hpp"
#include "hecke/quadrature.hpp"
#include "hecke/specfun.hpp"

namespace hecke {

// Mother bump: exp(1 - 1/(1 - u^2)) on (-1, 1), zero outside, value 1 at 0.
// All derivatives vanish at the edges.
inline double bump_mother(double u) {
    double u2 = u * u;
    if (u2 >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - u2));
}

// Smooth product test function on the surface, concentrated at (x0, y0) with
// scales sx, sy and support (x0 - 1/sx, x0 + 1/sx) x (y0 - 1/sy, y0 + 1/sy).
struct TestFunction {
    double x0 = 0.0, y0 = 1.4;
    double sx = 2.5, sy = 2.5;

    double operator()(double x, double y) const {
        return bump_mother(sx * (x - x0)) * bump_mother(sy * (y - y0));
    }
    double xLo() const { return x0 - 1.0 / sx; }
    double xHi() const { return x0 + 1.0 / sx; }
    double yLo() const { return y0 - 1.0 / sy; }
    double yHi() const { return y0 + 1.0 / sy; }
};

// Concentration parameter M >= 1 gives scales 2.5 M. The support rectangle
// must sit inside the fundamental domain (y > 1 suffices for the circle
// bound; otherwise the corner nearest the circle is checked) and below the
// ceiling y = 4 M.
inline TestFunction make_test_function(double M, double x0 = 0.0, double y0 = 1.4) {
    if (!(M >= 1.0)) throw std::invalid_argument("make_test_function: need M >= 1");
    TestFunction psi{x0, y0, 2.5 * M, 2.5 * M};
    double slack = 1e-12;
    if (std::abs(x0) + 1.0 / psi.sx > 0.5 + slack)
        throw std::invalid_argument("make_test_function: support leaves |x| <= 1/2");
    double yLo = psi.yLo();
    if (yLo < 1.0 - slack) {
        double xNear = std::max(0.0, std::abs(x0) - 1.0 / psi.sx);
        if (xNear * xNear + yLo * yLo < 1.0 - slack)
            throw std::invalid_argument("make_test_function: support dips under the unit circle");
    }
    if (psi.yHi() > 4.0 * M + slack)
        throw std::invalid_argument("make_test_function: support exceeds the height ceiling");
    return psi;
}

// Radial window amp * bump((2y - a - b) / (b - a)) supported on (a, b).
struct RadialWindow {
    double a = 1.0, b = 2.0;
    double amp = 1.0;

    double operator()(double y) const {
        return amp * bump_mother((2.0 * y - a - b) / (b - a));
    }
};

// Mellin transform int_0^inf w(y) y^{s-1} dy of a compactly supported
// window. The integrand is entire in s and the bump is smooth, so Gauss
// panels converge spectrally.
template <class Window>
std::complex<double> mellin(const Window& w, std::complex<double> s, double lo, double hi,
                            long panels = 24) {
    auto pts = gauss10_composite(lo, hi, panels);
    std::vector<std::complex<double>> vals(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        auto [y, wt] = pts[i];
        vals[i] = wt * w(y) * std::exp((s - 1.0) * std::log(y));
    }
    return pairwise_sum(vals);
}

inline std::complex<double> mellin(const RadialWindow& w, std::complex<double> s) {
    return mellin(w, s, w.a, w.b);
}

// Mellin on a vertical line sigma - it. y^{-it} turns over t log(b/a) / 2 pi
// times across the support, so the panel count must track |t| or the
// transform aliases to a plateau instead of decaying.
inline std::complex<double> mellin_line(const RadialWindow& w, double sigma, double t) {
    long panels =
        std::max<long>(24, static_cast<long>(std::ceil(0.7 * std::abs(t) * std::log(w.b / w.a))));
    return mellin(w, std::complex<double>(sigma, -t), w.a, w.b, panels);
}

// Probe window on [1, 2], scaled so its Mellin transform at -1 equals pi/3.
// That normalization makes the long-window average of the unit function one.
inline RadialWindow make_probe_window() {
    RadialWindow h{1.0, 2.0, 1.0};
    double base = mellin(h, std::complex<double>(-1.0, 0.0)).real();
    h.amp = (kPi / 3.0) / base;
    return h;
}

// Fourier slice Psi_m(y) = int psi(x, y) e(-m x) dx over the x support.
// Panels track the oscillation (two per period of e(m x)) above a floor
// set by the bump itself: its Gauss convergence is subgeometric, and slice
// values feed identity checks near 1e-9.
inline std::complex<double> fourier_slice(const TestFunction& psi, long m, double y) {
    if (y <= psi.yLo() || y >= psi.yHi()) return 0.0;
    double span = psi.xHi() - psi.xLo();
    long panels = std::max<long>(24, 2 * static_cast<long>(std::ceil(std::abs(static_cast<double>(m)) * span)) + 16);
    auto pts = gauss10_composite(psi.xLo(), psi.xHi(), panels);
    std::vector<std::complex<double>> vals(pts.size());
    double om = -2.0 * kPi * static_cast<double>(m);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        auto [x, wt] = pts[i];
        vals[i] = wt * psi(x, y) * std::complex<double>(std::cos(om * x), std::sin(om * x));
    }
    return pairwise_sum(vals);
}

inline Json test_function_to_json(const TestFunction& psi) {
    return Json{{"x0", psi.x0}, {"y0", psi.y0}, {"sx", psi.sx}, {"sy", psi.sy}};
}

inline TestFunction test_function_from_json(const Json& j) {
    return TestFunction{j.at("x0").get<double>(), j.at("y0").get<double>(),
                        j.at("sx").get<double>(), j.at("sy").get<double>()};
}

}  // namespace hecke
