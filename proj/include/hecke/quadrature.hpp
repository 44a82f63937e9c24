#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "hecke/parallel.hpp"

namespace hecke {

// Gauss-Legendre abscissae (positive half) and weights on [-1, 1].
inline constexpr double kGauss10X[5] = {
    0.14887433898163121088, 0.43339539412924719080, 0.67940956829902440624,
    0.86506336668898451073, 0.97390652851717172008};
inline constexpr double kGauss10W[5] = {
    0.29552422471475287017, 0.26926671930999635509, 0.21908636251598204400,
    0.14945134915058059315, 0.066671344308688137594};

inline constexpr double kGauss12X[6] = {
    0.12523340851146891547, 0.36783149899818019375, 0.58731795428661744730,
    0.76990267419430468704, 0.90411725637047485668, 0.98156063424671925069};
inline constexpr double kGauss12W[6] = {
    0.24914704581340278500, 0.23349253653835480876, 0.20316742672306592175,
    0.16007832854334622633, 0.10693932599531843096, 0.047175336386511827195};

struct PanelPoint {
    double t;
    double w;
};

// Gauss-10 points of one panel [a, b].
inline void gauss10_panel(double a, double b, std::vector<PanelPoint>& out) {
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (int i = 0; i < 5; ++i) {
        out.push_back({mid - half * kGauss10X[i], half * kGauss10W[i]});
        out.push_back({mid + half * kGauss10X[i], half * kGauss10W[i]});
    }
}

inline std::vector<PanelPoint> gauss10_composite(double a, double b, long panels) {
    std::vector<PanelPoint> pts;
    pts.reserve(static_cast<std::size_t>(panels) * 10);
    for (long p = 0; p < panels; ++p)
        gauss10_panel(a + (b - a) * p / panels, a + (b - a) * (p + 1) / panels, pts);
    return pts;
}

// One quadrature node on the surface; w already contains the hyperbolic
// measure dx dy / y^2.
struct QuadratureNode {
    double x;
    double y;
    double w;
};

// Nodes covering the fundamental domain, split into the arc band
// (sqrt(3)/2 <= y <= 1, sqrt(1 - y^2) <= |x| <= 1/2) parametrized by
// y = cos(theta), and the cusp rectangle y >= 1 mapped by u = 1/y, where the
// measure becomes exactly dx du. The u interval [0, 1] is cut at 1/yMax and
// the piece above yMax is kept as a single panel, so integrands that decay
// at the cusp keep their full mass.
inline std::vector<QuadratureNode> fd_nodes(long level, double yMax = 50.0) {
    if (level < 0 || yMax <= 1.0) throw std::invalid_argument("fd_nodes: bad parameters");
    long scale = 1L << level;
    std::vector<QuadratureNode> nodes;

    const double pi = 3.14159265358979323846;
    auto thetas = gauss10_composite(0.0, pi / 6.0, 2 * scale);
    for (auto [theta, wt] : thetas) {
        double y = std::cos(theta), s = std::sin(theta);
        double band = wt * s / (y * y);
        auto xs = gauss10_composite(s, 0.5, scale);
        for (auto [x, wx] : xs) {
            nodes.push_back({x, y, band * wx});
            nodes.push_back({-x, y, band * wx});
        }
    }

    double uMin = 1.0 / yMax;
    std::vector<PanelPoint> us = gauss10_composite(uMin, 1.0, 4 * scale);
    gauss10_panel(0.0, uMin, us);
    auto xs = gauss10_composite(-0.5, 0.5, 2 * scale);
    for (auto [u, wu] : us)
        for (auto [x, wx] : xs) nodes.push_back({x, 1.0 / u, wu * wx});
    return nodes;
}

// Nodes on the strip |x| <= 1/2, yMin <= y <= yMax, geometric in y.
inline std::vector<QuadratureNode> strip_nodes(long level, double yMin, double yMax) {
    if (level < 0 || !(0.0 < yMin && yMin < yMax))
        throw std::invalid_argument("strip_nodes: bad parameters");
    long scale = 1L << level;
    long ny = 8 * scale, nx = 2 * scale;
    double ratio = std::pow(yMax / yMin, 1.0 / static_cast<double>(ny));
    std::vector<QuadratureNode> nodes;
    std::vector<PanelPoint> ys;
    for (long p = 0; p < ny; ++p)
        gauss10_panel(yMin * std::pow(ratio, static_cast<double>(p)),
                      yMin * std::pow(ratio, static_cast<double>(p + 1)), ys);
    auto xs = gauss10_composite(-0.5, 0.5, nx);
    for (auto [y, wy] : ys)
        for (auto [x, wx] : xs) nodes.push_back({x, y, wy * wx / (y * y)});
    return nodes;
}

// Evaluate f on every node in parallel, then reduce in a fixed pairwise
// order. The result is independent of the worker count.
template <class F>
auto integrate_nodes(const std::vector<QuadratureNode>& nodes, F&& f)
    -> decltype(f(0.0, 0.0)) {
    using T = decltype(f(0.0, 0.0));
    std::vector<T> vals(nodes.size());
    parallel_for(static_cast<std::int64_t>(nodes.size()), [&](std::int64_t i) {
        const auto& n = nodes[static_cast<std::size_t>(i)];
        vals[static_cast<std::size_t>(i)] = f(n.x, n.y) * n.w;
    });
    return pairwise_sum(vals);
}

template <class T>
struct QuadResult {
    T value{};
    double err = 0.0;
};

// Integral over the fundamental domain with a two-level error estimate.
template <class F>
auto integrate_fd(F&& f, long level = 2, double yMax = 50.0)
    -> QuadResult<decltype(f(0.0, 0.0))> {
    auto fine = integrate_nodes(fd_nodes(level, yMax), f);
    auto coarse = integrate_nodes(fd_nodes(level > 0 ? level - 1 : 0, yMax), f);
    return {fine, std::abs(fine - coarse)};
}

template <class F>
auto integrate_strip(F&& f, double yMin, double yMax, long level = 2)
    -> QuadResult<decltype(f(0.0, 0.0))> {
    auto fine = integrate_nodes(strip_nodes(level, yMin, yMax), f);
    auto coarse = integrate_nodes(strip_nodes(level > 0 ? level - 1 : 0, yMin, yMax), f);
    return {fine, std::abs(fine - coarse)};
}

}  // namespace hecke
