#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "hecke/parallel.hpp"
#include "hecke/quadrature.hpp"

namespace hecke {

using Cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

// log Gamma via Stirling after shifting Re(s) past 15. Nine Bernoulli terms
// leave a remainder near 6e-23 at Re(s) = 15, far below double rounding.
// Valid for Re(s) > 0; every shifted log stays in the right half plane, so
// principal logs never cross the branch cut.
inline Cplx log_gamma(Cplx s) {
    if (s.real() <= 0.0 && s.imag() == 0.0 && s.real() == std::floor(s.real()))
        throw std::domain_error("log_gamma: pole at non-positive integer");
    static const double coef[9] = {
        1.0 / 12.0,        // B2 / (2*1)
        -1.0 / 360.0,      // B4 / (4*3)
        1.0 / 1260.0,      // B6 / (6*5)
        -1.0 / 1680.0,     // B8 / (8*7)
        1.0 / 1188.0,      // B10 / (10*9)
        -691.0 / 360360.0, // B12 / (12*11)
        1.0 / 156.0,       // B14 / (14*13)
        -3617.0 / 122400.0,// B16 / (16*15)
        43867.0 / 244188.0 // B18 / (18*17)
    };
    Cplx shift = 0.0;
    while (s.real() < 15.0) {
        shift -= std::log(s);
        s += 1.0;
    }
    Cplx inv = 1.0 / s, inv2 = inv * inv;
    Cplx tail = 0.0, p = inv;
    for (double cj : coef) {
        tail += cj * p;
        p *= inv2;
    }
    return (s - 0.5) * std::log(s) - s + 0.5 * std::log(2.0 * kPi) + tail + shift;
}

// Euler-Maclaurin zeta with explicit cutoff N and correction order 2*terms.
// Exposed so tests can play two parameter choices against each other.
inline Cplx zeta_with_params(Cplx s, long N, int terms) {
    Cplx sum = 0.0;
    for (long n = N - 1; n >= 1; --n) sum += std::exp(-s * std::log(static_cast<double>(n)));
    double lnN = std::log(static_cast<double>(N));
    sum += std::exp((1.0 - s) * lnN) / (s - 1.0);
    Cplx NmS = std::exp(-s * lnN);
    sum += 0.5 * NmS;
    static const double b2j_fact[6] = {
        1.0 / 12.0,            // B2 / 2!
        -1.0 / 720.0,          // B4 / 4!
        1.0 / 30240.0,         // B6 / 6!
        -1.0 / 1209600.0,      // B8 / 8!
        1.0 / 47900160.0,      // B10 / 10!
        -691.0 / 1307674368000.0};
    Cplx poch = s;              // rising factorial s (s+1) ... (s + 2j - 2)
    Cplx Npow = NmS / static_cast<double>(N);
    for (int j = 1; j <= terms; ++j) {
        sum += b2j_fact[j - 1] * poch * Npow;
        poch *= (s + Cplx(2.0 * j - 1.0)) * (s + Cplx(2.0 * j));
        Npow /= static_cast<double>(N) * static_cast<double>(N);
    }
    return sum;
}

// zeta on Re(s) > 0. The cutoff grows with |Im(s)| so the correction series
// keeps ten significant digits out to |Im(s)| of a few hundred.
inline Cplx zeta(Cplx s) {
    if (s.real() <= 0.0) throw std::domain_error("zeta: need Re(s) > 0");
    if (std::abs(s - Cplx(1.0)) < 1e-12) throw std::domain_error("zeta: pole at s = 1");
    long N = std::max<long>(50, 2 * static_cast<long>(std::ceil(std::abs(s.imag()))));
    return zeta_with_params(s, N, 4);
}

// Completed factor pi^{-s} Gamma(s) zeta(2s).
inline Cplx theta_factor(Cplx s) {
    return std::exp(-s * std::log(kPi) + log_gamma(s)) * zeta(2.0 * s);
}

// Scattering coefficient sqrt(pi) Gamma(s - 1/2) zeta(2s - 1) /
// (Gamma(s) zeta(2s)) for Re(s) > 1/2, away from the pole at s = 1.
inline Cplx scattering_phi(Cplx s) {
    if (s.real() <= 0.5) throw std::domain_error("scattering_phi: need Re(s) > 1/2");
    if (std::abs(s - Cplx(1.0)) < 1e-3) throw std::domain_error("scattering_phi: pole at s = 1");
    return std::sqrt(kPi) * std::exp(log_gamma(s - 0.5) - log_gamma(s)) * zeta(2.0 * s - 1.0) /
           zeta(2.0 * s);
}

// On the critical line the completed-factor functional equation collapses to
// a unimodular ratio: phi(1/2 + it) = conj(w) / w = e^{-2i arg w} with
// w = theta(1/2 + it). Work with the argument alone: |w| underflows past
// t ~ 460 while arg w stays benign. The zeta pole at t = 0 forces the
// limit value -1.
inline Cplx scattering_phi_line(double t) {
    if (t == 0.0) return Cplx(-1.0, 0.0);
    double argw = -t * std::log(kPi) + std::imag(log_gamma(Cplx(0.5, t))) +
                  std::arg(zeta(Cplx(1.0, 2.0 * t)));
    return Cplx(std::cos(-2.0 * argw), std::sin(-2.0 * argw));
}

// 1 / theta(1/2 + it); the pole of zeta(1 + 2it) at t = 0 sends this to zero.
inline Cplx inv_theta_line(double t) {
    if (t == 0.0) return Cplx(0.0, 0.0);
    return 1.0 / theta_factor(Cplx(0.5, t));
}

// e^{-pi t / 2} / theta(1/2 + it), the O(1) partner of the scaled Bessel
// ladder: |1/theta| grows like e^{pi t / 2}, so pairing the two scalings
// keeps every factor representable while the product stays exact.
inline Cplx inv_theta_line_scaled(double t) {
    if (t == 0.0) return Cplx(0.0, 0.0);
    Cplx s(0.5, t);
    return std::exp(s * std::log(kPi) - log_gamma(s) - kPi * t / 2.0) / zeta(2.0 * s);
}

struct BesselResult {
    Cplx value{};
    bool underflow = false;
};

namespace detail {
// Integration grid for K_nu(u) = int_0^inf exp(-u cosh v) cosh(nu v) dv.
// The cutoff keeps going until exp(-u cosh v) is dead even against the
// cosh(nu v) growth of any order used here.
inline std::vector<PanelPoint> bessel_grid(double u, double imAbs) {
    double V = std::acosh(std::max(820.0 / u, 1.0 + 1e-8));
    double width = std::min(0.5, kPi / (2.0 * (1.0 + imAbs)));
    long panels = std::max<long>(1, static_cast<long>(std::ceil(V / width)));
    std::vector<PanelPoint> pts;
    pts.reserve(static_cast<std::size_t>(panels) * 12);
    for (long p = 0; p < panels; ++p) {
        double a = V * p / panels, b = V * (p + 1) / panels;
        double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        for (int i = 0; i < 6; ++i) {
            pts.push_back({mid - half * kGauss12X[i], half * kGauss12W[i]});
            pts.push_back({mid + half * kGauss12X[i], half * kGauss12W[i]});
        }
    }
    return pts;
}
}  // namespace detail

// Modified Bessel K_nu(u) for u > 0 and complex order, by the cosh integral
// representation. Orders used downstream satisfy |Re nu| <= 2.
inline BesselResult bessel_k(Cplx nu, double u) {
    if (!(u > 0.0)) throw std::domain_error("bessel_k: need u > 0");
    if (u > 700.0) return {Cplx(0.0), true};
    auto grid = detail::bessel_grid(u, std::abs(nu.imag()));
    Cplx acc = 0.0;
    for (auto [v, w] : grid) {
        double e = std::exp(-u * std::cosh(v));
        if (e == 0.0) continue;
        acc += w * e * std::cosh(nu * v);
    }
    return {acc, false};
}

// K_{it}(u) is real for real t. Shares the grid across a whole t ladder.
inline std::vector<double> bessel_k_imag_batch(const std::vector<double>& ts, double u) {
    if (!(u > 0.0)) throw std::domain_error("bessel_k_imag_batch: need u > 0");
    std::vector<double> out(ts.size(), 0.0);
    if (u > 700.0) return out;
    double tmax = 0.0;
    for (double t : ts) tmax = std::max(tmax, std::abs(t));
    auto grid = detail::bessel_grid(u, tmax);
    std::vector<PanelPoint> wexp;
    wexp.reserve(grid.size());
    for (auto [v, w] : grid) {
        double e = std::exp(-u * std::cosh(v));
        if (e != 0.0) wexp.push_back({v, w * e});
    }
    for (std::size_t j = 0; j < ts.size(); ++j) {
        double s = 0.0;
        for (auto [v, we] : wexp) s += we * std::cos(ts[j] * v);
        out[j] = s;
    }
    return out;
}

// K_{sigma + i tau_j}(u) for a shared real part and a tau ladder.
inline std::vector<Cplx> bessel_k_batch(double sigma, const std::vector<double>& taus, double u) {
    if (!(u > 0.0)) throw std::domain_error("bessel_k_batch: need u > 0");
    std::vector<Cplx> out(taus.size(), Cplx(0.0));
    if (u > 700.0) return out;
    double tmax = 0.0;
    for (double t : taus) tmax = std::max(tmax, std::abs(t));
    auto grid = detail::bessel_grid(u, tmax);
    std::vector<std::array<double, 3>> rows;  // v, w e cosh(sigma v), w e sinh(sigma v)
    rows.reserve(grid.size());
    for (auto [v, w] : grid) {
        double e = std::exp(-u * std::cosh(v));
        if (e != 0.0) rows.push_back({v, w * e * std::cosh(sigma * v), w * e * std::sinh(sigma * v)});
    }
    for (std::size_t j = 0; j < taus.size(); ++j) {
        double re = 0.0, im = 0.0;
        for (auto& r : rows) {
            re += r[1] * std::cos(taus[j] * r[0]);
            im += r[2] * std::sin(taus[j] * r[0]);
        }
        out[j] = Cplx(re, im);
    }
    return out;
}

// Scaled ladder out[j] = e^{pi t_j / 2} K_{i t_j}(u). The plain cosh
// integral loses e^{pi t / 2} to cancellation, so rotate its path to
// Im v = pi/2 - delta: the vertical leg is purely imaginary and drops out
// of the real part, leaving
//   K_{it}(u) = e^{-t(pi/2 - delta)}
//               Re int_0^inf e^{-u sin(delta) cosh w}
//                            e^{i(t w - u cos(delta) sinh w)} dw.
// Only e^{t delta} is still cancelled; delta = 20 / max t keeps the noise
// floor near 1e-7 absolute. The integrand is even in w and analytic for
// |Im w| < delta, so the trapezoid rule converges like e^{-d(2 pi/h - t)}
// with d just under delta; h below gives e^{-48}. One grid serves the
// whole ladder.
inline std::vector<double> bessel_k_it_scaled_ladder(const std::vector<double>& ts, double u) {
    if (!(u > 0.0)) throw std::domain_error("bessel_k_it_scaled_ladder: need u > 0");
    double tMax = 1.0;
    for (double t : ts) {
        if (!(t >= 0.0)) throw std::domain_error("bessel_k_it_scaled_ladder: need t >= 0");
        tMax = std::max(tMax, t);
    }
    double delta = std::min(kPi / 2.0, 20.0 / tMax);
    double sd = std::sin(delta), cd = std::cos(delta);
    double us = u * sd;
    double W = std::acosh((us + 45.0) / us);
    double h = 2.0 * kPi / (tMax + 48.0 / delta);
    long n = static_cast<long>(std::ceil(W / h));
    std::vector<double> w(n + 1), base(n + 1), ph0(n + 1);
    for (long j = 0; j <= n; ++j) {
        double wj = h * static_cast<double>(j);
        w[j] = wj;
        base[j] = (j == 0 ? 0.5 * h : h) * std::exp(-us * std::cosh(wj));
        ph0[j] = u * cd * std::sinh(wj);
    }
    std::vector<double> out(ts.size());
    parallel_for(static_cast<std::int64_t>(ts.size()), [&](std::int64_t idx) {
        auto i = static_cast<std::size_t>(idx);
        double acc = 0.0;
        for (long j = n; j >= 0; --j) acc += base[j] * std::cos(ts[i] * w[j] - ph0[j]);
        out[i] = std::exp(ts[i] * delta) * acc;
    });
    return out;
}

inline double bessel_k_it_scaled(double t, double u) {
    return bessel_k_it_scaled_ladder(std::vector<double>{t}, u)[0];
}

// Closed forms for half-integer order, used on the hot path at s = 2.
inline double bessel_k_half(double u) { return std::sqrt(kPi / (2.0 * u)) * std::exp(-u); }
inline double bessel_k_three_half(double u) {
    return std::sqrt(kPi / (2.0 * u)) * std::exp(-u) * (1.0 + 1.0 / u);
}

// Unitary divisor sum tau_{it}(n) = sum_{ab=n} (a/b)^{it}, real by pairing.
inline double divisor_tau_it(double t, long n) {
    if (n < 1) throw std::domain_error("divisor_tau_it: need n >= 1");
    double s = 0.0;
    for (long d = 1; d * d <= n; ++d) {
        if (n % d != 0) continue;
        long q = n / d;
        if (d == q)
            s += 1.0;
        else
            s += 2.0 * std::cos(t * std::log(static_cast<double>(d) / static_cast<double>(q)));
    }
    return s;
}

// Same sum for a complex exponent.
inline Cplx divisor_tau_nu(Cplx nu, long n) {
    if (n < 1) throw std::domain_error("divisor_tau_nu: need n >= 1");
    Cplx s = 0.0;
    for (long d = 1; d * d <= n; ++d) {
        if (n % d != 0) continue;
        long q = n / d;
        if (d == q)
            s += 1.0;
        else
            s += 2.0 * std::cosh(nu * std::log(static_cast<double>(d) / static_cast<double>(q)));
    }
    return s;
}

}  // namespace hecke
