#pragma once

#include <cmath>
#include <complex>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "hecke/quadrature.hpp"
#include "hecke/sieve.hpp"
#include "hecke/specfun.hpp"
#include "hecke/surface.hpp"

namespace hecke {

// Real-analytic Eisenstein series via its Fourier expansion
// E(z, s) = y^s + phi(s) y^{1-s}
//         + (4 sqrt(y) / theta(s)) sum_{n>=1} tau_{s-1/2}(n) K_{s-1/2}(2 pi n y) cos(2 pi n x).
// The n sum is cut when the kernel bound d(n) sqrt(pi/(4 pi n y)) e^{-2 pi n y}
// drops 41 below the running scale; K decay makes that a hard tail bound.

namespace detail {
inline long eisenstein_cutoff(double y, double logScale) {
    long n = 1;
    while (true) {
        double u = 2.0 * kPi * static_cast<double>(n) * y;
        double bound = std::log(2.0 * std::sqrt(static_cast<double>(n))) +
                       0.5 * std::log(kPi / (2.0 * u)) - u;
        if (u > 820.0 || bound < logScale - 41.0) return n;
        ++n;
        if (n > 2000000) throw std::runtime_error("eisenstein_cutoff: cannot reach tail");
    }
}
}  // namespace detail

inline Cplx eval_eisenstein(SurfacePoint z, Cplx s) {
    if (s.real() < 0.5 || s.real() > 3.0)
        throw std::domain_error("eval_eisenstein: need 1/2 <= Re(s) <= 3");
    if (std::abs(s - Cplx(1.0)) < 1e-3) throw std::domain_error("eval_eisenstein: pole at s = 1");
    double y = z.y, x = z.x;
    if (!(y > 0.0)) throw std::domain_error("eval_eisenstein: need y > 0");

    Cplx phi = s.real() > 0.5 ? scattering_phi(s) : scattering_phi_line(s.imag());
    Cplx invTheta = s.real() > 0.5 ? 1.0 / theta_factor(s) : inv_theta_line(s.imag());
    Cplx head = std::exp(s * std::log(y)) + phi * std::exp((1.0 - s) * std::log(y));

    Cplx nu = s - 0.5;
    double logScale = std::log(std::max(std::abs(head), 1e-8));
    long nMax = detail::eisenstein_cutoff(y, logScale);
    Cplx tail = 0.0;
    for (long n = 1; n <= nMax; ++n) {
        auto kb = bessel_k(nu, 2.0 * kPi * n * y);
        if (kb.underflow) break;
        tail += divisor_tau_nu(nu, n) * kb.value * std::cos(2.0 * kPi * n * x);
    }
    return head + 4.0 * std::sqrt(y) * invTheta * tail;
}

// Fast path at s = 2: every ingredient is elementary.
inline double eval_eisenstein_s2(SurfacePoint z) {
    double y = z.y, x = z.x;
    if (!(y > 0.0)) throw std::domain_error("eval_eisenstein_s2: need y > 0");
    double zeta3 = 1.2020569031595942854;
    double phi2 = (kPi / 2.0) * zeta3 / (std::pow(kPi, 4) / 90.0);
    double invTheta2 = kPi * kPi / (std::pow(kPi, 4) / 90.0);  // 1 / (pi^{-2} 1! zeta(4))
    double head = y * y + phi2 / y;
    long nMax = detail::eisenstein_cutoff(y, std::log(std::max(head, 1e-8)));
    double tail = 0.0;
    for (long n = 1; n <= nMax; ++n) {
        double u = 2.0 * kPi * n * y;
        if (u > 700.0) break;
        tail += divisor_tau_nu(Cplx(1.5, 0.0), n).real() * bessel_k_three_half(u) *
                std::cos(2.0 * kPi * n * x);
    }
    return head + 4.0 * std::sqrt(y) * invTheta2 * tail;
}

// Fourier data of E(x + iy, sigma + i tau_j) at fixed y for a whole tau
// ladder: constant-term pair and cosine coefficients. Sharing the Bessel
// grid across the ladder is what makes contour integrals affordable.
struct EisensteinTable {
    double y = 0.0;
    Cplx sigma0;                          // coefficient of y^s term, always 1
    std::vector<Cplx> headPow;            // y^{s_j}
    std::vector<Cplx> scatPow;            // phi(s_j) y^{1-s_j}
    std::vector<std::vector<Cplx>> coef;  // coef[n-1][j], multiplies cos(2 pi n x)
    long nMax = 0;

    Cplx eval(double x, std::size_t j) const {
        Cplx v = headPow[j] + scatPow[j];
        for (long n = 1; n <= nMax; ++n)
            v += coef[static_cast<std::size_t>(n - 1)][j] * std::cos(2.0 * kPi * n * x);
        return v;
    }
};

inline EisensteinTable eisenstein_table(double y, double sigma, const std::vector<double>& taus) {
    if (!(y > 0.0)) throw std::domain_error("eisenstein_table: need y > 0");
    if (!(sigma > 1.0 && sigma <= 3.0))
        throw std::domain_error("eisenstein_table: need 1 < sigma <= 3 off the pole line");
    // The unscaled K / theta pairing cancels e^{pi tau / 2}; past tau ~ 24
    // the Bessel quadrature noise would dominate the true value.
    for (double tau : taus)
        if (std::abs(tau) > 24.0)
            throw std::domain_error("eisenstein_table: |tau| > 24 is numerically unreliable");
    EisensteinTable t;
    t.y = y;
    std::size_t m = taus.size();
    t.headPow.resize(m);
    t.scatPow.resize(m);
    std::vector<Cplx> invTheta(m);
    for (std::size_t j = 0; j < m; ++j) {
        Cplx s(sigma, taus[j]);
        t.headPow[j] = std::exp(s * std::log(y));
        t.scatPow[j] = scattering_phi(s) * std::exp((1.0 - s) * std::log(y));
        invTheta[j] = 1.0 / theta_factor(s);
    }
    t.nMax = detail::eisenstein_cutoff(y, sigma * std::log(y));
    t.coef.resize(static_cast<std::size_t>(t.nMax));
    for (long n = 1; n <= t.nMax; ++n) {
        double u = 2.0 * kPi * n * y;
        auto kb = bessel_k_batch(sigma - 0.5, taus, u);
        auto& row = t.coef[static_cast<std::size_t>(n - 1)];
        row.resize(m);
        for (std::size_t j = 0; j < m; ++j) {
            Cplx nu(sigma - 0.5, taus[j]);
            row[j] = 4.0 * std::sqrt(y) * invTheta[j] * divisor_tau_nu(nu, n) * kb[j];
        }
    }
    return t;
}

// Independent route for tests: the defining coset sum
// y^s + sum_{c >= 1} sum_{gcd(c, d) = 1} y^s / |c z + d|^{2s}
// for real s in (1, 3]. The d window and the c cutoff both get analytic
// tail corrections based on the coprime density phi(c)/c; the leftover error
// is the density fluctuation, far below the corrections themselves.
inline double eisenstein_coset_oracle(SurfacePoint z, double s, long cMax = 300) {
    if (!(s > 1.0 && s <= 3.0)) throw std::domain_error("eisenstein_coset_oracle: need 1 < s <= 3");
    double x = z.x, y = z.y;
    auto spf = spf_sieve(cMax);

    auto tail_d = [&](double W, double a) {
        // int_W^inf (t^2 + a^2)^{-s} dt via u = 1/t.
        auto pts = gauss10_composite(0.0, 1.0 / W, 4);
        double acc = 0.0;
        for (auto [u, w] : pts)
            acc += w * std::pow(u, 2.0 * s - 2.0) * std::pow(1.0 + a * a * u * u, -s);
        return acc;
    };

    double total = std::pow(y, s);
    for (long cc = 1; cc <= cMax; ++cc) {
        double c = static_cast<double>(cc);
        long phi = cc;
        {
            long mleft = cc;
            while (mleft > 1) {
                long p = spf[static_cast<std::size_t>(mleft)];
                phi -= phi / p;
                while (mleft % p == 0) mleft /= p;
            }
        }
        double a = c * y;
        double W = std::max(50.0, 12.0 * a);
        double sum_c = 0.0;
        long dLo = static_cast<long>(std::floor(-c * x - W));
        long dHi = static_cast<long>(std::ceil(-c * x + W));
        for (long dd = dLo; dd <= dHi; ++dd) {
            if (std::gcd(cc, std::abs(dd)) != 1) continue;
            double t = c * x + static_cast<double>(dd);
            sum_c += std::pow(t * t + a * a, -s);
        }
        // Window edges at midpoint offsets, weighted by the coprime density.
        double wl = -(static_cast<double>(dLo) + c * x) + 0.5;
        double wr = (static_cast<double>(dHi) + c * x) + 0.5;
        sum_c += (static_cast<double>(phi) / c) * (tail_d(wl, a) + tail_d(wr, a));
        total += std::pow(y, s) * sum_c;
    }
    // c tail: phi(c)/c averages to 6/pi^2 and the full d integral is exact.
    double B = std::sqrt(kPi) * std::exp(std::lgamma(s - 0.5) - std::lgamma(s));
    double cTail = (6.0 / (kPi * kPi)) * B * std::pow(y, 1.0 - s) *
                   std::pow(static_cast<double>(cMax), 2.0 - 2.0 * s) / (2.0 * s - 2.0);
    return total + cTail;
}

}  // namespace hecke
