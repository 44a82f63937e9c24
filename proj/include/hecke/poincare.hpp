#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "hecke/eisen.hpp"
#include "hecke/forms.hpp"
#include "hecke/windows.hpp"

namespace hecke {

// Coset orbit {gamma z : gamma in Gamma_inf \ Gamma} clipped to Im >= suppMin.
// z must lie in the standard fundamental domain; then c^2 <= 1/(suppMin y)
// and per c the d window is (c x + d)^2 <= y/suppMin - c^2 y^2.
inline std::vector<SurfacePoint> poincare_cosets(SurfacePoint z, double suppMin) {
    if (!(suppMin > 0.0)) throw std::domain_error("poincare_cosets: need suppMin > 0");
    std::vector<SurfacePoint> orbit;
    orbit.push_back(z);
    double x = z.x, y = z.y;
    double c2max = 1.0 / (suppMin * y);
    for (long c = 1; static_cast<double>(c) * static_cast<double>(c) <= c2max; ++c) {
        double cd = static_cast<double>(c);
        double win2 = y / suppMin - cd * cd * y * y;
        if (win2 < 0.0) continue;
        double win = std::sqrt(win2);
        long dLo = static_cast<long>(std::ceil(-cd * x - win));
        long dHi = static_cast<long>(std::floor(-cd * x + win));
        for (long d = dLo; d <= dHi; ++d) {
            mpz_class cz(c), dz(d), g, u, v;
            mpz_gcdext(g.get_mpz_t(), u.get_mpz_t(), v.get_mpz_t(), cz.get_mpz_t(),
                       dz.get_mpz_t());
            if (g != 1) continue;
            GroupElement gamma{v, -u, cz, dz};
            orbit.push_back(act(gamma, z));
        }
    }
    return orbit;
}

// P_m(z | psi) = sum over cosets of Psi_m(Im gamma z) e(m Re gamma z).
inline Cplx eval_incomplete_poincare(const TestFunction& psi, long m, SurfacePoint z) {
    Cplx acc = 0.0;
    for (const auto& w : poincare_cosets(z, psi.yLo())) {
        Cplx slice = fourier_slice(psi, m, w.y);
        if (slice == Cplx(0.0)) continue;
        double ph = 2.0 * kPi * static_cast<double>(m) * w.x;
        acc += slice * Cplx(std::cos(ph), std::sin(ph));
    }
    return acc;
}

// E(z | Psi) for a radial window: the m = 0 sum needs no phases.
inline double eval_incomplete_eisenstein(const RadialWindow& w, SurfacePoint z) {
    double acc = 0.0;
    for (const auto& p : poincare_cosets(z, w.a)) acc += w(p.y);
    return acc;
}

// tau cutoff for contour integrals: scan the Mellin transform along the
// vertical line until it has dropped ten orders below its maximum.
template <class MellinAbs>
inline double contour_cutoff(MellinAbs&& mabs, double cap = 240.0) {
    double peak = 0.0, t = 0.0;
    for (; t <= cap; t += 4.0) {
        double v = mabs(t);
        peak = std::max(peak, v);
        if (v < 1e-10 * peak) return t + 4.0;
    }
    return cap;
}

// Shared exponentially clustered Gauss nodes on the y support of a window.
struct SupportNodes {
    std::vector<double> y, w, slice_re, slice_im;
    double yLo = 0.0;
};

inline SupportNodes support_nodes(double yLo, double yHi, long panels = 24) {
    SupportNodes sn;
    sn.yLo = yLo;
    std::vector<PanelPoint> pts;
    double span = yHi - yLo;
    for (long p = 0; p < panels; ++p) {
        double f0 = static_cast<double>(p) / static_cast<double>(panels);
        double f1 = static_cast<double>(p + 1) / static_cast<double>(panels);
        gauss10_panel(yLo + span * f0 * f0, yLo + span * f1 * f1, pts);
    }
    sn.y.reserve(pts.size());
    sn.w.reserve(pts.size());
    for (auto [t, w] : pts) {
        sn.y.push_back(t);
        sn.w.push_back(w);
    }
    return sn;
}

// Shifted unfolded sum over coefficient indices,
//   sum_{n >= max(1, 1-m)} lam_f(n) lam_g(n+m) (n (n+m))^{(k-1)/2} I_n,
//   I_n = int profile(y) y^{k-2} exp(-2 pi (2n+m) y) dy,
// with the profile tabulated on shared nodes. Terms are accumulated as log
// magnitude plus unit phase so the k ~ 100 range stays finite; termination
// uses a lambda-free envelope so one vanishing eigenvalue cannot stop the
// series early. The calibration constants exp(logA1) are NOT applied here.
inline Cplx unfolded_shifted_sum(const Eigenform& f, const Eigenform& g, long k, long m,
                                 const SupportNodes& sn, const std::vector<Cplx>& profile) {
    std::size_t nn = sn.y.size();
    double c = (static_cast<double>(k) - 1.0) / 2.0;
    std::vector<double> logAbs;
    std::vector<Cplx> phase;
    double best = -1e300;
    long nLo = std::max(1L, 1L - m);
    long lamLimit = static_cast<long>(std::min(f.lambda.size(), g.lambda.size())) - 1;
    for (long n = nLo;; ++n) {
        if (n + m > lamLimit || n > lamLimit)
            throw std::runtime_error("unfolded_shifted_sum: lambda table too short");
        double alpha = 2.0 * kPi * static_cast<double>(2 * n + m);
        Cplx J = 0.0;
        for (std::size_t q = 0; q < nn; ++q) {
            double e = std::exp(static_cast<double>(k - 2) * std::log(sn.y[q]) -
                                alpha * (sn.y[q] - sn.yLo));
            J += sn.w[q] * profile[q] * e;
        }
        double lnPow = c * (std::log(static_cast<double>(n)) +
                            std::log(static_cast<double>(n + m))) -
                       alpha * sn.yLo;
        double lf = f.lam(n), lg = g.lam(n + m);
        double mag = std::abs(J) * std::abs(lf) * std::abs(lg);
        if (mag > 0.0) {
            logAbs.push_back(std::log(mag) + lnPow);
            double sg = (lf < 0.0 ? -1.0 : 1.0) * (lg < 0.0 ? -1.0 : 1.0);
            phase.push_back(sg * J / std::abs(J));
            best = std::max(best, logAbs.back());
        }
        double env = lnPow + std::log(std::max(std::abs(J), 1e-300)) +
                     std::log(4.0 * std::sqrt(static_cast<double>(n) * static_cast<double>(n + m)));
        if (n > nLo + 3 && env < best - 45.0) break;
    }
    Cplx acc = 0.0;
    for (std::size_t q = 0; q < logAbs.size(); ++q) acc += phase[q] * std::exp(logAbs[q] - best);
    return acc * std::exp(best);
}

// Spectral side of <P_m(. | psi) F_i, F_j>: the profile is the Fourier
// slice Psi_m of the window.
inline Cplx unfold_poincare_rhs(const EigenBasis& eb, std::size_t i, std::size_t j,
                                const TestFunction& psi, long m) {
    const auto& f = eb.forms.at(i);
    const auto& g = eb.forms.at(j);
    if (!f.calibrated() || !g.calibrated())
        throw std::runtime_error("unfold_poincare_rhs: calibrate forms first");
    auto sn = support_nodes(psi.yLo(), psi.yHi());
    std::vector<Cplx> slice(sn.y.size());
    for (std::size_t q = 0; q < sn.y.size(); ++q) slice[q] = fourier_slice(psi, m, sn.y[q]);
    return unfolded_shifted_sum(f, g, eb.k, m, sn, slice) * std::exp(f.logA1 + g.logA1);
}

// Geometric side by brute quadrature over the fundamental domain.
inline QuadResult<Cplx> unfold_poincare_lhs(const EigenBasis& eb, std::size_t i, std::size_t j,
                                            const TestFunction& psi, long m, long level = 2) {
    return integrate_fd(
        [&](double x, double y) {
            SurfacePoint z{x, y};
            Cplx p = eval_incomplete_poincare(psi, m, z);
            if (p == Cplx(0.0)) return Cplx(0.0);
            return p * eval_form(eb, i, x, y) * std::conj(eval_form(eb, j, x, y));
        },
        level, psi.yHi() + 1.0);
}

struct MellinGammaReport {
    Cplx direct;
    Cplx contour;
    double relDiff = 0.0;
};

// Gamma-factor identity for one unfolded integral:
//   int Psi_m(y) y^{k-2} e^{-alpha y} dy
//     = (1/2 pi) int_R Mellin[Psi_m](-2 - i tau) exp(lgamma(k+1+i tau)
//                                                    - (k+1+i tau) ln alpha) d tau,
// with alpha = 2 pi (2n + m).
inline MellinGammaReport mellin_gamma_check(const TestFunction& psi, long m, long n, long k) {
    double alpha = 2.0 * kPi * static_cast<double>(2 * n + m);
    double lspan = std::log(psi.yHi() / psi.yLo());
    // The bump's Gauss error decays only subgeometrically, so the slice
    // transform needs a deep panel floor before the identity bottoms out
    // near machine precision. The grid is fixed until |tau| gets large, so
    // the slice values are cached once and shared across the ladder.
    const long floorPanels = 64;
    auto basePts = gauss10_composite(psi.yLo(), psi.yHi(), floorPanels);
    std::vector<Cplx> baseSlice(basePts.size());
    parallel_for(static_cast<std::int64_t>(basePts.size()), [&](std::int64_t i) {
        auto q = static_cast<std::size_t>(i);
        baseSlice[q] = fourier_slice(psi, m, basePts[q].t);
    });
    auto sliceMellin = [&](Cplx w) {
        // y^{-i tau} oscillates, so the panel count follows |Im w|.
        long panels = std::max<long>(
            floorPanels, static_cast<long>(std::ceil(0.7 * std::abs(w.imag()) * lspan)));
        if (panels == floorPanels) {
            Cplx acc = 0.0;
            for (std::size_t q = 0; q < basePts.size(); ++q)
                acc += basePts[q].w * baseSlice[q] * std::exp((w - 1.0) * std::log(basePts[q].t));
            return acc;
        }
        return mellin([&](double y) { return fourier_slice(psi, m, y); }, w, psi.yLo(), psi.yHi(),
                      panels);
    };
    auto gammaAbs = [&](double tau) {
        Cplx s(static_cast<double>(k + 1), tau);
        return std::exp(std::real(log_gamma(s)) - static_cast<double>(k + 1) * std::log(alpha));
    };
    MellinGammaReport rep;
    {
        Cplx acc = 0.0;
        for (std::size_t q = 0; q < basePts.size(); ++q)
            acc += basePts[q].w * baseSlice[q] *
                   std::exp(static_cast<double>(k - 2) * std::log(basePts[q].t) -
                            alpha * basePts[q].t);
        rep.direct = acc;
    }
    {
        // The Gamma factor decays like e^{-pi tau / 2} and controls the
        // cutoff; the slice Mellin alone decays far too slowly to scan.
        double T = contour_cutoff(
            [&](double t) { return std::abs(sliceMellin(Cplx(-2.0, -t))) * gammaAbs(t); });
        // Two-sided grid: for x0 != 0 the slice is not conjugate symmetric.
        auto grid =
            gauss10_composite(-T, T, std::max<long>(16, static_cast<long>(2.0 * T / 0.25)));
        Cplx acc = 0.0;
        for (auto [tau, w] : grid) {
            Cplx s(static_cast<double>(k + 1), tau);
            Cplx val = sliceMellin(Cplx(-2.0, -tau)) * std::exp(log_gamma(s) - s * std::log(alpha));
            acc += w * val;
        }
        rep.contour = acc / (2.0 * kPi);
    }
    rep.relDiff = std::abs(rep.direct - rep.contour) / std::abs(rep.direct);
    return rep;
}

}  // namespace hecke
