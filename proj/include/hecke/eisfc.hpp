#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "hecke/parallel.hpp"
#include "hecke/poincare.hpp"

namespace hecke {

// Fourier modes of the incomplete Eisenstein series E(z | Psi) after the
// contour is moved to the critical line. The residue at s = 1 gives the
// constant (3/pi) Mellin[Psi](-1); the line leaves
//   a_0(y)   = that constant
//            + (1/2 pi) int_R M(t) (y^{1/2+it} + phi(1/2+it) y^{1/2-it}) dt,
//   a_l(y)   = (sqrt(y)/pi) int_R M(t) tau_{it}(|l|) K_{it}(2 pi |l| y)
//                           / theta(1/2+it) dt  (l != 0),
// where M(t) = Mellin[Psi](-1/2 - it). Both integrals fold onto t >= 0 by
// conjugation symmetry. K_{it} and 1/theta are both stored with the
// e^{-+ pi t / 2} exponential factored out; their product is unchanged and
// each factor stays O(1), which is what makes the line integral computable
// in doubles out to the cutoff.
struct IncompleteEisFC {
    RadialWindow psi;
    double residue = 0.0;              // (3/pi) Mellin[Psi](-1)
    std::vector<double> t, w;          // Gauss nodes on [0, T]
    std::vector<Cplx> mell;            // M(t_j)
    std::vector<Cplx> phiLine;         // phi(1/2 + i t_j)
    std::vector<Cplx> invThetaScaled;  // e^{-pi t_j/2} / theta(1/2 + i t_j)

    double a0(double y) const {
        double ly = std::log(y), ry = std::sqrt(y);
        double acc = 0.0;
        for (std::size_t j = 0; j < t.size(); ++j) {
            Cplx osc(std::cos(t[j] * ly), std::sin(t[j] * ly));
            acc += w[j] * (mell[j] * ry * (osc + phiLine[j] * std::conj(osc))).real();
        }
        return residue + acc / kPi;
    }

    double aEll(long ell, double y) const {
        if (ell == 0) return a0(y);
        long al = std::labs(ell);
        auto kb = bessel_k_it_scaled_ladder(t, 2.0 * kPi * static_cast<double>(al) * y);
        double acc = 0.0;
        for (std::size_t j = 0; j < t.size(); ++j)
            acc += w[j] * (mell[j] * invThetaScaled[j]).real() * divisor_tau_it(t[j], al) * kb[j];
        return 2.0 * std::sqrt(y) * acc / kPi;
    }
};

inline IncompleteEisFC make_eis_fc(const RadialWindow& psi, double cap = 600.0) {
    IncompleteEisFC fc;
    fc.psi = psi;
    fc.residue = (3.0 / kPi) * mellin(psi, Cplx(-1.0, 0.0)).real();
    double T = contour_cutoff([&](double t) { return std::abs(mellin_line(psi, -0.5, t)); }, cap);
    auto grid = gauss10_composite(0.0, T, std::max<long>(16, static_cast<long>(T / 0.35)));
    fc.t.reserve(grid.size());
    fc.w.reserve(grid.size());
    for (auto [t, w] : grid) {
        fc.t.push_back(t);
        fc.w.push_back(w);
    }
    std::size_t n = fc.t.size();
    fc.mell.resize(n);
    fc.phiLine.resize(n);
    fc.invThetaScaled.resize(n);
    parallel_for(static_cast<std::int64_t>(n), [&](std::int64_t j) {
        auto q = static_cast<std::size_t>(j);
        fc.mell[q] = mellin_line(psi, -0.5, fc.t[q]);
        fc.phiLine[q] = scattering_phi_line(fc.t[q]);
        fc.invThetaScaled[q] = inv_theta_line_scaled(fc.t[q]);
    });
    return fc;
}

// Independent route for tests: project the coset sum onto one mode by an
// explicit x integral over a period.
inline Cplx incomplete_eis_fc_direct(const RadialWindow& psi, long ell, double y) {
    long panels = std::max<long>(8, 4 * std::labs(ell));
    auto pts = gauss10_composite(-0.5, 0.5, panels);
    std::vector<Cplx> vals(pts.size());
    parallel_for(static_cast<std::int64_t>(pts.size()), [&](std::int64_t i) {
        auto q = static_cast<std::size_t>(i);
        double ph = -2.0 * kPi * static_cast<double>(ell) * pts[q].t;
        vals[q] = pts[q].w * eval_incomplete_eisenstein(psi, SurfacePoint{pts[q].t, y}) *
                  Cplx(std::cos(ph), std::sin(ph));
    });
    return pairwise_sum(vals);
}

// Mode profile a_l on a y grid by the same x projection, folded to the
// cosine by the d -> -d symmetry of the coset sum. This is the numerically
// benign representation: every term of the coset sum is nonnegative, so no
// cancellation amplifies. The contour route above is the identity under
// test; observables that only need the profile values use this one.
inline std::vector<double> eis_fc_direct_profile(const RadialWindow& psi, long ell,
                                                 const std::vector<double>& ys) {
    long panels = std::max<long>(8, 4 * std::labs(ell));
    auto pts = gauss10_composite(-0.5, 0.5, panels);
    double om = 2.0 * kPi * static_cast<double>(std::labs(ell));
    std::vector<double> out(ys.size());
    parallel_for(static_cast<std::int64_t>(ys.size()), [&](std::int64_t i) {
        auto q = static_cast<std::size_t>(i);
        double acc = 0.0;
        for (const auto& p : pts)
            acc += p.w * eval_incomplete_eisenstein(psi, SurfacePoint{p.t, ys[q]}) *
                   std::cos(om * p.t);
        out[q] = acc;
    });
    return out;
}

// Contour route for the full coset sum: synthesize E(z | Psi) from the
// critical-line modes. The mode size falls like e^{-2 pi l y}, so the
// truncation tracks 1/y.
inline double incomplete_eisenstein_contour(const IncompleteEisFC& fc, SurfacePoint z) {
    long L = 2 + static_cast<long>(std::ceil(34.0 / (2.0 * kPi * z.y)));
    double acc = fc.a0(z.y);
    for (long ell = 1; ell <= L; ++ell)
        acc += 2.0 * fc.aEll(ell, z.y) * std::cos(2.0 * kPi * static_cast<double>(ell) * z.x);
    return acc;
}

inline double incomplete_eisenstein_contour(const RadialWindow& w, SurfacePoint z) {
    return incomplete_eisenstein_contour(make_eis_fc(w), z);
}

}  // namespace hecke
