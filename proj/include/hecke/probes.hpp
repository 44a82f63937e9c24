#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "hecke/eisfc.hpp"

namespace hecke {

// h(Y y) as a window in y: the bump support contracts by 1/Y.
inline RadialWindow scale_window(const RadialWindow& h, double Y) {
    if (!(Y > 0.0)) throw std::domain_error("scale_window: need Y > 0");
    return RadialWindow{h.a / Y, h.b / Y, h.amp};
}

// Smoothed decorrelation probe
//   I(Y) = < E(. | h(Y .)) E(. | Psi) F_i, F_j >
// evaluated two ways: brute quadrature over the fundamental domain, and the
// unfolded mode sum over Fourier coefficients of E(. | Psi).
struct ProbeReport {
    Cplx direct;
    double directErr = 0.0;
    std::vector<Cplx> modes;  // I_l for l = 0, +-1, ..., +-ellMax (ell order in `ells`)
    std::vector<long> ells;
    Cplx modeSum;
    double relDiff = 0.0;
};

// One unfolded mode I_l. The profile uses the direct mode projection of the
// coset sum: it is the numerically benign representation of a_{Psi,l} (no
// cancellation to amplify), and the contour representation is checked
// against it separately.
inline Cplx probe_mode(const EigenBasis& eb, std::size_t i, std::size_t j, const RadialWindow& psi,
                       const RadialWindow& h, double Y, long ell) {
    const auto& f = eb.forms.at(i);
    const auto& g = eb.forms.at(j);
    auto hY = scale_window(h, Y);
    auto sn = support_nodes(hY.a, hY.b);
    auto afc = eis_fc_direct_profile(psi, ell, sn.y);
    std::vector<Cplx> profile(sn.y.size());
    for (std::size_t q = 0; q < sn.y.size(); ++q) profile[q] = hY(sn.y[q]) * afc[q];
    return unfolded_shifted_sum(f, g, eb.k, ell, sn, profile) * std::exp(f.logA1 + g.logA1);
}

inline ProbeReport probe_decomposition(const EigenBasis& eb, std::size_t i, std::size_t j,
                                       const RadialWindow& h, const RadialWindow& psi, double Y,
                                       long ellMax, long level = 2) {
    if (!eb.forms.at(i).calibrated() || !eb.forms.at(j).calibrated())
        throw std::runtime_error("probe_decomposition: calibrate forms first");
    ProbeReport rep;
    auto hY = scale_window(h, Y);
    double yMax = std::max(psi.b, hY.b) + 1.0;
    auto direct = integrate_fd(
        [&](double x, double y) -> Cplx {
            SurfacePoint z{x, y};
            double eh = eval_incomplete_eisenstein(hY, z);
            if (eh == 0.0) return 0.0;
            double ep = eval_incomplete_eisenstein(psi, z);
            if (ep == 0.0) return 0.0;
            return eh * ep * eval_form(eb, i, x, y) * std::conj(eval_form(eb, j, x, y));
        },
        level, yMax);
    rep.direct = direct.value;
    rep.directErr = direct.err;

    rep.modeSum = 0.0;
    for (long ell = -ellMax; ell <= ellMax; ++ell) {
        rep.ells.push_back(ell);
        Cplx v = probe_mode(eb, i, j, psi, h, Y, ell);
        rep.modes.push_back(v);
        rep.modeSum += v;
    }
    rep.relDiff = std::abs(rep.direct - rep.modeSum) / std::abs(rep.direct);
    return rep;
}

// Same zero mode computed the other way around: substitute the critical-line
// representation of a_{Psi,0} and swap the t integral with the mode sum.
inline Cplx probe_zero_mode_swapped(const EigenBasis& eb, std::size_t i, std::size_t j,
                                    const IncompleteEisFC& fc, const RadialWindow& h, double Y) {
    const auto& f = eb.forms.at(i);
    const auto& g = eb.forms.at(j);
    auto hY = scale_window(h, Y);
    auto sn = support_nodes(hY.a, hY.b);
    std::size_t nn = sn.y.size();

    std::vector<Cplx> flat(nn);
    for (std::size_t q = 0; q < nn; ++q) flat[q] = hY(sn.y[q]);
    Cplx acc = fc.residue * unfolded_shifted_sum(f, g, eb.k, 0, sn, flat);

    std::vector<Cplx> sVals(fc.t.size());
    parallel_for(static_cast<std::int64_t>(fc.t.size()), [&](std::int64_t jj) {
        auto q = static_cast<std::size_t>(jj);
        std::vector<Cplx> p(nn);
        for (std::size_t r = 0; r < nn; ++r) {
            double ly = std::log(sn.y[r]);
            p[r] = hY(sn.y[r]) * std::sqrt(sn.y[r]) * Cplx(std::cos(fc.t[q] * ly),
                                                           std::sin(fc.t[q] * ly));
        }
        sVals[q] = unfolded_shifted_sum(f, g, eb.k, 0, sn, p);
    });
    Cplx line = 0.0;
    for (std::size_t q = 0; q < fc.t.size(); ++q) {
        Cplx integrand = fc.mell[q] * (sVals[q] + fc.phiLine[q] * std::conj(sVals[q]));
        line += fc.w[q] * integrand;
    }
    // Real fold of the two half lines.
    acc += Cplx(line.real() / kPi, 0.0);
    return acc * std::exp(f.logA1 + g.logA1);
}

// Rankin-Selberg check at s = 2: geometric integral against E(z, 2) versus
// the Dirichlet series route with a two point Richardson tail estimate.
struct RankinSelbergReport {
    double lhs = 0.0, lhsErr = 0.0;
    double rhs = 0.0;
    double relDiff = 0.0;
};

inline RankinSelbergReport rankin_selberg_check(const EigenBasis& eb, std::size_t i, std::size_t j,
                                                long nMax, long level = 2) {
    const auto& f = eb.forms.at(i);
    const auto& g = eb.forms.at(j);
    if (!f.calibrated() || !g.calibrated())
        throw std::runtime_error("rankin_selberg_check: calibrate forms first");
    long lamLimit = static_cast<long>(std::min(f.lambda.size(), g.lambda.size())) - 1;
    if (nMax > lamLimit) throw std::runtime_error("rankin_selberg_check: lambda table too short");

    RankinSelbergReport rep;
    auto lhs = integrate_fd(
        [&](double x, double y) {
            return eval_eisenstein_s2(SurfacePoint{x, y}) *
                   (eval_form(eb, i, x, y) * std::conj(eval_form(eb, j, x, y))).real();
        },
        level);
    rep.lhs = lhs.value;
    rep.lhsErr = lhs.err;

    double sHalf = 0.0, sFull = 0.0;
    for (long n = 1; n <= nMax; ++n) {
        double term = f.lam(n) * g.lam(n) / (static_cast<double>(n) * static_cast<double>(n));
        sFull += term;
        if (n <= nMax / 2) sHalf += term;
    }
    double sExtrap = 2.0 * sFull - sHalf;
    long k = eb.k;
    rep.rhs = std::exp(f.logA1 + g.logA1 + std::lgamma(static_cast<double>(k + 1)) -
                       static_cast<double>(k + 1) * std::log(4.0 * kPi)) *
              sExtrap;
    rep.relDiff = std::abs(rep.lhs - rep.rhs) / std::max(std::abs(rep.lhs), std::abs(rep.rhs));
    return rep;
}

// Pair matrix <psi F_i, F_j> in one quadrature sweep: every form is
// evaluated once per node, then the d^2 products accumulate into
// deterministic per-pair slots.
struct PairMatrixResult {
    std::vector<std::vector<Cplx>> inner;
    std::vector<std::vector<double>> errs;  // per-pair two-level estimates
    double err = 0.0;                       // max entry
};

template <class Weight>
inline PairMatrixResult windowed_pair_matrix(const EigenBasis& eb, Weight&& psi, long level,
                                             double yMax) {
    std::size_t d = eb.dim();
    auto sweep = [&](long lv) {
        auto nodes = fd_nodes(lv, yMax);
        std::vector<std::vector<Cplx>> slots(d * d, std::vector<Cplx>(nodes.size(), Cplx(0.0)));
        parallel_for(static_cast<std::int64_t>(nodes.size()), [&](std::int64_t q) {
            const auto& nd = nodes[static_cast<std::size_t>(q)];
            double wpsi = psi(nd.x, nd.y);
            if (wpsi == 0.0) return;
            std::vector<Cplx> vals(d);
            for (std::size_t a = 0; a < d; ++a) vals[a] = eval_form(eb, a, nd.x, nd.y);
            for (std::size_t a = 0; a < d; ++a)
                for (std::size_t b = 0; b < d; ++b)
                    slots[a * d + b][static_cast<std::size_t>(q)] =
                        nd.w * wpsi * vals[a] * std::conj(vals[b]);
        });
        std::vector<std::vector<Cplx>> m(d, std::vector<Cplx>(d));
        for (std::size_t a = 0; a < d; ++a)
            for (std::size_t b = 0; b < d; ++b) m[a][b] = pairwise_sum(slots[a * d + b]);
        return m;
    };
    auto fine = sweep(level);
    auto coarse = sweep(level > 0 ? level - 1 : 0);
    PairMatrixResult res;
    res.inner = fine;
    res.errs.assign(d, std::vector<double>(d, 0.0));
    for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = 0; b < d; ++b) {
            res.errs[a][b] = std::abs(fine[a][b] - coarse[a][b]);
            res.err = std::max(res.err, res.errs[a][b]);
        }
    return res;
}

// Mass observable <psi, |sum_j c_j F_j|^2>: direct quadrature against the
// bilinear expansion through the pair matrix, with the equidistribution
// reference value (3/pi) <psi, 1>.
struct MassReport {
    Cplx direct;
    double directErr = 0.0;
    Cplx bilinear;
    double bilinearErr = 0.0;
    double queReference = 0.0;
    double relDiff = 0.0;
};

inline MassReport mass_observable(const EigenBasis& eb, const std::vector<Cplx>& coeff,
                                  const TestFunction& psi, long level = 2) {
    if (coeff.size() != eb.dim()) throw std::domain_error("mass_observable: coefficient size");
    MassReport rep;
    double yMax = psi.yHi() + 1.0;
    auto direct = integrate_fd(
        [&](double x, double y) -> Cplx {
            double w = psi(x, y);
            if (w == 0.0) return 0.0;
            Cplx s = 0.0;
            for (std::size_t a = 0; a < eb.dim(); ++a) s += coeff[a] * eval_form(eb, a, x, y);
            return w * std::norm(s);
        },
        level, yMax);
    rep.direct = direct.value;
    rep.directErr = direct.err;

    auto pm = windowed_pair_matrix(eb, psi, level, yMax);
    Cplx acc = 0.0;
    for (std::size_t a = 0; a < eb.dim(); ++a)
        for (std::size_t b = 0; b < eb.dim(); ++b)
            acc += coeff[a] * std::conj(coeff[b]) * pm.inner[a][b];
    rep.bilinear = acc;
    rep.bilinearErr = pm.err;

    auto ref = integrate_fd([&](double x, double y) { return psi(x, y); }, level, yMax);
    rep.queReference = (3.0 / kPi) * ref.value;
    rep.relDiff = std::abs(rep.direct - rep.bilinear) /
                  std::max({std::abs(rep.direct), std::abs(rep.bilinear), 1e-300});
    return rep;
}

// Fourth moment through the weight doubling map: expanding F^2 over an
// orthonormal eigenbasis of the doubled weight turns the L^4 norm into a
// finite Parseval sum. Partial sums must increase toward the left side.
struct L4Report {
    double lhs = 0.0, lhsErr = 0.0;
    std::vector<double> partial;
    double total = 0.0;
    double relDiff = 0.0;
};

inline L4Report l4_parseval(const EigenBasis& ebk, const EigenBasis& eb2k, std::size_t idx,
                            long level = 2) {
    if (eb2k.k != 2 * ebk.k) throw std::domain_error("l4_parseval: weights must double");
    if (!ebk.forms.at(idx).calibrated())
        throw std::runtime_error("l4_parseval: calibrate the source form first");
    for (const auto& h : eb2k.forms)
        if (!h.calibrated()) throw std::runtime_error("l4_parseval: calibrate the target basis");

    L4Report rep;
    auto lhs = integrate_fd(
        [&](double x, double y) {
            double a = std::abs(eval_form(ebk, idx, x, y));
            return a * a * a * a;
        },
        level);
    rep.lhs = lhs.value;
    rep.lhsErr = lhs.err;

    std::size_t d2 = eb2k.dim();
    std::vector<Cplx> inner(d2);
    for (std::size_t h = 0; h < d2; ++h) {
        auto r = integrate_fd(
            [&](double x, double y) {
                Cplx fa = eval_form(ebk, idx, x, y);
                return fa * fa * std::conj(eval_form(eb2k, h, x, y));
            },
            level);
        inner[h] = r.value;
    }
    double run = 0.0;
    for (std::size_t h = 0; h < d2; ++h) {
        run += std::norm(inner[h]);
        rep.partial.push_back(run);
    }
    rep.total = run;
    rep.relDiff = std::abs(rep.lhs - rep.total) / std::max(rep.lhs, rep.total);
    return rep;
}

}  // namespace hecke
