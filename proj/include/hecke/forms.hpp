#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "hecke/eigenbasis.hpp"
#include "hecke/quadrature.hpp"
#include "hecke/specfun.hpp"
#include "hecke/surface.hpp"

namespace hecke {

struct EvalOptions {
    // Reduce the point into the fundamental domain first. The value is then
    // taken at the representative: |F| and products F conj(G) are unchanged,
    // the standalone phase is not.
    bool reduceFirst = true;
    // Apply the Petersson scale. Calibration itself runs with the raw form.
    bool useCalibration = true;
};

// Weight-normalized eigenform value y^{k/2} sum_n a(n) e(n z), summed in log
// space with the running maximum factored out. The tail is cut once the
// Deligne bound log(2) + (k/2) log n - 2 pi n y falls 45 below the maximum,
// past the turning point n = k / (4 pi y).
inline Cplx eval_form(const EigenBasis& eb, long idx, double x, double y,
                      const EvalOptions& opt = {}) {
    const Eigenform& f = eb.forms.at(static_cast<std::size_t>(idx));
    double logA = 0.0;
    if (opt.useCalibration) {
        if (!f.calibrated()) throw std::runtime_error("eval_form: form not calibrated");
        logA = f.logA1;
    }
    if (opt.reduceFirst) {
        auto r = reduce(SurfacePoint{x, y});
        x = r.z.x;
        y = r.z.y;
    }
    if (!(y > 0.0)) throw std::domain_error("eval_form: need y > 0");

    const double k = static_cast<double>(eb.k);
    const double twoPiY = 2.0 * kPi * y;
    const double nStar = k / (2.0 * twoPiY);
    const long trunc = eb.trunc;

    static thread_local std::vector<double> Ln;
    Ln.clear();
    double M = -std::numeric_limits<double>::infinity();
    long used = 0;
    for (long n = 1; n <= trunc; ++n) {
        double upper = 0.6931471805599453 + 0.5 * k * std::log(static_cast<double>(n)) - twoPiY * n;
        if (static_cast<double>(n) > nStar && upper < M - 45.0) break;
        double ln = f.termLog[static_cast<std::size_t>(n)] - twoPiY * n;
        Ln.push_back(ln);
        if (ln > M) M = ln;
        used = n;
    }
    if (used == trunc) {
        double upper = 0.6931471805599453 + 0.5 * k * std::log(static_cast<double>(trunc)) -
                       twoPiY * trunc;
        if (upper >= M - 45.0)
            throw std::runtime_error("eval_form: truncation too small at this point");
    }
    if (!(M > -std::numeric_limits<double>::infinity())) return Cplx(0.0);

    double re = 0.0, im = 0.0;
    for (long n = 1; n <= used; ++n) {
        double ln = Ln[static_cast<std::size_t>(n - 1)];
        if (ln == -std::numeric_limits<double>::infinity()) continue;
        double mag = f.termSign[static_cast<std::size_t>(n)] * std::exp(ln - M);
        double ph = 2.0 * kPi * n * x;
        re += mag * std::cos(ph);
        im += mag * std::sin(ph);
    }
    double outer = logA + 0.5 * k * std::log(y) + M;
    if (outer < -740.0) return Cplx(0.0);
    double amp = std::exp(outer);
    return Cplx(amp * re, amp * im);
}

struct CalibrationReport {
    double logA1 = 0.0;
    double quadErr = 0.0;
};

// Fix the Petersson scale so the squared norm over the fundamental domain is
// one. Refuses when the two-level quadrature disagrees wildly, which signals
// an unconverged rule rather than a noisy last digit.
inline CalibrationReport petersson_calibrate(EigenBasis& eb, long idx, long level = 2,
                                             double yMax = 50.0) {
    EvalOptions raw{false, false};
    auto dens = [&](double x, double y) {
        Cplx v = eval_form(eb, idx, x, y, raw);
        return std::norm(v);
    };
    auto res = integrate_fd(dens, level, yMax);
    if (!(res.value > 0.0)) throw std::runtime_error("petersson_calibrate: nonpositive norm");
    if (res.err > 0.7 * res.value)
        throw std::runtime_error("petersson_calibrate: quadrature did not converge");
    double logA1 = -0.5 * std::log(res.value);
    eb.forms.at(static_cast<std::size_t>(idx)).logA1 = logA1;
    return {logA1, res.err / res.value};
}

inline void calibrate_all(EigenBasis& eb, long level = 2, double yMax = 50.0) {
    for (long i = 0; i < eb.dim(); ++i) petersson_calibrate(eb, i, level, yMax);
}

// Petersson pairing of two calibrated forms.
inline QuadResult<Cplx> inner_product(const EigenBasis& eb, long i, long j, long level = 2,
                                      double yMax = 50.0) {
    EvalOptions in_domain{false, true};
    auto f = [&](double x, double y) {
        return eval_form(eb, i, x, y, in_domain) * std::conj(eval_form(eb, j, x, y, in_domain));
    };
    return integrate_fd(f, level, yMax);
}

// Full Gram matrix in one sweep: every form is evaluated once per node.
struct GramResult {
    std::vector<std::vector<Cplx>> gram;
    double err = 0.0;
};

inline GramResult gram_matrix(const EigenBasis& eb, long level = 2, double yMax = 50.0) {
    long d = eb.dim();
    EvalOptions in_domain{false, true};
    auto sweep = [&](const std::vector<QuadratureNode>& nodes) {
        std::vector<std::vector<Cplx>> acc(static_cast<std::size_t>(d * d));
        std::vector<std::vector<Cplx>> per(static_cast<std::size_t>(d * d),
                                           std::vector<Cplx>(nodes.size()));
        parallel_for(static_cast<std::int64_t>(nodes.size()), [&](std::int64_t t) {
            const auto& nd = nodes[static_cast<std::size_t>(t)];
            std::vector<Cplx> vals(static_cast<std::size_t>(d));
            for (long i = 0; i < d; ++i) vals[static_cast<std::size_t>(i)] =
                eval_form(eb, i, nd.x, nd.y, in_domain);
            for (long i = 0; i < d; ++i)
                for (long j = 0; j < d; ++j)
                    per[static_cast<std::size_t>(i * d + j)][static_cast<std::size_t>(t)] =
                        vals[static_cast<std::size_t>(i)] * std::conj(vals[static_cast<std::size_t>(j)]) * nd.w;
        });
        std::vector<std::vector<Cplx>> g(static_cast<std::size_t>(d),
                                         std::vector<Cplx>(static_cast<std::size_t>(d)));
        for (long i = 0; i < d; ++i)
            for (long j = 0; j < d; ++j)
                g[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                    pairwise_sum(per[static_cast<std::size_t>(i * d + j)]);
        return g;
    };
    auto fine = sweep(fd_nodes(level, yMax));
    auto coarse = sweep(fd_nodes(level > 0 ? level - 1 : 0, yMax));
    double err = 0.0;
    for (long i = 0; i < d; ++i)
        for (long j = 0; j < d; ++j)
            err = std::max(err, std::abs(fine[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] -
                                         coarse[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]));
    return {fine, err};
}

}  // namespace hecke
