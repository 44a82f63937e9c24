#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "hecke/miller.hpp"
#include "hecke/sieve.hpp"

namespace hecke {

// One Hecke eigenform, normalized so a(1) = 1. lambda[n] = a(n) / n^{(k-1)/2}
// comes straight from the echelon coefficients, so the multiplicative
// relations stay genuine checks downstream instead of construction artifacts.
struct Eigenform {
    long k = 0;
    long index = 0;
    std::vector<double> v;       // coordinates in the echelon basis
    std::vector<double> lambda;  // lambda[0] = 0, lambda[1] = 1
    double logA1 = std::numeric_limits<double>::quiet_NaN();  // Petersson scale, NaN until calibrated

    // Per-term log magnitudes log|lambda(n)| + ((k-1)/2) log n and signs,
    // precomputed for point evaluation.
    std::vector<double> termLog;
    std::vector<double> termSign;

    double lam(long n) const { return lambda.at(static_cast<std::size_t>(n)); }
    bool calibrated() const { return !std::isnan(logA1); }
};

struct EigenBasis {
    long k = 0;
    long trunc = 0;
    std::vector<Eigenform> forms;
    std::vector<QSeries> echelon;

    long dim() const { return static_cast<long>(forms.size()); }
};

// Splits the common eigenbasis of a family of commuting real-diagonalizable
// matrices. Later matrices refine eigenspaces the earlier ones leave
// degenerate. Throws if the family does not separate everything.
inline Eigen::MatrixXd simultaneous_eigenvectors(const std::vector<Eigen::MatrixXd>& mats,
                                                 double relTol = 1e-6) {
    if (mats.empty()) throw std::invalid_argument("simultaneous_eigenvectors: no matrices");
    const long d = mats[0].rows();
    std::vector<Eigen::MatrixXd> blocks{Eigen::MatrixXd::Identity(d, d)};
    for (const auto& A : mats) {
        double scale = std::max(A.cwiseAbs().maxCoeff(), 1.0);
        std::vector<Eigen::MatrixXd> next;
        for (const auto& B : blocks) {
            if (B.cols() == 1) {
                next.push_back(B);
                continue;
            }
            Eigen::MatrixXd M = B.colPivHouseholderQr().solve(A * B);
            Eigen::EigenSolver<Eigen::MatrixXd> es(M);
            if (es.info() != Eigen::Success)
                throw std::runtime_error("simultaneous_eigenvectors: eigensolver failed");
            long m = M.rows();
            std::vector<long> order(static_cast<std::size_t>(m));
            std::iota(order.begin(), order.end(), 0L);
            auto ev = es.eigenvalues();
            for (long i = 0; i < m; ++i)
                if (std::abs(ev(i).imag()) > relTol * scale)
                    throw std::runtime_error("simultaneous_eigenvectors: complex eigenvalue");
            std::sort(order.begin(), order.end(),
                      [&](long a, long b) { return ev(a).real() < ev(b).real(); });
            for (long lo = 0; lo < m;) {
                long hi = lo + 1;
                while (hi < m && ev(order[hi]).real() - ev(order[hi - 1]).real() < relTol * scale)
                    ++hi;
                long g = hi - lo;
                if (g == 1) {
                    Eigen::VectorXd w = es.eigenvectors().col(order[lo]).real();
                    next.push_back(B * w);
                } else {
                    // Orthonormal real basis of the cluster span. Column
                    // pivoting pushes the zero imaginary parts of real
                    // eigenvectors out of the leading columns.
                    Eigen::MatrixXd span(m, 2 * g);
                    for (long t = 0; t < g; ++t) {
                        span.col(2 * t) = es.eigenvectors().col(order[lo + t]).real();
                        span.col(2 * t + 1) = es.eigenvectors().col(order[lo + t]).imag();
                    }
                    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(span);
                    if (qr.rank() < g)
                        throw std::runtime_error("simultaneous_eigenvectors: cluster span deficient");
                    Eigen::MatrixXd Q =
                        qr.householderQ() * Eigen::MatrixXd::Identity(m, g);
                    next.push_back(B * Q);
                }
                lo = hi;
            }
        }
        blocks = next;
        bool done = true;
        for (const auto& B : blocks) done = done && B.cols() == 1;
        if (done) break;
    }
    Eigen::MatrixXd V(d, d);
    long col = 0;
    for (const auto& B : blocks) {
        if (B.cols() != 1)
            throw std::runtime_error("simultaneous_eigenvectors: eigenspace not separated");
        V.col(col++) = B.col(0).normalized();
    }
    return V;
}

namespace detail {

inline Eigen::MatrixXd qmatrix_to_eigen(const QMatrix& q) {
    long d = static_cast<long>(q.size());
    Eigen::MatrixXd m(d, d);
    for (long i = 0; i < d; ++i)
        for (long j = 0; j < d; ++j)
            m(i, j) = q[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].get_d();
    return m;
}

}  // namespace detail

// Diagonalize the Hecke action on weight-k cusp forms. The eigenvector step
// runs on T_2 and falls back to a commuting family when T_2 has a close
// pair; every coefficient then comes from the echelon expansion. Forms are
// sorted by lambda(2), ties broken by lambda(3).
inline EigenBasis eigenbasis(long k, long trunc = -1) {
    long d = cusp_dim(k);
    if (d < 1) throw std::invalid_argument("eigenbasis: trivial space");
    long need = std::max(default_truncation(k, 13), 3 * d);
    if (trunc < 0) trunc = need;
    trunc = std::max(trunc, need);

    EigenBasis eb;
    eb.k = k;
    eb.trunc = trunc;
    eb.echelon = miller_basis(k, trunc);

    // Work with D^{-1} T_p D / p^{(k-1)/2} where D = diag(n^{(k-1)/2}).
    // Its spectrum is the normalized one in [-2 d(p), 2 d(p)], so degeneracy
    // thresholds are weight independent, and its eigenvectors carry the
    // normalized eigenvalues lambda(1..d) directly: in raw echelon
    // coordinates the first entry is smaller than the last by d^{(k-1)/2}
    // and drowns in solver noise.
    const double c = 0.5 * (k - 1);
    auto normalized_op = [&](long p) {
        Eigen::MatrixXd m = detail::qmatrix_to_eigen(hecke_matrix(eb.echelon, p));
        Eigen::MatrixXd out(d, d);
        for (long r = 0; r < d; ++r)
            for (long s = 0; s < d; ++s)
                out(r, s) = m(r, s) * std::exp(c * (std::log(static_cast<double>(s + 1)) -
                                                    std::log(static_cast<double>(r + 1)) -
                                                    std::log(static_cast<double>(p))));
        return out;
    };
    Eigen::MatrixXd T2 = normalized_op(2);

    Eigen::MatrixXd V(d, d);
    Eigen::EigenSolver<Eigen::MatrixXd> es(T2);
    if (es.info() != Eigen::Success) throw std::runtime_error("eigenbasis: eigensolver failed");
    bool clean = true;
    for (long i = 0; i < d; ++i) {
        if (std::abs(es.eigenvalues()(i).imag()) > 1e-10) clean = false;
        for (long j = i + 1; j < d; ++j)
            if (std::abs(es.eigenvalues()(i).real() - es.eigenvalues()(j).real()) < 1e-6)
                clean = false;
    }
    if (clean) {
        for (long i = 0; i < d; ++i) V.col(i) = es.eigenvectors().col(i).real();
    } else {
        std::vector<Eigen::MatrixXd> family{T2};
        for (long p : {3L, 5L, 7L, 11L, 13L}) family.push_back(normalized_op(p));
        V = simultaneous_eigenvectors(family);
    }

    for (long i = 0; i < d; ++i) {
        Eigen::VectorXd v = V.col(i).normalized();
        double mu = v.dot(T2 * v);
        if ((T2 * v - mu * v).cwiseAbs().maxCoeff() > 1e-8)
            throw std::runtime_error("eigenbasis: eigenvector residual too large");
        if (std::abs(v(0)) < 1e-8)
            throw std::runtime_error("eigenbasis: eigenvector with vanishing first coefficient");
        v /= v(0);

        Eigenform f;
        f.k = k;
        f.v.assign(v.data(), v.data() + d);
        f.lambda.assign(static_cast<std::size_t>(trunc) + 1, 0.0);
        for (long n = 1; n <= trunc; ++n) {
            // lambda(n) = sum_i v_i (i/n)^{(k-1)/2} b_i(n) in the conjugated
            // coordinates; for n <= d this collapses to v_n exactly.
            double a = 0.0;
            double lnN = std::log(static_cast<double>(n));
            for (long i2 = 0; i2 < d; ++i2)
                a += f.v[static_cast<std::size_t>(i2)] *
                     eb.echelon[static_cast<std::size_t>(i2)].c[static_cast<std::size_t>(n)].get_d() *
                     std::exp(c * (std::log(static_cast<double>(i2 + 1)) - lnN));
            f.lambda[static_cast<std::size_t>(n)] = a;
        }
        f.termLog.assign(f.lambda.size(), -std::numeric_limits<double>::infinity());
        f.termSign.assign(f.lambda.size(), 0.0);
        for (long n = 1; n <= trunc; ++n) {
            double lam = f.lambda[static_cast<std::size_t>(n)];
            if (lam == 0.0) continue;
            f.termLog[static_cast<std::size_t>(n)] =
                std::log(std::abs(lam)) + 0.5 * (k - 1) * std::log(static_cast<double>(n));
            f.termSign[static_cast<std::size_t>(n)] = lam > 0.0 ? 1.0 : -1.0;
        }
        eb.forms.push_back(std::move(f));
    }

    std::sort(eb.forms.begin(), eb.forms.end(), [](const Eigenform& a, const Eigenform& b) {
        if (a.lambda[2] != b.lambda[2]) return a.lambda[2] < b.lambda[2];
        return a.lambda[3] < b.lambda[3];
    });
    for (long i = 0; i < d; ++i) eb.forms[static_cast<std::size_t>(i)].index = i;
    return eb;
}

// lambda(p^e) from lambda(p) alone, by the Hecke recursion
// lambda(p^{e+1}) = lambda(p) lambda(p^e) - lambda(p^{e-1}).
inline double lambda_prime_power(double lp, int e) {
    double prev = 1.0, cur = lp;
    if (e == 0) return 1.0;
    for (int j = 1; j < e; ++j) {
        double nxt = lp * cur - prev;
        prev = cur;
        cur = nxt;
    }
    return cur;
}

// lambda(n^2) for all n <= limit via multiplicativity and the prime-power
// recursion. Independent of the direct coefficient table beyond lambda(p).
inline std::vector<double> lambda_square_table(const Eigenform& f, long limit,
                                               const std::vector<std::int32_t>& spf) {
    std::vector<double> out(static_cast<std::size_t>(limit) + 1, 0.0);
    out[1] = 1.0;
    for (long n = 2; n <= limit; ++n) {
        double val = 1.0;
        long m = n;
        while (m > 1) {
            long p = spf[static_cast<std::size_t>(m)];
            int e = 0;
            while (m % p == 0) { m /= p; ++e; }
            val *= lambda_prime_power(f.lam(p), 2 * e);
        }
        out[static_cast<std::size_t>(n)] = val;
    }
    return out;
}

inline Json eigenbasis_to_json(const EigenBasis& eb, long lambdaLimit = -1) {
    if (lambdaLimit < 0 || lambdaLimit > eb.trunc) lambdaLimit = eb.trunc;
    Json j;
    j["k"] = eb.k;
    j["dim"] = eb.dim();
    j["trunc"] = eb.trunc;
    j["lambdaLimit"] = lambdaLimit;
    Json forms = Json::array();
    for (const auto& f : eb.forms) {
        Json jf;
        jf["index"] = f.index;
        Json v = Json::array();
        for (double c : f.v) v.push_back(fmt17(c));
        jf["eigenvector"] = v;
        jf["logA1"] = f.calibrated() ? Json(fmt17(f.logA1)) : Json(nullptr);
        Json lam = Json::array();
        for (long n = 0; n <= lambdaLimit; ++n) lam.push_back(fmt17(f.lambda[static_cast<std::size_t>(n)]));
        jf["lambda"] = lam;
        forms.push_back(jf);
    }
    j["forms"] = forms;
    return j;
}

}  // namespace hecke
