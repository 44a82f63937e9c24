#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "hecke/qseries.hpp"

namespace hecke {

// Dimension of the space of level-1 cusp forms of even weight k >= 4.
inline long cusp_dim(long k) {
    if (k < 4 || k % 2 != 0) throw std::invalid_argument("cusp_dim: weight must be even, >= 4");
    return k / 12 - (k % 12 == 2 ? 1 : 0);
}

// Echelonized integral basis b_1..b_d with b_i = q^i + O(q^{d+1}). Built from
// the triangular spanning set Delta^j E_{k-12j} (j = 1..d, E_0 = 1), whose
// row j has leading coefficient 1 at q^j, then reduced upward. The weight
// k - 12j is never 2 here, since k = 2 mod 12 lowers d by one.
inline std::vector<QSeries> miller_basis(long k, long N) {
    if (k < 12 || k % 2 != 0) throw std::invalid_argument("miller_basis: weight must be even, >= 12");
    long d = cusp_dim(k);
    if (d < 1) throw std::invalid_argument("miller_basis: space is trivial at this weight");
    if (N < d) throw std::invalid_argument("miller_basis: truncation below dimension");

    std::vector<QSeries> rows;
    rows.reserve(static_cast<std::size_t>(d));
    for (long j = 1; j <= d; ++j) {
        long w = k - 12 * j;
        if (w == 0) {
            rows.push_back(delta_power(static_cast<int>(j), N));
            continue;
        }
        QSeries e = eisenstein_series(static_cast<int>(w), N);
        // Scale e to integer entries so the product can run in mpz.
        mpz_class den = 1;
        for (const auto& x : e.c) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), x.get_den().get_mpz_t());
        std::vector<mpz_class> ez(e.c.size());
        for (std::size_t i = 0; i < e.c.size(); ++i) {
            mpq_class scaled = e.c[i] * mpq_class(den);
            ez[i] = scaled.get_num();
        }
        auto prod = zconv(delta_power_z(static_cast<int>(j), N), ez, N);
        QSeries row;
        row.weight = k;
        row.c.resize(prod.size());
        for (std::size_t i = 0; i < prod.size(); ++i) row.c[i] = mpq_class(prod[i]) / mpq_class(den);
        rows.push_back(std::move(row));
    }

    // Reduce upward: rows are already monic and lower triangular in the
    // leading d coefficients.
    for (long i = d; i >= 1; --i)
        for (long j = 1; j < i; ++j) {
            mpq_class f = rows[j - 1].c[static_cast<std::size_t>(i)];
            if (f == 0) continue;
            for (long n = i; n <= N; ++n)
                rows[j - 1].c[static_cast<std::size_t>(n)] -= f * rows[i - 1].c[static_cast<std::size_t>(n)];
        }
    return rows;
}

// Coefficient action of T_n in weight k:
// a(T_n f, m) = sum_{e | gcd(m, n)} e^{k-1} a(f, m n / e^2).
// Output truncation is floor(trunc(f) / n).
inline QSeries hecke_operator(const QSeries& f, long n) {
    if (n < 1) throw std::invalid_argument("hecke_operator: n must be positive");
    long k = f.weight;
    long M = f.trunc() / n;
    QSeries g;
    g.weight = k;
    g.c.assign(static_cast<std::size_t>(M) + 1, mpq_class(0));
    for (long m = 1; m <= M; ++m) {
        mpq_class s = 0;
        for (long e = 1; e <= std::min(m, n); ++e) {
            if (m % e != 0 || n % e != 0) continue;
            mpz_class ep;
            mpz_ui_pow_ui(ep.get_mpz_t(), static_cast<unsigned long>(e), static_cast<unsigned>(k - 1));
            s += mpq_class(ep) * f.c[static_cast<std::size_t>(m / e * (n / e))];
        }
        g.c[static_cast<std::size_t>(m)] = s;
    }
    return g;
}

using QMatrix = std::vector<std::vector<mpq_class>>;

// Matrix of T_n on the echelon basis. Since b_i = q^i + O(q^{d+1}), any cusp
// form equals sum_m a(g, m) b_m with m <= d, so column i is just the first d
// coefficients of T_n b_i. Requires trunc(b_i) >= d * n.
inline QMatrix hecke_matrix(const std::vector<QSeries>& basis, long n) {
    long d = static_cast<long>(basis.size());
    if (d == 0) throw std::invalid_argument("hecke_matrix: empty basis");
    if (basis[0].trunc() < d * n)
        throw std::invalid_argument("hecke_matrix: truncation below dim * n");
    QMatrix t(static_cast<std::size_t>(d), std::vector<mpq_class>(static_cast<std::size_t>(d)));
    for (long i = 0; i < d; ++i) {
        QSeries col = hecke_operator(basis[static_cast<std::size_t>(i)], n);
        for (long m = 1; m <= d; ++m)
            t[static_cast<std::size_t>(m - 1)][static_cast<std::size_t>(i)] =
                col.c[static_cast<std::size_t>(m)];
    }
    return t;
}

// Truncation that is always sufficient for assembling T_p matrices for all
// p <= pmax and for sampling eigenforms a few multiples past the dimension.
inline long default_truncation(long k, long pmax) {
    long d = cusp_dim(k);
    return std::max(2 * d * pmax, 4 * k);
}

inline QMatrix qm_identity(long d, const mpq_class& s = mpq_class(1)) {
    QMatrix m(static_cast<std::size_t>(d), std::vector<mpq_class>(static_cast<std::size_t>(d), mpq_class(0)));
    for (long i = 0; i < d; ++i) m[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = s;
    return m;
}

inline QMatrix qm_mul(const QMatrix& a, const QMatrix& b) {
    std::size_t d = a.size();
    QMatrix r(d, std::vector<mpq_class>(d, mpq_class(0)));
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t l = 0; l < d; ++l) {
            if (a[i][l] == 0) continue;
            for (std::size_t j = 0; j < d; ++j) r[i][j] += a[i][l] * b[l][j];
        }
    return r;
}

inline QMatrix qm_sub(const QMatrix& a, const QMatrix& b) {
    QMatrix r = a;
    for (std::size_t i = 0; i < r.size(); ++i)
        for (std::size_t j = 0; j < r.size(); ++j) r[i][j] -= b[i][j];
    return r;
}

inline bool qm_equal(const QMatrix& a, const QMatrix& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a.size(); ++j)
            if (a[i][j] != b[i][j]) return false;
    return true;
}

inline mpq_class qm_trace(const QMatrix& a) {
    mpq_class t = 0;
    for (std::size_t i = 0; i < a.size(); ++i) t += a[i][i];
    return t;
}

inline Json qmatrix_to_json(const QMatrix& m) {
    Json rows = Json::array();
    for (const auto& r : m) {
        Json row = Json::array();
        for (const auto& x : r) row.push_back(x.get_str());
        rows.push_back(row);
    }
    return rows;
}

}  // namespace hecke
