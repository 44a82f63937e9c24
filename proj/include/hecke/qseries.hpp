#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "hecke/io.hpp"
#include "hecke/parallel.hpp"

namespace hecke {

// Truncated q-expansion with exact rational coefficients. c[n] multiplies q^n,
// so the truncation order is c.size() - 1.
struct QSeries {
    long weight = 0;
    std::vector<mpq_class> c;

    long trunc() const { return static_cast<long>(c.size()) - 1; }
    const mpq_class& at(long n) const {
        if (n < 0 || n > trunc()) throw std::out_of_range("QSeries::at out of range");
        return c[static_cast<std::size_t>(n)];
    }
};

inline bool qs_equal(const QSeries& a, const QSeries& b) {
    if (a.weight != b.weight || a.c.size() != b.c.size()) return false;
    for (std::size_t i = 0; i < a.c.size(); ++i)
        if (a.c[i] != b.c[i]) return false;
    return true;
}

inline QSeries qs_truncate(const QSeries& f, long N) {
    if (N > f.trunc()) throw std::invalid_argument("qs_truncate: cannot extend");
    QSeries g;
    g.weight = f.weight;
    g.c.assign(f.c.begin(), f.c.begin() + N + 1);
    return g;
}

inline QSeries qs_add(const QSeries& a, const QSeries& b) {
    if (a.weight != b.weight) throw std::invalid_argument("qs_add: weight mismatch");
    long N = std::min(a.trunc(), b.trunc());
    QSeries r;
    r.weight = a.weight;
    r.c.resize(N + 1);
    for (long n = 0; n <= N; ++n) r.c[n] = a.c[n] + b.c[n];
    return r;
}

inline QSeries qs_scale(const QSeries& a, const mpq_class& s) {
    QSeries r = a;
    for (auto& x : r.c) x *= s;
    return r;
}

// Plain rational convolution. Weights add. Kept serial; the large integer
// products go through zconv below instead.
inline QSeries qs_mul(const QSeries& a, const QSeries& b) {
    long N = std::min(a.trunc(), b.trunc());
    QSeries r;
    r.weight = a.weight + b.weight;
    r.c.assign(N + 1, mpq_class(0));
    for (long i = 0; i <= N; ++i) {
        if (a.c[i] == 0) continue;
        for (long j = 0; i + j <= N; ++j) {
            if (b.c[j] == 0) continue;
            r.c[i + j] += a.c[i] * b.c[j];
        }
    }
    return r;
}

// Integer convolution truncated at q^N, parallel over output coefficients.
// Each output slot is written by exactly one worker, so the result does not
// depend on the thread count.
inline std::vector<mpz_class> zconv(const std::vector<mpz_class>& a,
                                    const std::vector<mpz_class>& b, long N) {
    std::vector<mpz_class> r(static_cast<std::size_t>(N) + 1);
    long la = static_cast<long>(a.size()), lb = static_cast<long>(b.size());
    parallel_for(N + 1, [&](std::int64_t n) {
        mpz_class acc = 0;
        long lo = std::max<long>(0, static_cast<long>(n) - (lb - 1));
        long hi = std::min<long>(static_cast<long>(n), la - 1);
        for (long i = lo; i <= hi; ++i)
            mpz_addmul(acc.get_mpz_t(), a[i].get_mpz_t(), b[n - i].get_mpz_t());
        r[n] = std::move(acc);
    });
    return r;
}

// Bernoulli number B_m, exact, via the defining recurrence
// sum_{j=0..m} C(m+1, j) B_j = 0.
inline mpq_class bernoulli(int m) {
    static std::vector<mpq_class> cache{mpq_class(1)};
    while (static_cast<int>(cache.size()) <= m) {
        int n = static_cast<int>(cache.size());
        mpq_class s = 0;
        mpz_class binom = 1;
        for (int j = 0; j < n; ++j) {
            // binom = C(n+1, j)
            if (j > 0) {
                binom *= (n + 2 - j);
                mpz_divexact_ui(binom.get_mpz_t(), binom.get_mpz_t(), static_cast<unsigned>(j));
            }
            s += mpq_class(binom) * cache[j];
        }
        cache.push_back(-s / (n + 1));
    }
    return cache[m];
}

// Normalized Eisenstein series of even weight w >= 4:
// E_w = 1 - (2w / B_w) sum_n sigma_{w-1}(n) q^n. Divisor sums are filled by
// the harmonic double loop, which is exact and needs no factorization.
inline QSeries eisenstein_series(int w, long N) {
    if (w < 4 || w % 2 != 0) throw std::invalid_argument("eisenstein_series: weight must be even, >= 4");
    QSeries e;
    e.weight = w;
    e.c.assign(N + 1, mpq_class(0));
    e.c[0] = 1;
    std::vector<mpz_class> sigma(static_cast<std::size_t>(N) + 1, mpz_class(0));
    for (long d = 1; d <= N; ++d) {
        mpz_class dp;
        mpz_ui_pow_ui(dp.get_mpz_t(), static_cast<unsigned long>(d), static_cast<unsigned>(w - 1));
        for (long m = d; m <= N; m += d) sigma[m] += dp;
    }
    mpq_class front = mpq_class(-2 * w) / bernoulli(w);
    for (long n = 1; n <= N; ++n) e.c[n] = front * mpq_class(sigma[n]);
    return e;
}

// Coefficients of J^c up to q^N where J = prod (1 - q^n)^3. Jacobi's identity
// makes J sparse: J = sum_{r>=0} (-1)^r (2r+1) q^{r(r+1)/2}, which yields the
// recurrence m a_m = sum_{t>=1} j_t ((c+1) t - m) a_{m-t} with exact division
// by m at every step. Cost is O(N^{3/2}) integer operations.
inline std::vector<mpz_class> jacobi_cube_power(long c, long N) {
    std::vector<std::pair<long, long>> terms;
    for (long r = 1;; ++r) {
        long t = r * (r + 1) / 2;
        if (t > N) break;
        terms.push_back({t, (r % 2 ? -1L : 1L) * (2 * r + 1)});
    }
    std::vector<mpz_class> a(static_cast<std::size_t>(N) + 1);
    a[0] = 1;
    mpz_class acc;
    for (long m = 1; m <= N; ++m) {
        acc = 0;
        for (auto [t, jt] : terms) {
            if (t > m) break;
            long w = jt * ((c + 1) * t - m);
            if (w > 0)
                mpz_addmul_ui(acc.get_mpz_t(), a[m - t].get_mpz_t(), static_cast<unsigned long>(w));
            else if (w < 0)
                mpz_submul_ui(acc.get_mpz_t(), a[m - t].get_mpz_t(), static_cast<unsigned long>(-w));
        }
        mpz_divexact_ui(a[m].get_mpz_t(), acc.get_mpz_t(), static_cast<unsigned long>(m));
    }
    return a;
}

// Delta^j = q^j prod (1 - q^n)^{24 j} as integer coefficients, index n holds
// the q^n coefficient.
inline std::vector<mpz_class> delta_power_z(int j, long N) {
    if (j < 1 || N < j) throw std::invalid_argument("delta_power_z: need j >= 1, N >= j");
    auto body = jacobi_cube_power(8L * j, N - j);
    std::vector<mpz_class> out(static_cast<std::size_t>(N) + 1, mpz_class(0));
    for (long n = j; n <= N; ++n) out[n] = std::move(body[n - j]);
    return out;
}

inline QSeries delta_power(int j, long N) {
    auto z = delta_power_z(j, N);
    QSeries r;
    r.weight = 12L * j;
    r.c.reserve(z.size());
    for (auto& x : z) r.c.emplace_back(std::move(x));
    return r;
}

inline QSeries delta(long N) { return delta_power(1, N); }

// Independent route for tests: Euler's pentagonal series for prod (1 - q^n),
// raised to a power by repeated squaring of dense integer polynomials.
inline std::vector<mpz_class> euler_product_pow(long e, long N) {
    std::vector<mpz_class> p(static_cast<std::size_t>(N) + 1, mpz_class(0));
    p[0] = 1;
    for (long r = 1;; ++r) {
        long t1 = r * (3 * r - 1) / 2, t2 = r * (3 * r + 1) / 2;
        if (t1 > N) break;
        long s = (r % 2 ? -1 : 1);
        p[t1] += s;
        if (t2 <= N) p[t2] += s;
    }
    std::vector<mpz_class> acc(1, mpz_class(1));
    std::vector<mpz_class> base = p;
    while (e > 0) {
        if (e & 1) acc = zconv(acc, base, N);
        e >>= 1;
        if (e) base = zconv(base, base, N);
    }
    acc.resize(static_cast<std::size_t>(N) + 1);
    return acc;
}

inline Json qseries_to_json(const QSeries& f) {
    Json j;
    j["weight"] = f.weight;
    j["trunc"] = f.trunc();
    Json cs = Json::array();
    for (const auto& x : f.c) cs.push_back(x.get_str());
    j["coefficients"] = cs;
    return j;
}

inline QSeries qseries_from_json(const Json& j) {
    QSeries f;
    f.weight = j.at("weight").get<long>();
    for (const auto& s : j.at("coefficients")) {
        mpq_class x(s.get<std::string>());
        x.canonicalize();
        f.c.push_back(x);
    }
    if (f.trunc() != j.at("trunc").get<long>())
        throw std::runtime_error("qseries_from_json: truncation mismatch");
    return f;
}

}  // namespace hecke
