#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace hecke {

// Smallest prime factor for 0..n. spf[0] = spf[1] = 0, spf[p] = p for primes.
inline std::vector<std::int32_t> spf_sieve(std::int64_t n) {
    std::vector<std::int32_t> spf(static_cast<std::size_t>(n) + 1, 0);
    for (std::int64_t i = 2; i <= n; ++i) {
        if (spf[i] == 0)
            for (std::int64_t m = i; m <= n; m += i)
                if (spf[m] == 0) spf[m] = static_cast<std::int32_t>(i);
    }
    return spf;
}

inline std::vector<std::int64_t> primes_up_to(std::int64_t n) {
    auto spf = spf_sieve(n);
    std::vector<std::int64_t> ps;
    for (std::int64_t i = 2; i <= n; ++i)
        if (spf[i] == i) ps.push_back(i);
    return ps;
}

// Factorization via a precomputed spf table covering n.
inline std::vector<std::pair<std::int64_t, int>> factorize(std::int64_t n,
                                                           const std::vector<std::int32_t>& spf) {
    std::vector<std::pair<std::int64_t, int>> f;
    while (n > 1) {
        std::int64_t p = spf[n];
        int e = 0;
        while (n % p == 0) { n /= p; ++e; }
        f.push_back({p, e});
    }
    return f;
}

inline std::vector<std::int64_t> divisors_of(std::int64_t n, const std::vector<std::int32_t>& spf) {
    std::vector<std::int64_t> ds{1};
    for (auto [p, e] : factorize(n, spf)) {
        std::size_t base = ds.size();
        std::int64_t pk = 1;
        for (int i = 1; i <= e; ++i) {
            pk *= p;
            for (std::size_t j = 0; j < base; ++j) ds.push_back(ds[j] * pk);
        }
    }
    return ds;
}

}  // namespace hecke
