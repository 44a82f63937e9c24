#pragma once

#include <mpfr.h>

#include <cstdio>
#include <string>
#include <utility>

namespace hecke {

// Fixed 256-bit float for the optimizer, where terms cancel to ~1e-41 and
// doubles lose every significant digit.
class BigFloat {
    mpfr_t v_;

public:
    static constexpr mpfr_prec_t kPrec = 256;

    BigFloat() { mpfr_init2(v_, kPrec); mpfr_set_zero(v_, 1); }
    explicit BigFloat(double x) { mpfr_init2(v_, kPrec); mpfr_set_d(v_, x, MPFR_RNDN); }
    explicit BigFloat(long x) { mpfr_init2(v_, kPrec); mpfr_set_si(v_, x, MPFR_RNDN); }
    explicit BigFloat(const std::string& dec) {
        mpfr_init2(v_, kPrec);
        mpfr_set_str(v_, dec.c_str(), 10, MPFR_RNDN);
    }
    BigFloat(const BigFloat& o) { mpfr_init2(v_, kPrec); mpfr_set(v_, o.v_, MPFR_RNDN); }
    BigFloat(BigFloat&& o) noexcept { mpfr_init2(v_, kPrec); mpfr_swap(v_, o.v_); }
    BigFloat& operator=(BigFloat o) noexcept { mpfr_swap(v_, o.v_); return *this; }
    ~BigFloat() { mpfr_clear(v_); }

    friend BigFloat operator+(const BigFloat& a, const BigFloat& b) {
        BigFloat r; mpfr_add(r.v_, a.v_, b.v_, MPFR_RNDN); return r;
    }
    friend BigFloat operator-(const BigFloat& a, const BigFloat& b) {
        BigFloat r; mpfr_sub(r.v_, a.v_, b.v_, MPFR_RNDN); return r;
    }
    friend BigFloat operator*(const BigFloat& a, const BigFloat& b) {
        BigFloat r; mpfr_mul(r.v_, a.v_, b.v_, MPFR_RNDN); return r;
    }
    friend BigFloat operator/(const BigFloat& a, const BigFloat& b) {
        BigFloat r; mpfr_div(r.v_, a.v_, b.v_, MPFR_RNDN); return r;
    }
    friend BigFloat operator-(const BigFloat& a) {
        BigFloat r; mpfr_neg(r.v_, a.v_, MPFR_RNDN); return r;
    }

    friend BigFloat sqrt(const BigFloat& a) {
        BigFloat r; mpfr_sqrt(r.v_, a.v_, MPFR_RNDN); return r;
    }
    friend BigFloat abs(const BigFloat& a) {
        BigFloat r; mpfr_abs(r.v_, a.v_, MPFR_RNDN); return r;
    }

    friend bool operator<(const BigFloat& a, const BigFloat& b) { return mpfr_cmp(a.v_, b.v_) < 0; }
    friend bool operator>(const BigFloat& a, const BigFloat& b) { return mpfr_cmp(a.v_, b.v_) > 0; }
    friend bool operator<=(const BigFloat& a, const BigFloat& b) { return mpfr_cmp(a.v_, b.v_) <= 0; }

    double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }

    // Round-trip decimal string, 50 digits. Enough to expose any double
    // rounding in cross-checks while staying readable in JSON output.
    std::string str(int digits = 50) const {
        char fmt[16];
        std::snprintf(fmt, sizeof fmt, "%%.%dRg", digits);
        char buf[128];
        mpfr_snprintf(buf, sizeof buf, fmt, v_);
        return buf;
    }
};

}  // namespace hecke
