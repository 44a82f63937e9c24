#pragma once

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "hecke/eigenbasis.hpp"
#include "hecke/io.hpp"
#include "hecke/mp.hpp"
#include "hecke/sieve.hpp"
#include "hecke/specfun.hpp"

namespace hecke {

// Named delta_1 values: the unconditional spectral-gap constant and the
// value available under GRC.
inline BigFloat preset_delta1(const std::string& name) {
    if (name == "soundararajan-thorner") return BigFloat(std::string("9.765625e-21"));
    if (name == "grc") return BigFloat(std::string("0.5"));
    // Anything else must parse as a decimal constant.
    for (char ch : name)
        if (std::string("0123456789.eE+-").find(ch) == std::string::npos)
            throw std::domain_error("preset_delta1: unknown preset " + name);
    return BigFloat(name);
}

// Exponent optimization: minimize over alpha the envelope exponent
//   L(alpha) = -alpha delta1 - (1-3 alpha)/2 + (1-alpha)^2 / (2 (1+alpha))
// whose inner maximum over the two eigenvalue variables is already
// completed. Closed form: L = 2 sqrt(2 (2-delta1)) - 4 + delta1 at
// alphaStar = sqrt(2/(2-delta1)) - 1. The closed form cancels
// catastrophically for tiny delta1, hence 256-bit arithmetic plus a series
// route -d^2/8 - d^3/32 - 5 d^4/512 that needs no cancellation.
struct OptimizerResult {
    BigFloat delta1;
    BigFloat alphaStar;
    BigFloat L;
    BigFloat closedL;
    BigFloat seriesL;
    bool seriesUsed = false;
    int seriesOrder = 4;
};

inline OptimizerResult optimize_exponent(const BigFloat& delta1) {
    BigFloat zero(0L), one(1L), two(2L);
    if (delta1 < zero || BigFloat(1L) < delta1)
        throw std::domain_error("optimize_exponent: need delta1 in [0, 1]");
    OptimizerResult r;
    r.delta1 = delta1;
    BigFloat rest = two - delta1;
    r.closedL = two * sqrt(two * rest) - BigFloat(4L) + delta1;
    BigFloat d2 = delta1 * delta1;
    r.seriesL = -(d2 / BigFloat(8L)) - (d2 * delta1 / BigFloat(32L)) -
                (BigFloat(5L) * d2 * d2 / BigFloat(512L));
    r.seriesUsed = delta1 < BigFloat(std::string("1e-8"));
    r.L = r.seriesUsed ? r.seriesL : r.closedL;
    r.alphaStar = sqrt(two / rest) - one;
    return r;
}

// Brute-force confirmation on the stated grid. The two inner variables
// decouple (the objective is a sum of identical concave parabolas), so one
// 1-D scan per alpha recovers the full inner maximum.
struct OptimizerGridCheck {
    double gridL = 0.0;
    double closedL = 0.0;
    double gridAlphaStar = 0.0;
    double maxLambdaDev = 0.0;  // worst |argmax - (1-alpha)/(1+alpha)|
    double step = 1e-3;
};

inline OptimizerGridCheck optimizer_grid_check(double delta1, double step = 1e-3) {
    OptimizerGridCheck g;
    g.step = step;
    g.closedL = 2.0 * std::sqrt(2.0 * (2.0 - delta1)) - 4.0 + delta1;
    double bestL = 1e300;
    long na = static_cast<long>(std::lround(1.0 / step));
    long nl = static_cast<long>(std::lround(2.0 / step));
    for (long ia = 0; ia <= na; ++ia) {
        double alpha = static_cast<double>(ia) * step;
        double bestQ = -1e300, bestLam = 0.0;
        for (long il = 0; il <= nl; ++il) {
            double lam = static_cast<double>(il) * step;
            double q = -0.25 * (1.0 + alpha) * lam * lam + 0.5 * (1.0 - alpha) * lam;
            if (q > bestQ) {
                bestQ = q;
                bestLam = lam;
            }
        }
        g.maxLambdaDev =
            std::max(g.maxLambdaDev, std::abs(bestLam - (1.0 - alpha) / (1.0 + alpha)));
        double L = -alpha * delta1 - 0.5 * (1.0 - 3.0 * alpha) + 2.0 * bestQ;
        if (L < bestL) {
            bestL = L;
            g.gridAlphaStar = alpha;
        }
    }
    g.gridL = bestL;
    return g;
}

// Prime product over p <= pMax with a per-prime numerator x_p, accumulated
// both in log space and directly; the two must agree to near machine
// precision unless a factor hit the positivity floor.
struct FactorProduct {
    double value = 0.0;       // exp of the log accumulation
    double direct = 0.0;      // plain running product
    double logValue = 0.0;
    bool floored = false;
    long pMax = 0;
};

template <class Numerator>
inline FactorProduct prime_product(long pMax, Numerator&& x) {
    FactorProduct fp;
    fp.pMax = pMax;
    fp.direct = 1.0;
    for (long p : primes_up_to(pMax)) {
        double factor = 1.0 - x(p) / static_cast<double>(p);
        if (factor < 1e-9) {
            factor = 1e-9;
            fp.floored = true;
        }
        fp.logValue += std::log(factor);
        fp.direct *= factor;
    }
    fp.value = std::exp(fp.logValue);
    return fp;
}

inline FactorProduct sound_product(const Eigenform& f, const Eigenform& g, double delta1,
                                   long pMax) {
    return prime_product(pMax, [&](long p) {
        double lf2 = lambda_prime_power(f.lam(p), 2);
        double lg2 = lambda_prime_power(g.lam(p), 2);
        return 0.5 * lf2 + 0.5 * lg2 + delta1;
    });
}

inline FactorProduct holo_product(const Eigenform& f, const Eigenform& g, long pMax) {
    return prime_product(pMax, [&](long p) {
        double af = std::abs(f.lam(p)) - 1.0;
        double ag = std::abs(g.lam(p)) - 1.0;
        return 0.25 * af * af + 0.25 * ag * ag;
    });
}

inline double envelope_sound(double M, double product) { return std::pow(M, 1.5) * product; }
inline double envelope_holo(double M, double product) { return std::pow(M, 5.0 / 3.0) * product; }

// Absolute shifted convolution sum and its size against the heuristic
// x * prod_p (1 + (|lambda(p)|-1)/p) envelope for each form.
struct ShiftedSum {
    long m = 0;
    long x = 0;
    double sum = 0.0;
    double ratio = 0.0;
};

inline ShiftedSum shifted_convolution(const Eigenform& f, const Eigenform& g, long m, long x) {
    long lamLimit = static_cast<long>(std::min(f.lambda.size(), g.lambda.size())) - 1;
    if (x + std::labs(m) > lamLimit)
        throw std::runtime_error("shifted_convolution: lambda table too short");
    ShiftedSum s;
    s.m = m;
    s.x = x;
    for (long n = std::max(1L, 1L - m); n <= x; ++n)
        s.sum += std::abs(f.lam(n) * g.lam(n + m));
    auto env = [&](const Eigenform& h) {
        double acc = 0.0;
        for (long p : primes_up_to(x))
            acc += std::log1p((std::abs(h.lam(p)) - 1.0) / static_cast<double>(p));
        return acc;
    };
    s.ratio = s.sum / (static_cast<double>(x) * std::exp(env(f) + env(g)));
    return s;
}

// Archimedean prefactor pi^3 |Gamma(k - 1/2 + it)|^2 / (2 Gamma(k)^2).
inline double watson_prefactor(long k, double t) {
    Cplx lg = log_gamma(Cplx(static_cast<double>(k) - 0.5, t));
    double lgk = std::lgamma(static_cast<double>(k));
    return 0.5 * kPi * kPi * kPi * std::exp(2.0 * lg.real() - 2.0 * lgk);
}

// Mertens normalization: prod_{p <= x} (1 - delta/p) (log x)^delta tends to
// exp(-gamma) for delta = 1 and to 6 exp(gamma)/pi^2 for delta = -1.
struct MertensReport {
    double delta = 0.0;
    long x = 0;
    double value = 0.0;
    double reference = 0.0;  // NaN when no closed limit is wired
    double relDiff = 0.0;
};

inline MertensReport mertens_product(double delta, long x) {
    if (!(x >= 100)) throw std::domain_error("mertens_product: need x >= 100");
    MertensReport rep;
    rep.delta = delta;
    rep.x = x;
    double acc = 0.0;
    for (long p : primes_up_to(x)) acc += std::log1p(-delta / static_cast<double>(p));
    rep.value = std::exp(acc + delta * std::log(std::log(static_cast<double>(x))));
    double gammaE = 0.57721566490153286061;
    if (delta == 1.0)
        rep.reference = std::exp(-gammaE);
    else if (delta == -1.0)
        rep.reference = 6.0 * std::exp(gammaE) / (kPi * kPi);
    else
        rep.reference = std::nan("");
    rep.relDiff = std::isnan(rep.reference)
                      ? std::nan("")
                      : std::abs(rep.value - rep.reference) / rep.reference;
    return rep;
}

// Least squares of log|values| against log log k: the exploratory decay
// report. No pass/fail semantics are attached to the slope.
struct DecayFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    long points = 0;
};

inline DecayFit decay_fit(const std::vector<long>& ks, const std::vector<double>& absValues) {
    if (ks.size() != absValues.size() || ks.size() < 2)
        throw std::domain_error("decay_fit: need matching lists with >= 2 points");
    DecayFit fit;
    fit.points = static_cast<long>(ks.size());
    double su = 0.0, sv = 0.0, suu = 0.0, suv = 0.0, svv = 0.0;
    for (std::size_t i = 0; i < ks.size(); ++i) {
        double u = std::log(std::log(static_cast<double>(ks[i])));
        double v = std::log(absValues[i]);
        su += u;
        sv += v;
        suu += u * u;
        suv += u * v;
        svv += v * v;
    }
    double n = static_cast<double>(ks.size());
    double du = suu - su * su / n;
    double dv = svv - sv * sv / n;
    double cuv = suv - su * sv / n;
    fit.slope = cuv / du;
    fit.intercept = (sv - fit.slope * su) / n;
    fit.r2 = dv > 0.0 ? (cuv * cuv) / (du * dv) : 1.0;
    return fit;
}

// Worst deviation from lambda(p)^2 = lambda(p^2) + 1 using table values on
// both sides, so it genuinely tests the eigen decomposition.
inline double hecke_square_residual(const Eigenform& f, long pMaxWanted = -1) {
    long lamLimit = static_cast<long>(f.lambda.size()) - 1;
    long pMax = static_cast<long>(std::sqrt(static_cast<double>(lamLimit)));
    if (pMaxWanted > 0) {
        if (pMaxWanted * pMaxWanted > lamLimit)
            throw std::runtime_error("hecke_square_residual: lambda table too short");
        pMax = pMaxWanted;
    }
    double worst = 0.0;
    for (long p : primes_up_to(pMax))
        worst = std::max(worst, std::abs(f.lam(p) * f.lam(p) - f.lam(p * p) - 1.0));
    return worst;
}

struct BoundReport {
    long k = 0;
    std::size_t i = 0, j = 0;
    double M = 1.0;  // window scale entering the envelope powers
    FactorProduct sound;
    FactorProduct holo;
    std::map<long, ShiftedSum> shiftedSums;
    Cplx observedInner;
    double observedErr = 0.0;
    OptimizerResult optimizer;
};

inline Json optimizer_to_json(const OptimizerResult& r) {
    Json j;
    j["precisionBits"] = static_cast<int>(BigFloat::kPrec);
    j["delta1"] = r.delta1.str();
    j["alphaStar"] = r.alphaStar.to_double();
    j["alphaStarStr"] = r.alphaStar.str(30);
    j["L"] = r.L.to_double();
    j["LStr"] = r.L.str();
    j["closedFormL"] = r.closedL.str();
    j["seriesL"] = r.seriesL.str();
    j["route"] = r.seriesUsed ? "series" : "closed-form";
    j["seriesOrder"] = r.seriesOrder;
    return j;
}

inline Json grid_check_to_json(const OptimizerGridCheck& g) {
    Json j;
    j["gridL"] = fmt17(g.gridL);
    j["closedL"] = fmt17(g.closedL);
    j["gridAlphaStar"] = fmt17(g.gridAlphaStar);
    j["maxLambdaDev"] = fmt17(g.maxLambdaDev);
    j["step"] = fmt17(g.step);
    return j;
}

inline Json bound_report_to_json(const BoundReport& r) {
    Json j;
    j["k"] = r.k;
    j["i"] = r.i;
    j["j"] = r.j;
    j["soundProduct"] = fmt17(r.sound.value);
    j["soundFloored"] = r.sound.floored;
    j["holoProduct"] = fmt17(r.holo.value);
    j["holoFloored"] = r.holo.floored;
    j["pMax"] = r.sound.pMax;
    j["M"] = fmt17(r.M);
    j["envelopeSound"] = fmt17(envelope_sound(r.M, r.sound.value));
    j["envelopeHolo"] = fmt17(envelope_holo(r.M, r.holo.value));
    Json shifted = Json::array();
    for (const auto& [m, s] : r.shiftedSums) {
        Json e;
        e["m"] = m;
        e["x"] = s.x;
        e["sum"] = fmt17(s.sum);
        e["ratio"] = fmt17(s.ratio);
        shifted.push_back(e);
    }
    j["shiftedSums"] = shifted;
    j["observedInnerRe"] = fmt17(r.observedInner.real());
    j["observedInnerIm"] = fmt17(r.observedInner.imag());
    j["observedInnerAbs"] = fmt17(std::abs(r.observedInner));
    j["observedErr"] = fmt17(r.observedErr);
    j["optimizer"] = optimizer_to_json(r.optimizer);
    return j;
}

}  // namespace hecke
