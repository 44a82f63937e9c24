#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <cmath>

#include "hecke/forms.hpp"
#include "hecke/sieve.hpp"

using namespace hecke;

TEST_CASE("simultaneous eigenvectors split a degenerate commuting pair") {
    Eigen::MatrixXd P(3, 3);
    P << 1, 1, 0, 0, 1, 1, 1, 0, 2;
    Eigen::MatrixXd Pinv = P.inverse();
    Eigen::Vector3d dA(2.0, 2.0, 5.0), dB(1.0, 3.0, 3.0);
    Eigen::MatrixXd A = P * dA.asDiagonal() * Pinv;
    Eigen::MatrixXd B = P * dB.asDiagonal() * Pinv;

    auto V = simultaneous_eigenvectors({A, B});
    for (long i = 0; i < 3; ++i) {
        Eigen::VectorXd v = V.col(i);
        Eigen::VectorXd av = A * v, bv = B * v;
        double la = v.dot(av), lb = v.dot(bv);
        CHECK((av - la * v).norm() < 1e-10);
        CHECK((bv - lb * v).norm() < 1e-10);
    }
    // A alone cannot separate its repeated eigenvalue 2.
    CHECK_THROWS_AS(simultaneous_eigenvectors({A}), std::runtime_error);
}

TEST_CASE("weight 12 eigenvalues from the coefficient table") {
    auto eb = eigenbasis(12);
    REQUIRE(eb.dim() == 1);
    const auto& f = eb.forms[0];
    CHECK(f.lambda[1] == 1.0);
    CHECK(std::abs(f.lam(2) - (-24.0 / std::pow(2.0, 5.5))) < 1e-13);
    CHECK(std::abs(f.lam(3) - (252.0 / std::pow(3.0, 5.5))) < 1e-13);
    CHECK(std::abs(f.lam(6) - f.lam(2) * f.lam(3)) < 1e-13);
}

TEST_CASE("weight 24 spectrum matches the exact trace and determinant") {
    auto eb = eigenbasis(24, 501);
    REQUIRE(eb.dim() == 2);
    CHECK(eb.trunc == 501);
    double l0 = eb.forms[0].lam(2), l1 = eb.forms[1].lam(2);
    CHECK(l0 < l1);
    double norm = std::pow(2.0, 11.5);
    CHECK(std::abs((l0 + l1) * norm - 1080.0) < 1e-9 * 1080.0);
    double det = 540.0 * 540.0 - 144.0 * 144169.0;
    CHECK(std::abs(l0 * l1 * norm * norm - det) < 1e-9 * std::abs(det));
}

TEST_CASE("normalized eigenvalues satisfy the pointwise bound") {
    auto eb = eigenbasis(24, 501);
    auto primes = primes_up_to(500);
    for (const auto& f : eb.forms)
        for (long p : primes) CHECK(std::abs(f.lam(p)) <= 2.0);
}

TEST_CASE("square relation from independent routes") {
    auto eb = eigenbasis(24, 1000);
    for (const auto& f : eb.forms)
        for (long p : {2L, 3L, 5L, 7L, 11L, 13L, 17L, 19L, 23L, 29L, 31L}) {
            double direct = f.lam(p * p);
            double recursed = f.lam(p) * f.lam(p) - 1.0;
            CHECK(std::abs(direct - recursed) < 1e-10);
        }
}

TEST_CASE("multiplicativity of the coefficient table") {
    auto eb = eigenbasis(36);
    REQUIRE(eb.dim() == 3);
    for (const auto& f : eb.forms) {
        CHECK(std::abs(f.lam(6) - f.lam(2) * f.lam(3)) < 1e-12);
        CHECK(std::abs(f.lam(15) - f.lam(3) * f.lam(5)) < 1e-12);
        CHECK(std::abs(f.lam(36) - f.lam(4) * f.lam(9)) < 1e-12);
    }
    // Distinct lambda(2), ordered, consistent with the exact trace.
    CHECK(eb.forms[0].lam(2) < eb.forms[1].lam(2));
    CHECK(eb.forms[1].lam(2) < eb.forms[2].lam(2));
    auto t2 = hecke_matrix(eb.echelon, 2);
    double tr = qm_trace(t2).get_d();
    double sum = (eb.forms[0].lam(2) + eb.forms[1].lam(2) + eb.forms[2].lam(2)) *
                 std::pow(2.0, 17.5);
    CHECK(std::abs(sum - tr) < 1e-10 * std::abs(tr));
}

TEST_CASE("prime power recursion helper") {
    CHECK(lambda_prime_power(0.7, 0) == 1.0);
    CHECK(lambda_prime_power(0.7, 1) == 0.7);
    CHECK(std::abs(lambda_prime_power(0.7, 2) - (0.49 - 1.0)) < 1e-15);
    // Chebyshev structure: lambda(p) = 2 cos(t) gives lambda(p^e) = sin((e+1)t)/sin(t).
    double t = 0.83;
    double lp = 2.0 * std::cos(t);
    for (int e = 1; e <= 6; ++e)
        CHECK(std::abs(lambda_prime_power(lp, e) - std::sin((e + 1) * t) / std::sin(t)) < 1e-12);
}

TEST_CASE("point evaluation against a hand-written partial sum") {
    auto eb = eigenbasis(12);
    EvalOptions raw{false, false};
    double y = 3.0;
    Cplx got = eval_form(eb, 0, 0.0, y, raw);
    double expected = std::pow(y, 6) *
                      (std::exp(-2.0 * kPi * y) - 24.0 * std::exp(-4.0 * kPi * y) +
                       252.0 * std::exp(-6.0 * kPi * y) - 1472.0 * std::exp(-8.0 * kPi * y));
    CHECK(std::abs(got.imag()) < 1e-16 * std::abs(expected));
    CHECK(std::abs(got.real() - expected) < 1e-12 * std::abs(expected));
}

TEST_CASE("products of forms are invariant under the group action") {
    auto eb = eigenbasis(24);
    EvalOptions raw{false, false};
    SurfacePoint z{0.3, 0.9};
    auto r = reduce(z);
    REQUIRE(!(r.gamma.a == 1 && r.gamma.b == 0 && r.gamma.c == 0 && r.gamma.d == 1));
    Cplx f_z = eval_form(eb, 0, z.x, z.y, raw);
    Cplx g_z = eval_form(eb, 1, z.x, z.y, raw);
    Cplx f_w = eval_form(eb, 0, r.z.x, r.z.y, raw);
    Cplx g_w = eval_form(eb, 1, r.z.x, r.z.y, raw);
    Cplx prod_z = f_z * std::conj(g_z);
    Cplx prod_w = f_w * std::conj(g_w);
    CHECK(std::abs(prod_z - prod_w) < 1e-9 * std::abs(prod_w));
    CHECK(std::abs(std::abs(f_z) - std::abs(f_w)) < 1e-9 * std::abs(f_w));
}

TEST_CASE("calibration fixes the norm and guards misuse") {
    auto eb = eigenbasis(12);
    CHECK_THROWS_AS(eval_form(eb, 0, 0.0, 1.5), std::runtime_error);
    auto rep = petersson_calibrate(eb, 0, 2);
    CHECK(std::isfinite(rep.logA1));
    CHECK(rep.quadErr < 1e-6);
    auto norm_fine = inner_product(eb, 0, 0, 3);
    CHECK(std::abs(norm_fine.value.real() - 1.0) < 1e-6);
    CHECK(std::abs(norm_fine.value.imag()) < 1e-12);
}

TEST_CASE("norm against the smoothed symmetric square series") {
    auto eb = eigenbasis(12, 100000);
    petersson_calibrate(eb, 0, 2);
    double normSq = std::exp(-2.0 * eb.forms[0].logA1);

    auto spf = spf_sieve(100000);
    auto lamSq = lambda_square_table(eb.forms[0], 100000, spf);
    double X = 1e4;
    std::vector<double> terms;
    for (long n = 1; n <= 100000; ++n) {
        double t = lamSq[static_cast<std::size_t>(n)] / static_cast<double>(n) *
                   std::exp(-static_cast<double>(n) / X);
        terms.push_back(t);
    }
    double lsym = (kPi * kPi / 6.0) * pairwise_sum(terms);
    double k = 12.0;
    double predicted = std::exp(std::lgamma(k) - std::log(2.0 * kPi * kPi) -
                                (k - 1.0) * std::log(4.0 * kPi)) *
                       lsym;
    CHECK(std::abs(normSq - predicted) < 0.02 * predicted);
    // Literature anchor for the Petersson norm of the discriminant form.
    CHECK(std::abs(normSq - 1.0354e-6) < 0.01 * 1.0354e-6);
}

TEST_CASE("eigenbasis artifact serialization carries exact doubles") {
    auto eb = eigenbasis(24);
    petersson_calibrate(eb, 0, 1);
    Json j = eigenbasis_to_json(eb, 50);
    CHECK(j["k"] == 24);
    CHECK(j["dim"] == 2);
    CHECK(j["forms"].size() == 2);
    for (long i = 0; i < 2; ++i) {
        const auto& jf = j["forms"][static_cast<std::size_t>(i)];
        for (long n = 0; n <= 50; ++n) {
            double parsed = std::stod(jf["lambda"][static_cast<std::size_t>(n)].get<std::string>());
            CHECK(parsed == eb.forms[static_cast<std::size_t>(i)].lambda[static_cast<std::size_t>(n)]);
        }
    }
    CHECK(j["forms"][0]["logA1"].is_string());
    CHECK(j["forms"][1]["logA1"].is_null());
}
