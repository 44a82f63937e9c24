#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "hecke/eisen.hpp"
#include "hecke/eisfc.hpp"
#include "hecke/forms.hpp"
#include "hecke/probes.hpp"

using namespace hecke;

namespace {

const EigenBasis& basis12() {
    static EigenBasis eb = [] {
        auto b = eigenbasis(12, 2000);
        calibrate_all(b, 2);
        return b;
    }();
    return eb;
}

const EigenBasis& basis24() {
    static EigenBasis eb = [] {
        auto b = eigenbasis(24);
        calibrate_all(b, 2);
        return b;
    }();
    return eb;
}

}  // namespace

TEST_CASE("window support and normalization") {
    auto psi = make_test_function(1.0);
    CHECK(psi.xLo() == Catch::Approx(-0.4));
    CHECK(psi.xHi() == Catch::Approx(0.4));
    CHECK(psi.yLo() == Catch::Approx(1.0));
    CHECK(psi.yHi() == Catch::Approx(1.8));
    CHECK(psi(0.0, 1.4) > 0.0);
    CHECK(psi(0.4, 1.4) == 0.0);
    CHECK(psi(0.0, 1.8) == 0.0);
    CHECK(psi(0.7, 1.4) == 0.0);
    CHECK(psi(0.0, 2.5) == 0.0);

    auto h = make_probe_window();
    CHECK(h.a == 1.0);
    CHECK(h.b == 2.0);
    CHECK(std::abs(mellin(h, Cplx(-1.0, 0.0)) - Cplx(kPi / 3.0)) < 1e-12);
    CHECK(h(0.99) == 0.0);
    CHECK(h(1.5) > 0.0);
    CHECK(h(2.01) == 0.0);

    CHECK_THROWS_AS(scale_window(h, 0.0), std::domain_error);
    CHECK_THROWS_AS(scale_window(h, -2.0), std::domain_error);
    auto hY = scale_window(h, 2.0);
    CHECK(hY.a == Catch::Approx(0.5));
    CHECK(hY.b == Catch::Approx(1.0));
    CHECK(hY(1.5) == h(3.0));
}

TEST_CASE("fourier slice against a brute x integral") {
    auto psi = make_test_function(1.0);
    double y = 1.35;
    for (long m : {0L, 1L, 5L}) {
        auto pts = gauss10_composite(psi.xLo(), psi.xHi(), 400);
        Cplx brute = 0.0;
        for (auto [x, w] : pts)
            brute += w * psi(x, y) *
                     Cplx(std::cos(2.0 * kPi * m * x), -std::sin(2.0 * kPi * m * x));
        Cplx fast = fourier_slice(psi, m, y);
        // Gauss panels converge only subgeometrically on the bump; the
        // 24-panel production floor carries a few units of 1e-12.
        CHECK(std::abs(fast - brute) < 1e-10 * std::max(1.0, std::abs(brute)));
    }
    CHECK(fourier_slice(psi, 2, 0.9) == Cplx(0.0));
    CHECK(fourier_slice(psi, 2, 1.9) == Cplx(0.0));
    // Real window: slice at -m is the conjugate.
    Cplx p = fourier_slice(psi, 3, y), q = fourier_slice(psi, -3, y);
    CHECK(std::abs(p - std::conj(q)) < 1e-15);
}

TEST_CASE("window reconstruction from its fourier slices") {
    auto psi = make_test_function(1.0);
    // Bump slices decay like exp(-c sqrt(m)) only, so the sum needs depth.
    double x = 0.12, y = 1.3;
    Cplx acc = 0.0;
    for (long m = -64; m <= 64; ++m) {
        double ph = 2.0 * kPi * static_cast<double>(m) * x;
        acc += fourier_slice(psi, m, y) * Cplx(std::cos(ph), std::sin(ph));
    }
    CHECK(std::abs(acc.imag()) < 1e-10);
    CHECK(std::abs(acc.real() - psi(x, y)) < 1e-5 * std::max(1.0, psi(x, y)));
}

TEST_CASE("eisenstein series dual route at s = 2") {
    for (auto [x, y] : {std::pair<double, double>{0.3, 0.8}, {0.2, 1.7}, {-0.41, 1.05}}) {
        SurfacePoint z{x, y};
        double fast = eval_eisenstein_s2(z);
        Cplx series = eval_eisenstein(z, Cplx(2.0, 0.0));
        CHECK(std::abs(series.imag()) < 1e-12 * fast);
        CHECK(std::abs(series.real() - fast) < 1e-11 * fast);
        double coset = eisenstein_coset_oracle(z, 2.0);
        CHECK(std::abs(coset - fast) < 2e-6 * fast);
    }
}

TEST_CASE("eisenstein series is invariant under the inversion") {
    for (Cplx s : {Cplx(2.0, 0.0), Cplx(1.5, 0.9)}) {
        SurfacePoint z{0.3, 0.8};
        double den = z.x * z.x + z.y * z.y;
        SurfacePoint w{-z.x / den, z.y / den};
        Cplx a = eval_eisenstein(z, s), b = eval_eisenstein(w, s);
        CHECK(std::abs(a - b) < 1e-10 * std::abs(a));
    }
}

TEST_CASE("eisenstein series domain guards") {
    SurfacePoint z{0.1, 1.2};
    CHECK_THROWS_AS(eval_eisenstein(z, Cplx(1.0005, 0.0)), std::domain_error);
    CHECK_THROWS_AS(eval_eisenstein(z, Cplx(0.3, 0.0)), std::domain_error);
    CHECK_THROWS_AS(eval_eisenstein(z, Cplx(3.5, 0.0)), std::domain_error);
    CHECK_THROWS_AS(eval_eisenstein(SurfacePoint{0.0, -1.0}, Cplx(2.0, 0.0)), std::domain_error);
}

TEST_CASE("eisenstein ladder table matches single evaluations") {
    double y = 1.1, sigma = 2.0;
    std::vector<double> taus{0.0, 1.5, 4.0, 11.0};
    auto t = eisenstein_table(y, sigma, taus);
    for (double x : {0.0, 0.27}) {
        for (std::size_t j = 0; j < taus.size(); ++j) {
            Cplx cheap = t.eval(x, j);
            Cplx full = eval_eisenstein(SurfacePoint{x, y}, Cplx(sigma, taus[j]));
            CHECK(std::abs(cheap - full) < 1e-9 * std::abs(full));
        }
    }
    CHECK_THROWS_AS(eisenstein_table(y, sigma, std::vector<double>{30.0}), std::domain_error);
    CHECK_THROWS_AS(eisenstein_table(y, 1.0, taus), std::domain_error);
}

TEST_CASE("incomplete eisenstein coset sum structure") {
    auto h = make_probe_window();
    // Above the support only the identity coset reaches it, and above y = 2
    // nothing does.
    CHECK(eval_incomplete_eisenstein(h, SurfacePoint{0.13, 2.5}) == 0.0);
    CHECK(eval_incomplete_eisenstein(h, SurfacePoint{0.25, 1.5}) == h(1.5));

    SurfacePoint z{0.3, 0.7};
    double den = z.x * z.x + z.y * z.y;
    SurfacePoint w{-z.x / den, z.y / den};
    double a = eval_incomplete_eisenstein(h, z);
    CHECK(a > 0.0);
    CHECK(std::abs(a - eval_incomplete_eisenstein(h, w)) < 1e-12 * a);
    CHECK(std::abs(a - eval_incomplete_eisenstein(h, SurfacePoint{z.x + 1.0, z.y})) < 1e-12 * a);

    // Unfolded average: the integral over the domain is Mellin[h](-1).
    auto avg = integrate_fd([&](double x, double y) {
        return eval_incomplete_eisenstein(h, SurfacePoint{x, y});
    }, 3, 3.0);
    CHECK(std::abs(avg.value - kPi / 3.0) < 1e-8);
}

TEST_CASE("critical line fourier modes match the direct projection") {
    auto h = make_probe_window();
    auto fc = make_eis_fc(h);
    CHECK(std::abs(fc.residue - 1.0) < 1e-12);

    struct Probe { long ell; double y; };
    for (auto [ell, y] : {Probe{0, 1.1}, Probe{1, 0.8}, Probe{2, 0.6}}) {
        Cplx direct = incomplete_eis_fc_direct(h, ell, y);
        CHECK(std::abs(direct.imag()) < 1e-12);
        double line = fc.aEll(ell, y);
        CHECK(std::abs(line - direct.real()) < 1e-5 * std::max(1.0, std::abs(direct.real())));
    }

    // Above the support boundary the nonzero modes cancel to zero on the
    // line while the coset sum gives them as exact zeros.
    CHECK(std::abs(incomplete_eis_fc_direct(h, 1, 1.3)) < 1e-14);
    CHECK(std::abs(fc.aEll(1, 1.3)) < 1e-6);
    CHECK(std::abs(fc.a0(1.3) - h(1.3)) < 1e-6);
}

TEST_CASE("direct mode profile agrees with the single-point projection") {
    auto h = make_probe_window();
    std::vector<double> ys{0.6, 0.85, 1.5};
    for (long ell : {0L, 1L, 3L}) {
        auto prof = eis_fc_direct_profile(h, ell, ys);
        for (std::size_t q = 0; q < ys.size(); ++q) {
            Cplx single = incomplete_eis_fc_direct(h, ell, ys[q]);
            CHECK(std::abs(prof[q] - single.real()) < 1e-12 * std::max(1.0, std::abs(single)));
        }
    }
}

TEST_CASE("contour synthesis reproduces the coset sum") {
    auto h = make_probe_window();
    auto fc = make_eis_fc(h);
    SurfacePoint z{0.3, 1.2};
    double direct = eval_incomplete_eisenstein(h, z);
    double line = incomplete_eisenstein_contour(fc, z);
    CHECK(std::abs(line - direct) < 1e-6 * std::max(1.0, direct));
}

TEST_CASE("poincare pairing: quadrature routes match the unfolded series") {
    const auto& eb = basis12();
    auto psi = make_test_function(1.0);
    for (long m : {1L, 2L}) {
        Cplx series = unfold_poincare_rhs(eb, 0, 0, psi, m);
        auto fd = unfold_poincare_lhs(eb, 0, 0, psi, m, 2);
        CHECK(std::abs(fd.value - series) < 1e-4 * std::abs(series));
        if (m == 1) {
            auto strip = integrate_strip(
                [&](double x, double y) -> Cplx {
                    Cplx slice = fourier_slice(psi, m, y);
                    if (slice == Cplx(0.0)) return Cplx(0.0);
                    double ph = 2.0 * kPi * static_cast<double>(m) * x;
                    return slice * Cplx(std::cos(ph), std::sin(ph)) * eval_form(eb, 0, x, y) *
                           std::conj(eval_form(eb, 0, x, y));
                },
                psi.yLo(), psi.yHi(), 2);
            CHECK(std::abs(strip.value - series) < 1e-4 * std::abs(series));
        }
    }
    CHECK_THROWS_AS(unfold_poincare_rhs(eigenbasis(12), 0, 0, psi, 1), std::runtime_error);
}

TEST_CASE("mellin gamma identity across shifts and weights") {
    auto psi = make_test_function(1.0);
    CHECK(mellin_gamma_check(psi, 1, 1, 12).relDiff < 1e-8);
    CHECK(mellin_gamma_check(psi, 3, 1, 12).relDiff < 1e-8);
    CHECK(mellin_gamma_check(psi, 2, 2, 16).relDiff < 1e-8);
    // Off-center window: the slice has a genuine imaginary part, so this
    // exercises the two-sided tau grid. M = 2 keeps the shifted support
    // inside |x| <= 1/2.
    auto shifted = make_test_function(2.0, 0.2, 1.4);
    CHECK(mellin_gamma_check(shifted, 1, 1, 12).relDiff < 1e-8);
}

TEST_CASE("rankin selberg pairing at weight 12") {
    const auto& eb = basis12();
    auto rs = rankin_selberg_check(eb, 0, 0, 2000, 2);
    CHECK(rs.relDiff < 1e-4);
    CHECK(rs.lhs > 0.0);
    CHECK_THROWS_AS(rankin_selberg_check(eb, 0, 0, 5000, 2), std::runtime_error);
}

TEST_CASE("mass observable: direct and bilinear routes") {
    const auto& eb = basis24();
    auto psi = make_test_function(1.0);
    double r = 1.0 / std::sqrt(2.0);
    std::vector<Cplx> coeff{Cplx(r), Cplx(r)};
    auto rep = mass_observable(eb, coeff, psi, 2);
    CHECK(rep.relDiff < 1e-8);
    CHECK(rep.queReference > 0.0);
    CHECK(std::abs(rep.direct.imag()) < 1e-10 * std::abs(rep.direct.real()));
    CHECK(rep.direct.real() > 0.0);
    CHECK_THROWS_AS(mass_observable(eb, std::vector<Cplx>{Cplx(1.0)}, psi, 2),
                    std::domain_error);
}

TEST_CASE("windowed pair matrix is hermitian with real diagonal") {
    const auto& eb = basis24();
    auto psi = make_test_function(1.0);
    auto pm = windowed_pair_matrix(eb, psi, 2, psi.yHi() + 1.0);
    REQUIRE(pm.inner.size() == 2);
    double scale = std::abs(pm.inner[0][0]);
    CHECK(std::abs(pm.inner[0][1] - std::conj(pm.inner[1][0])) < 1e-13 * scale);
    CHECK(std::abs(pm.inner[0][0].imag()) < 1e-13 * scale);
    CHECK(pm.inner[0][0].real() > 0.0);
    CHECK(pm.inner[1][1].real() > 0.0);
    // Distinct eigenforms decorrelate: the off-diagonal entry is well below
    // the diagonal but the quadrature resolves it.
    CHECK(std::abs(pm.inner[0][1]) < 0.5 * scale);
    CHECK(pm.errs[0][1] < 0.1 * std::abs(pm.inner[0][1]));
}

TEST_CASE("probe decomposition: mode sum matches the direct pairing") {
    const auto& eb = basis12();
    auto h = make_probe_window();
    auto rep = probe_decomposition(eb, 0, 0, h, h, 2.0, 4, 2);
    CHECK(rep.relDiff < 1e-3);
    REQUIRE(rep.modes.size() == 9);
    // The shifted sums for l and -l coincide term by term.
    for (std::size_t q = 0; q < 4; ++q)
        CHECK(std::abs(rep.modes[q] - rep.modes[8 - q]) < 1e-10 * std::abs(rep.modeSum));
    CHECK_THROWS_AS(probe_decomposition(eigenbasis(12), 0, 0, h, h, 2.0, 1, 2),
                    std::runtime_error);
}

TEST_CASE("probe zero mode: swapped contour route") {
    const auto& eb = basis12();
    auto h = make_probe_window();
    Cplx direct = probe_mode(eb, 0, 0, h, h, 2.0, 0);
    auto fc = make_eis_fc(h);
    Cplx swapped = probe_zero_mode_swapped(eb, 0, 0, fc, h, 2.0);
    CHECK(std::abs(swapped - direct) < 1e-5 * std::abs(direct));
}

TEST_CASE("fourth moment matches the doubled-weight parseval sum") {
    const auto& ebk = basis12();
    const auto& eb2k = basis24();
    auto rep = l4_parseval(ebk, eb2k, 0, 2);
    CHECK(rep.relDiff < 1e-6);
    CHECK(rep.lhs > 0.0);
    REQUIRE(rep.partial.size() == 2);
    CHECK(rep.partial[0] <= rep.partial[1] + 1e-12 * rep.total);
    CHECK(rep.partial[1] == Catch::Approx(rep.total));
    CHECK_THROWS_AS(l4_parseval(ebk, ebk, 0, 2), std::domain_error);
}
