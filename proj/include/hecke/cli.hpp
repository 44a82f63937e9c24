#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "hecke/bounds.hpp"
#include "hecke/eisen.hpp"
#include "hecke/eisfc.hpp"
#include "hecke/forms.hpp"
#include "hecke/io.hpp"
#include "hecke/poincare.hpp"
#include "hecke/probes.hpp"
#include "hecke/windows.hpp"

namespace hecke {
namespace cli_detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) parts.push_back(cur);
    return parts;
}

inline long to_long(const std::string& s) {
    std::size_t pos = 0;
    long v = std::stol(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("not an integer: " + s);
    return v;
}

inline double to_double(const std::string& s) {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("not a number: " + s);
    return v;
}

// "a:b" or "a:b:step" inclusive range, or a comma list.
inline std::vector<long> parse_weights(const std::string& s) {
    std::vector<long> out;
    if (s.find(':') != std::string::npos) {
        auto p = split(s, ':');
        if (p.size() != 2 && p.size() != 3)
            throw std::invalid_argument("weight range must be a:b or a:b:step");
        long a = to_long(p[0]), b = to_long(p[1]);
        long st = p.size() == 3 ? to_long(p[2]) : 4;
        if (st <= 0 || b < a) throw std::invalid_argument("weight range is empty");
        for (long k = a; k <= b; k += st) out.push_back(k);
    } else {
        for (const auto& t : split(s, ',')) out.push_back(to_long(t));
    }
    if (out.empty()) throw std::invalid_argument("empty weight list");
    return out;
}

inline std::vector<long> parse_longs(const std::string& s) {
    std::vector<long> out;
    for (const auto& t : split(s, ',')) out.push_back(to_long(t));
    if (out.empty()) throw std::invalid_argument("empty integer list");
    return out;
}

inline std::pair<long, long> parse_pair(const std::string& s) {
    auto p = split(s, ',');
    if (p.size() != 2) throw std::invalid_argument("pair must be i,j");
    return {to_long(p[0]), to_long(p[1])};
}

inline TestFunction load_window(const std::string& path, double M) {
    if (path.empty()) return make_test_function(M);
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read window file: " + path);
    Json j = Json::parse(in);
    return test_function_from_json(j);
}

inline Json cplx_json(Cplx v) {
    return Json{{"re", fmt17(v.real())}, {"im", fmt17(v.imag())}};
}

inline double rel_diff(Cplx a, Cplx b) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

// Primary artifact to stdout (and --out), timing to stderr so that the
// artifact bytes do not depend on the clock.
inline int emit(RunManifest& man, Json results, const std::string& outPath, const Stopwatch& sw,
                int code) {
    Json artifact;
    artifact["manifest"] = man.primary();
    artifact["results"] = std::move(results);
    std::string body = artifact.dump(2);
    body += '\n';
    if (!outPath.empty()) write_text_file(outPath, body);
    std::cout << body;
    man.wallTimeMs = sw.ms();
    std::cerr << man.timing().dump() << '\n';
    return code;
}

struct BasisArgs {
    long k = 12;
    long trunc = -1;
    long coeffs = 32;
    std::string out;
};

inline int run_basis(const BasisArgs& a) {
    Stopwatch sw;
    long trunc = a.trunc < 0 ? default_truncation(a.k, 13) : a.trunc;
    auto basis = miller_basis(a.k, trunc);
    long emitN = std::min(a.coeffs, trunc);

    RunManifest man;
    man.command = "basis";
    man.parameters = Json{{"weight", a.k}, {"trunc", trunc}, {"coeffs", emitN}};
    Json res;
    res["k"] = a.k;
    res["dim"] = static_cast<long>(basis.size());
    res["trunc"] = trunc;
    Json forms = Json::array();
    for (const auto& f : basis) forms.push_back(qseries_to_json(qs_truncate(f, emitN)));
    res["forms"] = forms;
    return emit(man, res, a.out, sw, 0);
}

struct EigenArgs {
    long k = 12;
    long nmax = 10;
    long trunc = -1;
    std::string out;
};

inline int run_eigen(const EigenArgs& a) {
    Stopwatch sw;
    long trunc = std::max(a.trunc, a.nmax);
    auto eb = eigenbasis(a.k, trunc);

    RunManifest man;
    man.command = "eigen";
    man.parameters = Json{{"weight", a.k}, {"nmax", a.nmax}};
    man.cutoffs = Json{{"trunc", eb.trunc}};
    return emit(man, eigenbasis_to_json(eb, a.nmax), a.out, sw, 0);
}

struct InnerArgs {
    long k = 24;
    long level = 3;
    long calibLevel = 2;
    double yMax = 50.0;
    double tol = 1e-5;
    std::string out;
};

inline int run_inner(const InnerArgs& a) {
    Stopwatch sw;
    auto eb = eigenbasis(a.k);
    Json calib = Json::array();
    for (long i = 0; i < eb.dim(); ++i) {
        auto rep = petersson_calibrate(eb, i, a.calibLevel, a.yMax);
        calib.push_back(Json{{"index", i}, {"logA1", fmt17(rep.logA1)}, {"quadErr", fmt17(rep.quadErr)}});
    }
    auto gram = gram_matrix(eb, a.level, a.yMax);
    double maxOff = 0.0, diagDev = 0.0;
    Json rows = Json::array();
    for (long i = 0; i < eb.dim(); ++i) {
        Json row = Json::array();
        for (long j = 0; j < eb.dim(); ++j) {
            Cplx g = gram.gram[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            row.push_back(cplx_json(g));
            if (i == j)
                diagDev = std::max(diagDev, std::abs(g - Cplx(1.0)));
            else
                maxOff = std::max(maxOff, std::abs(g));
        }
        rows.push_back(row);
    }
    bool pass = maxOff <= a.tol && diagDev <= a.tol;

    RunManifest man;
    man.command = "inner";
    man.parameters = Json{{"weight", a.k}, {"level", a.level}, {"calibLevel", a.calibLevel}};
    man.cutoffs = Json{{"yMax", a.yMax}, {"trunc", eb.trunc}};
    man.tolerances = Json{{"gram", a.tol}};
    Json res;
    res["k"] = a.k;
    res["dim"] = eb.dim();
    res["calibration"] = calib;
    res["gram"] = rows;
    res["gramErr"] = fmt17(gram.err);
    res["maxOffDiag"] = fmt17(maxOff);
    res["diagDeviation"] = fmt17(diagDev);
    res["pass"] = pass;
    return emit(man, res, a.out, sw, pass ? 0 : 1);
}

struct UnfoldArgs {
    long k = 12;
    std::string mList = "1,2";
    std::string pair = "0,0";
    long level = 2;
    std::string mg = "3,1";
    long rsNmax = 0;
    std::string rsPair = "0,0";
    std::string psiPath;
    double tolPoincare = 1e-4;
    double tolMellin = 1e-8;
    double tolRs = 1e-4;
    std::string out;
};

inline int run_unfold(const UnfoldArgs& a) {
    Stopwatch sw;
    auto ms = parse_longs(a.mList);
    auto [fi, fj] = parse_pair(a.pair);
    auto psi = load_window(a.psiPath, 1.0);
    long trunc = std::max<long>(-1, a.rsNmax);
    auto eb = eigenbasis(a.k, trunc);
    if (fi < 0 || fj < 0 || fi >= eb.dim() || fj >= eb.dim())
        throw std::domain_error("pair index outside the eigenbasis");
    calibrate_all(eb, a.level);
    auto si = static_cast<std::size_t>(fi), sj = static_cast<std::size_t>(fj);

    bool pass = true;
    Json unfold = Json::array();
    for (long m : ms) {
        if (m <= 0) throw std::domain_error("shift m must be positive");
        auto strip = integrate_strip(
            [&](double x, double y) -> Cplx {
                Cplx slice = fourier_slice(psi, m, y);
                if (slice == Cplx(0.0)) return Cplx(0.0);
                double ph = 2.0 * kPi * static_cast<double>(m) * x;
                return slice * Cplx(std::cos(ph), std::sin(ph)) * eval_form(eb, fi, x, y) *
                       std::conj(eval_form(eb, fj, x, y));
            },
            psi.yLo(), psi.yHi(), a.level);
        auto fd = unfold_poincare_lhs(eb, si, sj, psi, m, a.level);
        Cplx series = unfold_poincare_rhs(eb, si, sj, psi, m);
        double dStrip = rel_diff(strip.value, series);
        double dFd = rel_diff(fd.value, series);
        bool ok = dStrip <= a.tolPoincare && dFd <= a.tolPoincare;
        pass = pass && ok;
        Json e;
        e["m"] = m;
        e["stripQuadrature"] = cplx_json(strip.value);
        e["stripErr"] = fmt17(strip.err);
        e["cosetQuadrature"] = cplx_json(fd.value);
        e["cosetErr"] = fmt17(fd.err);
        e["series"] = cplx_json(series);
        e["relDiffStrip"] = fmt17(dStrip);
        e["relDiffCoset"] = fmt17(dFd);
        e["pass"] = ok;
        unfold.push_back(e);
    }

    auto [mgM, mgN] = parse_pair(a.mg);
    auto mg = mellin_gamma_check(psi, mgM, mgN, a.k);
    bool mgOk = mg.relDiff <= a.tolMellin;
    pass = pass && mgOk;

    Json res;
    res["k"] = a.k;
    res["pair"] = Json::array({fi, fj});
    res["unfold"] = unfold;
    res["mellinGamma"] = Json{{"m", mgM},
                              {"n", mgN},
                              {"direct", cplx_json(mg.direct)},
                              {"contour", cplx_json(mg.contour)},
                              {"relDiff", fmt17(mg.relDiff)},
                              {"pass", mgOk}};

    if (a.rsNmax > 0) {
        auto [ri, rj] = parse_pair(a.rsPair);
        if (ri < 0 || rj < 0 || ri >= eb.dim() || rj >= eb.dim())
            throw std::domain_error("rs pair index outside the eigenbasis");
        auto rs = rankin_selberg_check(eb, static_cast<std::size_t>(ri),
                                       static_cast<std::size_t>(rj), a.rsNmax, a.level);
        bool rsOk = rs.relDiff <= a.tolRs;
        pass = pass && rsOk;
        res["rankinSelberg"] = Json{{"pair", Json::array({ri, rj})},
                                    {"nMax", a.rsNmax},
                                    {"quadrature", fmt17(rs.lhs)},
                                    {"quadErr", fmt17(rs.lhsErr)},
                                    {"series", fmt17(rs.rhs)},
                                    {"relDiff", fmt17(rs.relDiff)},
                                    {"pass", rsOk}};
    }
    res["window"] = test_function_to_json(psi);
    res["pass"] = pass;

    RunManifest man;
    man.command = "unfold-check";
    man.parameters = Json{{"weight", a.k}, {"m", a.mList},      {"pair", a.pair},
                          {"level", a.level}, {"mg", a.mg},     {"rsNmax", a.rsNmax},
                          {"rsPair", a.rsPair}};
    man.cutoffs = Json{{"trunc", eb.trunc}};
    man.tolerances =
        Json{{"poincare", a.tolPoincare}, {"mellinGamma", a.tolMellin}, {"rankinSelberg", a.tolRs}};
    return emit(man, res, a.out, sw, pass ? 0 : 1);
}

struct MassArgs {
    long k = 12;
    std::string coeff;
    std::string psiPath;
    double M = 1.0;
    long level = 2;
    double tol = 1e-5;
    std::string out;
};

inline int run_massq(const MassArgs& a) {
    Stopwatch sw;
    auto eb = eigenbasis(a.k);
    calibrate_all(eb, a.level);
    std::vector<Cplx> coeff;
    if (a.coeff.empty()) {
        coeff.assign(static_cast<std::size_t>(eb.dim()),
                     Cplx(1.0 / std::sqrt(static_cast<double>(eb.dim()))));
    } else {
        for (const auto& t : split(a.coeff, ',')) coeff.emplace_back(to_double(t));
        if (static_cast<long>(coeff.size()) != eb.dim())
            throw std::domain_error("coefficient count must match the dimension");
    }
    auto psi = load_window(a.psiPath, a.M);
    auto rep = mass_observable(eb, coeff, psi, a.level);
    bool pass = rep.relDiff <= a.tol;

    RunManifest man;
    man.command = "massq";
    man.parameters = Json{{"weight", a.k}, {"level", a.level}, {"M", a.M}};
    man.cutoffs = Json{{"trunc", eb.trunc}};
    man.tolerances = Json{{"bilinear", a.tol}};
    Json res;
    res["k"] = a.k;
    Json cj = Json::array();
    for (auto c : coeff) cj.push_back(cplx_json(c));
    res["coeff"] = cj;
    res["window"] = test_function_to_json(psi);
    res["direct"] = cplx_json(rep.direct);
    res["directErr"] = fmt17(rep.directErr);
    res["bilinear"] = cplx_json(rep.bilinear);
    res["bilinearErr"] = fmt17(rep.bilinearErr);
    res["queReference"] = fmt17(rep.queReference);
    res["relDiff"] = fmt17(rep.relDiff);
    res["pass"] = pass;
    return emit(man, res, a.out, sw, pass ? 0 : 1);
}

struct L4Args {
    long k = 12;
    long level = 2;
    double tol = 1e-3;
    std::string out;
};

inline int run_l4(const L4Args& a) {
    Stopwatch sw;
    auto ebk = eigenbasis(a.k);
    auto eb2k = eigenbasis(2 * a.k);
    calibrate_all(ebk, a.level);
    calibrate_all(eb2k, a.level);
    auto rep = l4_parseval(ebk, eb2k, 0, a.level);
    bool monotone = true;
    for (std::size_t h = 1; h < rep.partial.size(); ++h)
        if (rep.partial[h] < rep.partial[h - 1] - 1e-12 * std::abs(rep.total)) monotone = false;
    bool pass = rep.relDiff <= a.tol && monotone;

    RunManifest man;
    man.command = "l4";
    man.parameters = Json{{"weight", a.k}, {"level", a.level}};
    man.cutoffs = Json{{"truncK", ebk.trunc}, {"trunc2K", eb2k.trunc}};
    man.tolerances = Json{{"parseval", a.tol}};
    Json res;
    res["k"] = a.k;
    res["fourthMoment"] = fmt17(rep.lhs);
    res["fourthMomentErr"] = fmt17(rep.lhsErr);
    Json part = Json::array();
    for (double p : rep.partial) part.push_back(fmt17(p));
    res["partialSums"] = part;
    res["spectralTotal"] = fmt17(rep.total);
    res["relDiff"] = fmt17(rep.relDiff);
    res["monotone"] = monotone;
    res["pass"] = pass;
    return emit(man, res, a.out, sw, pass ? 0 : 1);
}

struct BoundsArgs {
    long k = 24;
    std::string pair = "0,1";
    long x = 100000;
    std::string mList = "1,2,3,4";
    std::string delta1 = "soundararajan-thorner";
    double M = 1.0;
    long pMax = 0;
    std::string psiPath;
    long level = 2;
    std::string out;
};

inline int run_bounds(const BoundsArgs& a) {
    Stopwatch sw;
    auto [bi, bj] = parse_pair(a.pair);
    auto msList = parse_longs(a.mList);
    long maxM = *std::max_element(msList.begin(), msList.end());
    long trunc = std::max(a.x + maxM, default_truncation(a.k, 13));
    auto eb = eigenbasis(a.k, trunc);
    if (bi < 0 || bj < 0 || bi >= eb.dim() || bj >= eb.dim())
        throw std::domain_error("pair index outside the eigenbasis");
    const auto& f = eb.forms.at(static_cast<std::size_t>(bi));
    const auto& g = eb.forms.at(static_cast<std::size_t>(bj));

    BoundReport rep;
    rep.k = a.k;
    rep.i = static_cast<std::size_t>(bi);
    rep.j = static_cast<std::size_t>(bj);
    rep.M = a.M;
    BigFloat d1 = preset_delta1(a.delta1);
    long pMax = a.pMax > 0 ? a.pMax : a.k;
    rep.sound = sound_product(f, g, d1.to_double(), pMax);
    rep.holo = holo_product(f, g, pMax);
    for (long m : msList) rep.shiftedSums[m] = shifted_convolution(f, g, m, a.x);
    rep.optimizer = optimize_exponent(d1);

    auto psi = load_window(a.psiPath, a.M);
    calibrate_all(eb, a.level);
    auto pm = windowed_pair_matrix(eb, psi, a.level, psi.yHi() + 1.0);
    rep.observedInner = pm.inner[rep.i][rep.j];
    rep.observedErr = pm.errs[rep.i][rep.j];

    RunManifest man;
    man.command = "bounds";
    man.parameters = Json{{"weight", a.k},   {"pair", a.pair},     {"x", a.x},
                          {"mList", a.mList}, {"delta1", a.delta1}, {"M", a.M},
                          {"level", a.level}};
    man.cutoffs = Json{{"trunc", eb.trunc}, {"pMax", pMax}};
    Json res = bound_report_to_json(rep);
    res["window"] = test_function_to_json(psi);
    return emit(man, res, a.out, sw, 0);
}

struct OptimizeArgs {
    std::string delta1 = "soundararajan-thorner";
    int bits = 256;
    double gridStep = 1e-3;
    std::string out;
};

inline int run_optimize(const OptimizeArgs& a) {
    Stopwatch sw;
    if (a.bits != static_cast<int>(BigFloat::kPrec))
        throw std::domain_error("this build fixes the working precision at 256 bits");
    BigFloat d1 = preset_delta1(a.delta1);
    auto opt = optimize_exponent(d1);
    auto grid = optimizer_grid_check(d1.to_double(), a.gridStep);
    double gridTol = 10.0 * a.gridStep * a.gridStep + 1e-12;
    bool pass = std::abs(grid.gridL - grid.closedL) <= gridTol;

    RunManifest man;
    man.command = "optimize";
    man.parameters = Json{{"delta1", a.delta1}, {"bits", a.bits}, {"gridStep", a.gridStep}};
    man.tolerances = Json{{"gridAgreement", gridTol}};
    Json res;
    res["optimizer"] = optimizer_to_json(opt);
    res["gridCheck"] = grid_check_to_json(grid);
    res["pass"] = pass;
    return emit(man, res, a.out, sw, pass ? 0 : 1);
}

struct MertensArgs {
    double delta = 1.0;
    long x = 10000000;
    double tol = 0.02;
    std::string out;
};

inline int run_mertens(const MertensArgs& a) {
    Stopwatch sw;
    auto rep = mertens_product(a.delta, a.x);
    bool hasRef = !std::isnan(rep.reference);
    bool pass = !hasRef || rep.relDiff <= a.tol;

    RunManifest man;
    man.command = "mertens";
    man.parameters = Json{{"delta", a.delta}, {"x", a.x}};
    man.tolerances = Json{{"relDiff", a.tol}};
    Json res;
    res["delta"] = fmt17(rep.delta);
    res["x"] = rep.x;
    res["value"] = fmt17(rep.value);
    res["reference"] = hasRef ? Json(fmt17(rep.reference)) : Json(nullptr);
    res["relDiff"] = hasRef ? Json(fmt17(rep.relDiff)) : Json(nullptr);
    res["pass"] = pass;
    return emit(man, res, a.out, sw, pass ? 0 : 1);
}

struct ScanArgs {
    std::string weights = "24:60:4";
    std::string psiPath;
    double M = 1.0;
    long level = 3;
    std::string delta1 = "soundararajan-thorner";
    long pMax = 0;
    std::string out = "decor_scan.csv";
    std::string jsonOut;
};

inline int run_scan(const ScanArgs& a) {
    Stopwatch sw;
    auto ks = parse_weights(a.weights);
    auto psi = load_window(a.psiPath, a.M);
    double d1 = preset_delta1(a.delta1).to_double();

    std::ostringstream csv;
    csv << "k,i,j,reInner,imInner,absInner,soundProduct,holoProduct,quadErr\n";
    std::vector<long> fitK;
    std::vector<double> fitAbs;
    long rows = 0;
    bool finite = true;
    Json perWeight = Json::array();
    for (long k : ks) {
        auto eb = eigenbasis(k);
        calibrate_all(eb, 2);
        auto pm = windowed_pair_matrix(eb, psi, a.level, psi.yHi() + 1.0);
        long pMax = a.pMax > 0 ? a.pMax : k;
        double maxRel = 0.0;
        for (long i = 0; i < eb.dim(); ++i) {
            for (long j = i; j < eb.dim(); ++j) {
                auto si = static_cast<std::size_t>(i), sj = static_cast<std::size_t>(j);
                Cplx v = pm.inner[si][sj];
                double err = pm.errs[si][sj];
                auto sound = sound_product(eb.forms[si], eb.forms[sj], d1, pMax);
                auto holo = holo_product(eb.forms[si], eb.forms[sj], pMax);
                finite = finite && std::isfinite(v.real()) && std::isfinite(v.imag()) &&
                         std::isfinite(err);
                if (std::abs(v) > 0.0) maxRel = std::max(maxRel, err / std::abs(v));
                csv << k << ',' << i << ',' << j << ',' << fmt17(v.real()) << ','
                    << fmt17(v.imag()) << ',' << fmt17(std::abs(v)) << ',' << fmt17(sound.value)
                    << ',' << fmt17(holo.value) << ',' << fmt17(err) << '\n';
                ++rows;
            }
        }
        if (eb.dim() >= 2) {
            fitK.push_back(k);
            fitAbs.push_back(std::abs(pm.inner[0][1]));
        }
        perWeight.push_back(Json{{"k", k},
                                 {"dim", eb.dim()},
                                 {"maxErrOverValue", fmt17(maxRel)},
                                 {"pairErrMax", fmt17(pm.err)}});
    }
    write_text_file(a.out, csv.str());

    RunManifest man;
    man.command = "decor-scan";
    man.parameters = Json{{"weights", a.weights}, {"level", a.level}, {"M", a.M},
                          {"delta1", a.delta1},   {"csv", a.out}};
    Json res;
    res["csvPath"] = a.out;
    res["window"] = test_function_to_json(psi);
    res["rows"] = rows;
    res["finite"] = finite;
    res["perWeight"] = perWeight;
    if (fitK.size() >= 2) {
        auto fit = decay_fit(fitK, fitAbs);
        res["offDiagonalFit"] = Json{{"slope", fmt17(fit.slope)},
                                     {"intercept", fmt17(fit.intercept)},
                                     {"r2", fmt17(fit.r2)},
                                     {"points", fit.points}};
    } else {
        res["offDiagonalFit"] = nullptr;
    }
    return emit(man, res, a.jsonOut, sw, finite ? 0 : 1);
}

inline std::string fmtg(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

inline void require(bool ok, const std::string& what) {
    if (!ok) throw std::runtime_error(what);
}

// Named checks with one PASS/FAIL line each. Each check throws on failure or
// returns a short detail string.
inline int run_selftest() {
    struct Check {
        std::string name;
        std::function<std::string()> fn;
    };
    auto rel = [](double x, double ref) {
        return std::abs(x - ref) / std::max(std::abs(ref), 1e-300);
    };
    std::vector<Check> checks;

    checks.push_back({"discriminant-identities", [] {
        long N = 200;
        auto e4 = eisenstein_series(4, N), e6 = eisenstein_series(6, N);
        auto lhs = qs_add(qs_mul(qs_mul(e4, e4), e4), qs_scale(qs_mul(e6, e6), mpq_class(-1)));
        lhs.weight = 12;
        require(qs_equal(lhs, qs_scale(delta(N), mpq_class(1728))), "E4^3 - E6^2 != 1728 Delta");
        const long tau[11] = {0, 1, -24, 252, -1472, 4830, -6048, -16744, 84480, -113643, -115920};
        auto d = delta(N);
        for (long n = 1; n <= 10; ++n)
            require(d.at(n) == mpq_class(tau[n]), "tau(" + std::to_string(n) + ") mismatch");
        return std::string("exact to q^200");
    }});

    checks.push_back({"hecke-matrix-weight24", [] {
        auto basis = miller_basis(24, 520);
        auto t2 = hecke_matrix(basis, 2);
        require(qm_trace(t2) == mpq_class(1080), "tr T_2 != 1080");
        mpq_class det = t2[0][0] * t2[1][1] - t2[0][1] * t2[1][0];
        require(det == mpq_class(540) * 540 - mpq_class(144) * 144169, "det T_2 mismatch");
        auto t3 = hecke_matrix(basis, 3), t6 = hecke_matrix(basis, 6);
        require(qm_equal(qm_mul(t2, t3), qm_mul(t3, t2)), "T_2 T_3 != T_3 T_2");
        require(qm_equal(qm_mul(t2, t3), t6), "T_2 T_3 != T_6");
        auto t4 = hecke_matrix(basis, 4);
        mpq_class p23{mpz_class(1) << 23};
        require(qm_equal(qm_sub(qm_mul(t2, t2), t4), qm_identity(2, p23)), "T_2^2 != T_4 + 2^23");
        return std::string("trace, det, commutation, composition exact");
    }});

    checks.push_back({"fundamental-domain-area", [&] {
        auto area = integrate_fd([](double, double) { return 1.0; }, 2);
        require(rel(area.value, kPi / 3.0) < 1e-10, "area != pi/3");
        return "rel err " + fmtg(rel(area.value, kPi / 3.0));
    }});

    checks.push_back({"special-function-anchors", [&] {
        require(rel(zeta(Cplx(2.0, 0.0)).real(), kPi * kPi / 6.0) < 1e-12, "zeta(2)");
        require(rel(zeta(Cplx(3.0, 0.0)).real(), 1.2020569031595943) < 1e-12, "zeta(3)");
        require(rel(zeta(Cplx(0.5, 0.0)).real(), -1.4603545088095868) < 1e-10, "zeta(1/2)");
        require(rel(bessel_k(Cplx(0.0, 0.0), 1.0).value.real(), 0.42102443824070834) < 1e-10,
                "K_0(1)");
        double kh = bessel_k(Cplx(0.5, 0.0), 1.3).value.real();
        require(rel(kh, bessel_k_half(1.3)) < 1e-10, "K_{1/2} closed form");
        return std::string("zeta and Bessel anchors hold");
    }});

    checks.push_back({"weight12-eigenvalues", [&] {
        auto eb = eigenbasis(12, 501);
        require(eb.dim() == 1, "dim S_12 != 1");
        require(rel(eb.forms[0].lam(2), -24.0 / std::pow(2.0, 5.5)) < 1e-12, "lambda(2)");
        require(rel(eb.forms[0].lam(3), 252.0 / std::pow(3.0, 5.5)) < 1e-12, "lambda(3)");
        return std::string("normalized tau values match");
    }});

    checks.push_back({"deligne-and-square-relation", [] {
        for (long k : {16, 24, 36}) {
            auto eb = eigenbasis(k, 501);
            for (const auto& f : eb.forms) {
                for (long p : primes_up_to(500))
                    require(std::abs(f.lam(p)) <= 2.0 + 1e-12, "Deligne bound k=" + std::to_string(k));
                require(hecke_square_residual(f) < 1e-9, "square relation k=" + std::to_string(k));
            }
        }
        return std::string("|lambda(p)| <= 2 and lambda(p)^2 - lambda(p^2) = 1");
    }});

    checks.push_back({"petersson-calibration-weight12", [&] {
        auto eb = eigenbasis(12);
        auto repq = petersson_calibrate(eb, 0, 2);
        require(repq.quadErr < 1e-6, "calibration quadrature error");
        auto n3 = inner_product(eb, 0, 0, 3);
        require(std::abs(n3.value - Cplx(1.0)) < 1e-6, "norm != 1 at finer level");
        return "norm deviation " + fmtg(std::abs(n3.value - Cplx(1.0)));
    }});

    checks.push_back({"rankin-selberg-weight12", [&] {
        auto eb = eigenbasis(12, 4000);
        calibrate_all(eb, 2);
        auto rs = rankin_selberg_check(eb, 0, 0, 4000, 2);
        require(rs.relDiff < 1e-3, "Eisenstein pairing vs Dirichlet series");
        return "rel diff " + fmtg(rs.relDiff);
    }});

    checks.push_back({"eisenstein-dual-route", [&] {
        SurfacePoint z{0.123, 1.1};
        double fourier = eval_eisenstein(z, Cplx(2.0, 0.0)).real();
        double cosets = eisenstein_coset_oracle(z, 2.0);
        require(rel(fourier, cosets) < 1e-5, "Fourier expansion vs coset sum");
        require(rel(eval_eisenstein_s2(z), fourier) < 1e-10, "s=2 fast path");
        double shifted = eval_eisenstein({z.x + 1.0, z.y}, Cplx(2.0, 0.0)).real();
        require(rel(shifted, fourier) < 1e-12, "translation invariance");
        double r2 = z.x * z.x + z.y * z.y;
        double inverted = eval_eisenstein({-z.x / r2, z.y / r2}, Cplx(2.0, 0.0)).real();
        require(rel(inverted, fourier) < 1e-9, "inversion invariance");
        return "dual route rel diff " + fmtg(rel(fourier, cosets));
    }});

    checks.push_back({"poincare-fourier-reconstruction", [&] {
        auto psi = make_test_function(1.0);
        SurfacePoint z{0.2, 1.3};
        // Bump mode decay is subgeometric (|P_10| ~ 1e-3), so the synthesis
        // needs a wide mode range before the tail clears the tolerance.
        Cplx sum = 0.0;
        for (long m = -64; m <= 64; ++m) sum += eval_incomplete_poincare(psi, m, z);
        double direct = 0.0;
        for (const auto& w : poincare_cosets(z, psi.yLo())) {
            // The mode sum builds the x-periodization, so reduce the coset
            // x into the window period around x0 before sampling psi.
            double xw = w.x - std::round(w.x - psi.x0);
            direct += psi(xw, w.y);
        }
        require(std::abs(sum - Cplx(direct)) < 1e-5 * std::max(1.0, direct), "mode sum vs coset sum");
        return "abs diff " + fmtg(std::abs(sum - Cplx(direct)));
    }});

    checks.push_back({"incomplete-eisenstein-contour", [] {
        auto w = make_probe_window();
        for (SurfacePoint z : {SurfacePoint{0.3, 1.2}, SurfacePoint{0.0, 2.5}}) {
            double direct = eval_incomplete_eisenstein(w, z);
            double contour = incomplete_eisenstein_contour(w, z);
            require(std::abs(direct - contour) < 1e-6 * std::max(1.0, std::abs(direct)),
                    "contour route at y=" + fmtg(z.y));
        }
        return std::string("vertical-line integral matches coset sum");
    }});

    checks.push_back({"poincare-unfolding-weight12", [&] {
        auto eb = eigenbasis(12);
        calibrate_all(eb, 2);
        auto psi = make_test_function(1.0);
        auto lhs = unfold_poincare_lhs(eb, 0, 0, psi, 1, 2);
        Cplx rhs = unfold_poincare_rhs(eb, 0, 0, psi, 1);
        require(rel_diff(lhs.value, rhs) < 1e-4, "geometric vs spectral side");
        return "rel diff " + fmtg(rel_diff(lhs.value, rhs));
    }});

    checks.push_back({"mellin-gamma-identity", [] {
        auto psi = make_test_function(1.0);
        auto mg = mellin_gamma_check(psi, 3, 1, 12);
        require(mg.relDiff < 1e-8, "Gamma-factor route");
        return "rel diff " + fmtg(mg.relDiff);
    }});

    checks.push_back({"critical-line-fourier-coefficients", [] {
        auto w = make_probe_window();
        auto fc = make_eis_fc(w);
        for (long ell : {0L, 1L}) {
            double direct = incomplete_eis_fc_direct(w, ell, 1.1).real();
            double contour = fc.aEll(ell, 1.1);
            require(std::abs(direct - contour) < 1e-5 * std::max(1.0, std::abs(direct)),
                    "mode " + std::to_string(ell));
        }
        return std::string("modes 0,1 at y=1.1 agree");
    }});

    checks.push_back({"probe-zero-mode-routes", [&] {
        auto eb = eigenbasis(12);
        calibrate_all(eb, 2);
        auto h = make_probe_window();
        auto fc = make_eis_fc(h);
        Cplx a = probe_mode(eb, 0, 0, h, h, 2.0, 0);
        Cplx b = probe_zero_mode_swapped(eb, 0, 0, fc, h, 2.0);
        require(rel_diff(a, b) < 1e-5, "swapped contour route");
        return "rel diff " + fmtg(rel_diff(a, b));
    }});

    checks.push_back({"fourth-moment-parseval", [&] {
        auto ebk = eigenbasis(12);
        auto eb2k = eigenbasis(24);
        calibrate_all(ebk, 2);
        calibrate_all(eb2k, 2);
        auto rep = l4_parseval(ebk, eb2k, 0, 2);
        require(rep.relDiff < 1e-3, "Parseval sum vs direct L4");
        for (std::size_t h = 1; h < rep.partial.size(); ++h)
            require(rep.partial[h] >= rep.partial[h - 1] - 1e-12, "partial sums not monotone");
        return "rel diff " + fmtg(rep.relDiff);
    }});

    checks.push_back({"exponent-optimizer", [&] {
        auto grc = optimize_exponent(preset_delta1("grc"));
        require(rel(grc.L.to_double(), 2.0 * std::sqrt(3.0) - 3.5) < 1e-12, "L at delta1 = 1/2");
        require(rel(grc.alphaStar.to_double(), 2.0 / std::sqrt(3.0) - 1.0) < 1e-12, "alpha*");
        auto st = optimize_exponent(preset_delta1("soundararajan-thorner"));
        double negL = -st.L.to_double();
        require(negL > 1.18e-41 && negL < 1.20e-41, "unconditional exponent window");
        auto grid = optimizer_grid_check(0.5, 1e-3);
        require(std::abs(grid.gridL - grid.closedL) < 1e-5, "grid vs closed form");
        require(grid.maxLambdaDev <= 1e-3 + 1e-12, "inner argmax drift");
        return std::string("closed form, series, and grid agree");
    }});

    checks.push_back({"mertens-normalization", [&] {
        for (double d : {1.0, -1.0}) {
            auto m = mertens_product(d, 1000000);
            require(m.relDiff < 0.03, "delta = " + fmtg(d));
        }
        return std::string("delta = 1 and -1 within 3% at x = 1e6");
    }});

    checks.push_back({"thread-determinism", [] {
        auto f = [](double x, double y) { return std::cos(2.0 * kPi * x) * std::exp(-y) + 1.0; };
        const char* old = std::getenv("HECKELAB_THREADS");
        std::string saved = old ? old : "";
        setenv("HECKELAB_THREADS", "1", 1);
        double a = integrate_fd(f, 2).value;
        setenv("HECKELAB_THREADS", "5", 1);
        double b = integrate_fd(f, 2).value;
        if (old)
            setenv("HECKELAB_THREADS", saved.c_str(), 1);
        else
            unsetenv("HECKELAB_THREADS");
        require(a == b, "results differ across thread counts");
        return std::string("bitwise identical across thread counts");
    }});

    checks.push_back({"mass-observable-weight24", [&] {
        auto eb = eigenbasis(24);
        calibrate_all(eb, 2);
        std::vector<Cplx> coeff{Cplx(1.0 / std::sqrt(2.0)), Cplx(0.0, 1.0 / std::sqrt(2.0))};
        auto rep = mass_observable(eb, coeff, make_test_function(1.0), 2);
        require(rep.relDiff < 1e-8, "direct vs bilinear");
        double ratio = rep.direct.real() / rep.queReference;
        require(ratio > 0.2 && ratio < 5.0, "mass far from the equidistribution reference");
        return "bilinear rel diff " + fmtg(rep.relDiff) + ", mass/reference " + fmtg(ratio);
    }});

    int failed = 0;
    Stopwatch total;
    for (auto& c : checks) {
        Stopwatch sw;
        try {
            std::string detail = c.fn();
            std::printf("PASS %-38s %7.2fs  %s\n", c.name.c_str(), sw.ms() / 1000.0,
                        detail.c_str());
        } catch (const std::exception& e) {
            ++failed;
            std::printf("FAIL %-38s %7.2fs  %s\n", c.name.c_str(), sw.ms() / 1000.0, e.what());
        }
        std::fflush(stdout);
    }
    std::printf("selftest: %zu/%zu passed in %.1fs\n", checks.size() - failed, checks.size(),
                total.ms() / 1000.0);
    return failed == 0 ? 0 : 1;
}

}  // namespace cli_detail

inline int run_cli(std::vector<std::string> args) {
    CLI::App app{"hecke eigenform workbench"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    cli_detail::BasisArgs ba;
    auto* basis = app.add_subcommand("basis", "echelonized integral basis of the cusp space");
    basis->add_option("--weight", ba.k, "modular weight")->required();
    basis->add_option("--trunc", ba.trunc, "q-expansion truncation");
    basis->add_option("--coeffs", ba.coeffs, "coefficients to emit per form");
    basis->add_option("--out", ba.out, "artifact path");

    cli_detail::EigenArgs ea;
    auto* eigen = app.add_subcommand("eigen", "Hecke eigenbasis with normalized eigenvalues");
    eigen->add_option("--weight", ea.k, "modular weight")->required();
    eigen->add_option("--nmax", ea.nmax, "eigenvalue table length");
    eigen->add_option("--trunc", ea.trunc, "q-expansion truncation");
    eigen->add_option("--out", ea.out, "artifact path");

    cli_detail::InnerArgs ia;
    auto* inner = app.add_subcommand("inner", "Petersson Gram matrix of the calibrated eigenbasis");
    inner->add_option("--weight", ia.k, "modular weight")->required();
    inner->add_option("--level", ia.level, "quadrature level for the Gram sweep");
    inner->add_option("--calib-level", ia.calibLevel, "quadrature level for calibration");
    inner->add_option("--ymax", ia.yMax, "quadrature height cutoff");
    inner->add_option("--tol", ia.tol, "orthonormality tolerance");
    inner->add_option("--out", ia.out, "artifact path");

    cli_detail::UnfoldArgs ua;
    auto* unfold = app.add_subcommand("unfold-check", "unfolding and Mellin identities");
    unfold->add_option("--weight", ua.k, "modular weight");
    unfold->add_option("--m", ua.mList, "comma list of Poincare shifts");
    unfold->add_option("--pair", ua.pair, "form indices i,j");
    unfold->add_option("--level", ua.level, "quadrature level");
    unfold->add_option("--mg", ua.mg, "Mellin check shift,index");
    unfold->add_option("--rs-nmax", ua.rsNmax, "Dirichlet series length; 0 skips the check");
    unfold->add_option("--rs-pair", ua.rsPair, "form indices for the series check");
    unfold->add_option("--psi", ua.psiPath, "window JSON path");
    unfold->add_option("--tol-poincare", ua.tolPoincare, "unfolding tolerance");
    unfold->add_option("--tol-mellin", ua.tolMellin, "Mellin identity tolerance");
    unfold->add_option("--tol-rs", ua.tolRs, "series check tolerance");
    unfold->add_option("--out", ua.out, "artifact path");

    cli_detail::MassArgs ga;
    auto* massq = app.add_subcommand("massq", "windowed mass of an eigenform combination");
    massq->add_option("--weight", ga.k, "modular weight")->required();
    massq->add_option("--coeff", ga.coeff, "comma list of real coefficients");
    massq->add_option("--psi", ga.psiPath, "window JSON path");
    massq->add_option("--window-scale", ga.M, "default window concentration");
    massq->add_option("--level", ga.level, "quadrature level");
    massq->add_option("--tol", ga.tol, "bilinear agreement tolerance");
    massq->add_option("--out", ga.out, "artifact path");

    cli_detail::L4Args la;
    auto* l4 = app.add_subcommand("l4", "fourth moment against the doubled-weight expansion");
    l4->add_option("--weight", la.k, "modular weight");
    l4->add_option("--level", la.level, "quadrature level");
    l4->add_option("--tol", la.tol, "Parseval tolerance");
    l4->add_option("--out", la.out, "artifact path");

    cli_detail::BoundsArgs oa;
    auto* bounds = app.add_subcommand("bounds", "decorrelation bound factors for one pair");
    bounds->add_option("--weight", oa.k, "modular weight")->required();
    bounds->add_option("--pair", oa.pair, "form indices i,j");
    bounds->add_option("--x", oa.x, "shifted convolution length");
    bounds->add_option("--m-list", oa.mList, "comma list of shifts");
    bounds->add_option("--delta1", oa.delta1, "zero-density exponent preset or value");
    bounds->add_option("--window-scale", oa.M, "envelope scale");
    bounds->add_option("--pmax", oa.pMax, "prime product cutoff; 0 means the weight");
    bounds->add_option("--psi", oa.psiPath, "window JSON path for the observed pairing");
    bounds->add_option("--level", oa.level, "quadrature level");
    bounds->add_option("--out", oa.out, "artifact path");

    cli_detail::OptimizeArgs pa;
    auto* optimize = app.add_subcommand("optimize", "min-max exponent from the zero-density input");
    optimize->add_option("--delta1", pa.delta1, "preset or decimal value in [0, 1]");
    optimize->add_option("--bits", pa.bits, "working precision in bits");
    optimize->add_option("--grid-step", pa.gridStep, "brute-force grid resolution");
    optimize->add_option("--out", pa.out, "artifact path");

    cli_detail::MertensArgs ma;
    auto* mertens = app.add_subcommand("mertens", "prime product normalization check");
    mertens->add_option("--delta", ma.delta, "exponent in the Euler factors");
    mertens->add_option("--x", ma.x, "prime cutoff");
    mertens->add_option("--tol", ma.tol, "relative tolerance against the limit");
    mertens->add_option("--out", ma.out, "artifact path");

    cli_detail::ScanArgs sa;
    auto* scan = app.add_subcommand("decor-scan", "decorrelation observable across weights");
    scan->add_option("--weights", sa.weights, "weight range a:b:step or comma list");
    scan->add_option("--psi", sa.psiPath, "window JSON path");
    scan->add_option("--window-scale", sa.M, "default window concentration");
    scan->add_option("--level", sa.level, "quadrature level");
    scan->add_option("--delta1", sa.delta1, "preset for the bound factors");
    scan->add_option("--pmax", sa.pMax, "prime product cutoff; 0 means the weight");
    scan->add_option("--out", sa.out, "CSV path");
    scan->add_option("--json-out", sa.jsonOut, "artifact path");

    auto* selftest = app.add_subcommand("selftest", "run the built-in verification checks");

    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("heckelab");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*basis) return cli_detail::run_basis(ba);
        if (*eigen) return cli_detail::run_eigen(ea);
        if (*inner) return cli_detail::run_inner(ia);
        if (*unfold) return cli_detail::run_unfold(ua);
        if (*massq) return cli_detail::run_massq(ga);
        if (*l4) return cli_detail::run_l4(la);
        if (*bounds) return cli_detail::run_bounds(oa);
        if (*optimize) return cli_detail::run_optimize(pa);
        if (*mertens) return cli_detail::run_mertens(ma);
        if (*scan) return cli_detail::run_scan(sa);
        if (*selftest) return cli_detail::run_selftest();
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}

}  // namespace hecke
