#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "hecke/cli.hpp"

using namespace hecke;

namespace {

struct CliRun {
    int code = -1;
    std::string out;
    std::string err;
};

CliRun run(std::vector<std::string> args) {
    std::ostringstream obuf, ebuf;
    auto* oldOut = std::cout.rdbuf(obuf.rdbuf());
    auto* oldErr = std::cerr.rdbuf(ebuf.rdbuf());
    CliRun r;
    r.code = run_cli(std::move(args));
    std::cout.rdbuf(oldOut);
    std::cerr.rdbuf(oldErr);
    r.out = obuf.str();
    r.err = ebuf.str();
    return r;
}

Json results_of(const CliRun& r) {
    Json j = Json::parse(r.out);
    REQUIRE(j.contains("manifest"));
    REQUIRE(j.contains("results"));
    return j;
}

double num(const Json& j) { return std::stod(j.get<std::string>()); }

}  // namespace

TEST_CASE("optimize artifact carries both exponent routes") {
    auto r = run({"optimize", "--delta1", "grc"});
    REQUIRE(r.code == 0);
    Json j = results_of(r);
    CHECK(j["manifest"]["command"] == "optimize");
    const auto& opt = j["results"]["optimizer"];
    CHECK(opt["route"] == "closed-form");
    CHECK(opt["precisionBits"] == 256);
    CHECK(opt["L"].get<double>() == Catch::Approx(2.0 * std::sqrt(3.0) - 3.5).epsilon(1e-13));
    CHECK(opt["alphaStar"].get<double>() == Catch::Approx(0.15470053837925152).epsilon(1e-13));
    CHECK(j["results"]["pass"].get<bool>());

    auto st = run({"optimize", "--delta1", "soundararajan-thorner"});
    REQUIRE(st.code == 0);
    Json js = results_of(st);
    CHECK(js["results"]["optimizer"]["route"] == "series");
    double L = js["results"]["optimizer"]["L"].get<double>();
    CHECK(-L > 1.18e-41);
    CHECK(-L < 1.20e-41);
}

TEST_CASE("optimize rejects a foreign precision request") {
    auto r = run({"optimize", "--bits", "128"});
    CHECK(r.code == 2);
}

TEST_CASE("malformed invocations exit with a usage error") {
    CHECK(run({"nosuchcommand"}).code == 2);
    CHECK(run({}).code == 2);
    CHECK(run({"basis"}).code == 2);
    CHECK(run({"eigen", "--weight", "13"}).code == 2);
    CHECK(run({"optimize", "--delta1", "junkvalue"}).code == 2);
}

TEST_CASE("artifacts are byte identical across repeated runs") {
    auto a = run({"eigen", "--weight", "12", "--nmax", "8"});
    auto b = run({"eigen", "--weight", "12", "--nmax", "8"});
    REQUIRE(a.code == 0);
    REQUIRE(b.code == 0);
    CHECK(a.out == b.out);
    // Timing goes to stderr only, so the artifact carries none of it.
    CHECK(a.out.find("wallTimeMs") == std::string::npos);
    CHECK(a.err.find("wallTimeMs") != std::string::npos);
}

TEST_CASE("eigen artifact exposes the normalized eigenvalue table") {
    auto r = run({"eigen", "--weight", "12", "--nmax", "10"});
    REQUIRE(r.code == 0);
    Json j = results_of(r);
    CHECK(j["results"]["k"] == 12);
    CHECK(j["results"]["dim"] == 1);
    const auto& lam = j["results"]["forms"][0]["lambda"];
    REQUIRE(lam.size() == 11);
    CHECK(num(lam[1]) == Catch::Approx(1.0));
    CHECK(num(lam[2]) == Catch::Approx(-0.53033008588991064).epsilon(1e-13));
    CHECK(num(lam[4]) == Catch::Approx(num(lam[2]) * num(lam[2]) - 1.0).epsilon(1e-12));
    CHECK(num(lam[6]) == Catch::Approx(num(lam[2]) * num(lam[3])).epsilon(1e-12));
}

TEST_CASE("out file duplicates stdout") {
    std::string path = "cli_test_artifact.json";
    auto r = run({"optimize", "--delta1", "0.25", "--out", path});
    REQUIRE(r.code == 0);
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream body;
    body << in.rdbuf();
    CHECK(body.str() == r.out);
    in.close();
    std::remove(path.c_str());
}

TEST_CASE("mertens run passes against its limit") {
    auto r = run({"mertens", "--delta", "1", "--x", "1000000"});
    REQUIRE(r.code == 0);
    Json j = results_of(r);
    CHECK(j["results"]["pass"].get<bool>());
    CHECK(num(j["results"]["relDiff"]) < 0.02);
}

TEST_CASE("gram matrix run certifies orthonormality at weight 24") {
    auto r = run({"inner", "--weight", "24", "--level", "2", "--calib-level", "2"});
    REQUIRE(r.code == 0);
    Json j = results_of(r);
    CHECK(j["results"]["pass"].get<bool>());
    CHECK(num(j["results"]["maxOffDiag"]) < 1e-5);
    CHECK(num(j["results"]["diagDeviation"]) < 1e-5);
    REQUIRE(j["results"]["gram"].size() == 2);
}

TEST_CASE("mass run reports the bilinear agreement and reference") {
    auto r = run({"massq", "--weight", "12"});
    REQUIRE(r.code == 0);
    Json j = results_of(r);
    CHECK(j["results"]["pass"].get<bool>());
    CHECK(num(j["results"]["relDiff"]) < 1e-5);
    CHECK(num(j["results"]["queReference"]) > 0.0);
}

TEST_CASE("basis artifact lists the echelon q-expansions") {
    auto r = run({"basis", "--weight", "12", "--coeffs", "12"});
    REQUIRE(r.code == 0);
    Json j = results_of(r);
    CHECK(j["results"]["dim"] == 1);
    CHECK(r.out.find("-24") != std::string::npos);
    CHECK(r.out.find("252") != std::string::npos);
}

TEST_CASE("unfold-check run verifies the pairing identities") {
    auto r = run({"unfold-check", "--weight", "12", "--m", "1", "--pair", "0,0", "--level", "2",
                  "--mg", "3,1"});
    REQUIRE(r.code == 0);
    Json j = results_of(r);
    CHECK(j["results"]["pass"].get<bool>());
    CHECK(num(j["results"]["mellinGamma"]["relDiff"]) < 1e-8);
    const auto& u = j["results"]["unfold"][0];
    CHECK(u["pass"].get<bool>());
    CHECK(num(u["relDiffStrip"]) < 1e-4);
    CHECK(num(u["relDiffCoset"]) < 1e-4);
}

TEST_CASE("decor-scan emits a csv and a slope report") {
    std::string csv = "cli_test_scan.csv";
    auto r = run({"decor-scan", "--weights", "12", "--level", "2", "--out", csv});
    REQUIRE(r.code == 0);
    Json j = results_of(r);
    CHECK(j["results"]["rows"] == 1);
    CHECK(j["results"]["finite"].get<bool>());
    // A single weight of dimension one has no off-diagonal pair to fit.
    CHECK(j["results"]["offDiagonalFit"].is_null());

    std::ifstream in(csv);
    REQUIRE(in.good());
    std::string header, row, extra;
    std::getline(in, header);
    std::getline(in, row);
    bool more = static_cast<bool>(std::getline(in, extra));
    CHECK(header == "k,i,j,reInner,imInner,absInner,soundProduct,holoProduct,quadErr");
    CHECK(row.substr(0, 6) == "12,0,0");
    CHECK_FALSE(more);
    in.close();
    std::remove(csv.c_str());
}
