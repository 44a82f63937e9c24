#pragma once

#include <chrono>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

#include "json.hpp"

namespace hecke {

using Json = nlohmann::ordered_json;

inline constexpr const char* kVersion = "1.0.0";

// Floats are serialized with 17 significant digits so round trips are exact.
inline std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// Run descriptor attached to every artifact. Timing lives in a separate
// object so that primary artifacts stay byte-identical across runs.
struct RunManifest {
    std::string command;
    Json parameters = Json::object();
    Json cutoffs = Json::object();
    Json tolerances = Json::object();
    double wallTimeMs = 0.0;

    Json primary() const {
        Json m;
        m["command"] = command;
        m["parameters"] = parameters;
        m["cutoffs"] = cutoffs;
        m["tolerances"] = tolerances;
        m["versions"] = Json{{"heckelab", kVersion}};
        m["seedNote"] = "deterministic; no random number generator is used";
        return m;
    }
    Json timing() const { return Json{{"wallTimeMs", wallTimeMs}}; }
};

class Stopwatch {
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();

public:
    double ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_)
            .count();
    }
};

inline void write_text_file(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << body;
    if (!out) throw std::runtime_error("short write: " + path);
}

}  // namespace hecke
