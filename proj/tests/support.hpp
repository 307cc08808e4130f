#pragma once

#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <cstdlib>
#include <cmath>
#include <filesystem>
#include <string>

#include "langsim/data.hpp"
#include "langsim/factors.hpp"

namespace testing_support {

namespace fs = std::filesystem;

inline fs::path source_dir() { return LANGSIM_SOURCE_DIR; }
inline fs::path data_dir() { return source_dir() / "data"; }
inline fs::path cli_path() { return LANGSIM_CLI; }

/// Fresh empty directory under the system temp dir.
inline fs::path scratch_dir(const std::string& name) {
    static std::atomic<int> counter{0};
    const fs::path dir = fs::temp_directory_path() / ("langsim_test_" + name + "_" + std::to_string(::getpid()) + "_" +
                                                      std::to_string(counter++));
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

inline const langsim::DataBundle& shipped_bundle() {
    static const langsim::DataBundle b = langsim::load_bundle(langsim::FixturePaths::in_directory(data_dir()));
    return b;
}

inline const langsim::FactorTensor& shipped_tensor() {
    static const langsim::FactorTensor x = langsim::build_factor_tensor(shipped_bundle());
    return x;
}

inline int zone(const std::string& name) {
    auto id = shipped_bundle().catalog().find(name);
    if (!id) throw std::runtime_error("no zone " + name);
    return *id;
}

/// |observed - expected| within k binomial standard deviations.
inline bool within_binomial(double successes, double trials, double p, double k = 3.0) {
    const double sd = std::sqrt(trials * p * (1.0 - p));
    return std::abs(successes - trials * p) <= k * sd + 1e-9;
}

/// Runs a shell command, returns its exit status.
inline int run_command(const std::string& cmd) {
    const int raw = std::system(cmd.c_str());
    if (raw == -1) return -1;
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : 128;
}

}  // namespace testing_support
