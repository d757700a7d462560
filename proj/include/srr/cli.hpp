#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace srr::cli {

enum ExitCode : int {
    kOk = 0,
    kRuntimeError = 1,
    kUsageError = 2,  // also used for calibration bracket failures
    kConjectureViolated = 3,
    kCheckFailed = 4,
    kBadInput = 5,
};

/// Environment variable consulted for the default output directory.
inline constexpr const char* kOutDirEnv = "SRR_OUT_DIR";

/// Knobs shared by the calibrate / verify / simulate commands.
struct ExperimentConfig {
    double gamma = 5.0;
    std::size_t n_quad = 501;
    std::size_t grid_n = 2001;
    double r_min = 2e-3;
    std::size_t lambda_count = 100;
    double lambda_max = 10.0;
    double dt = 1e-3;
    std::size_t n_paths = 100000;
    std::uint64_t seed = 20240601;
    double t_max = 0.0;
    std::filesystem::path out_dir = ".";

    /// Throws std::invalid_argument naming the first offending knob.
    void validate() const;

    static ExperimentConfig paper_fig1();
    static ExperimentConfig paper_fig2();
};

/// Entry point shared by the `srr` executable and the tests.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace srr::cli
