#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "lyz/grid.hpp"

namespace lyz::cli {

// Exit codes: 0 success, 2 usage error, 3 validation error,
// 4 numerical error (truncation/divergence), 5 I/O error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitValidation = 3;
inline constexpr int kExitNumerical = 4;
inline constexpr int kExitIo = 5;

enum class Experiment {
    profile,
    gibbs,
    grid,
    zeros,
    fit,
    sensitivity,
    heating,
    detuning,
    noisy_grid,
    eta_opt,
    reproduce,
};

/// Resolved run configuration. The CLI boundary is where physical units live:
/// frequencies are ordinary kHz and are multiplied by 2*pi internally; times
/// are microseconds. Everything downstream is dimensionless or rad/s.
struct RunConfig {
    Experiment experiment = Experiment::grid;

    // physical
    double omega_rabi_khz = 50.0;
    double omega_m_khz = 600.0;
    double gamma = 0.0;  // quanta/s
    double sigma_delta_khz = 0.0;
    double detuning_khz = 0.0;

    // dimensionless
    double beta_omega = 0.5;
    double eta = 0.47;
    int n_max = 63;
    int n_components = 3;
    double h_r = 7.0;
    bool truncated = false;

    AxisSpec h_r_range{0.0, 15.0, 151};
    AxisSpec beta_h_i_range{0.0, 40.0, 401};
    AxisSpec t_us_range{0.0, 200.0, 81};
    double eta_lo = 0.3;
    double eta_hi = 0.6;
    int vary_a = 1;
    int vary_b = 2;
    double vary_delta = 0.8;
    int vary_steps = 33;

    // run
    std::filesystem::path out_dir = "out";
    std::uint64_t seed = 1;
    int n_runs = 100;
    int n_starts = 32;
    double zero_tol = 1e-8;
    std::string reproduce_target;
    std::string config_file;
    bool gnuplot_hints = false;

    double omega_rabi() const;  // rad/s
    double sigma_delta() const;
    double detuning() const;

    // resolved key=value lines, defaults marked, for the log and manifest
    std::vector<std::pair<std::string, std::string>> echo;
};

/// Parse argv-style arguments (without the program name). Flags override
/// config-file values; unknown keys are errors. Throws CLI::Error on usage
/// problems and std::invalid_argument on semantic validation failures.
RunConfig parse_config(const std::vector<std::string>& args);

struct RunOutcome {
    std::filesystem::path out_dir;
    std::filesystem::path manifest_path;
    // file name -> sha256, in write order, manifest excluded
    std::vector<std::pair<std::string, std::string>> output_hashes;
};

/// Dispatch to the owning module and write the experiment's files plus
/// manifest.json. Identical config + seed reproduce identical content hashes.
RunOutcome run_experiment(const RunConfig& cfg);

/// Full command-line entry: parse, run, map failures to exit codes and a
/// machine-readable error JSON on stderr.
int cli_main(const std::vector<std::string>& args);

}  // namespace lyz::cli
