#include "lyz/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "lyz/coupling.hpp"
#include "lyz/dynamics.hpp"
#include "lyz/ensemble.hpp"
#include "lyz/errors.hpp"
#include "lyz/io.hpp"
#include "lyz/noise.hpp"
#include "lyz/thermal.hpp"
#include "lyz/version.hpp"

namespace lyz::cli {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double khz_to_rad(double khz) { return kTwoPi * khz * 1e3; }

AxisSpec parse_axis(const std::string& text, const std::string& flag) {
    AxisSpec axis;
    char c1 = 0, c2 = 0;
    std::istringstream in(text);
    if (!(in >> axis.lo >> c1 >> axis.hi >> c2 >> axis.count) || c1 != ':' || c2 != ':' ||
        !(in >> std::ws).eof() || axis.count < 1)
        throw std::invalid_argument(flag + ": expected lo:hi:count, got '" + text + "'");
    return axis;
}

std::pair<double, double> parse_interval(const std::string& text, const std::string& flag) {
    double lo = 0.0, hi = 0.0;
    char c1 = 0;
    std::istringstream in(text);
    if (!(in >> lo >> c1 >> hi) || c1 != ':' || !(in >> std::ws).eof())
        throw std::invalid_argument(flag + ": expected lo:hi, got '" + text + "'");
    return {lo, hi};
}

struct RangeStrings {
    std::string h_r, beta_h_i, t_us, eta_interval;
};

// Options are grouped by which experiments consume them; the masks keep the
// per-subcommand help honest.
enum OptGroup : unsigned {
    kThermal = 1u << 0,   // beta-omega, hr (scalar)
    kProfile = 1u << 1,   // eta, nmax
    kDrive = 1u << 2,     // omega-rabi-khz, detuning-khz
    kHrRange = 1u << 3,
    kBhiRange = 1u << 4,
    kTimeRange = 1u << 5,
    kFit = 1u << 6,       // components, starts
    kNoise = 1u << 7,     // gamma, sigma-khz, runs
    kZeros = 1u << 8,     // tol
    kVary = 1u << 9,      // sensitivity grid controls
    kEtaOpt = 1u << 10,   // range
};

// Config files are expanded into --key=value tokens placed before the
// command-line flags (with take-last semantics the flags then override);
// unknown keys fail exactly as unknown flags do.
std::vector<std::string> config_tokens(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CLI::FileError::Missing(path);
    std::vector<std::string> tokens;
    std::string line;
    int lineno = 0;
    auto trim = [](std::string s) {
        const auto begin = s.find_first_not_of(" \t\r");
        const auto end = s.find_last_not_of(" \t\r");
        return begin == std::string::npos ? std::string{} : s.substr(begin, end - begin + 1);
    };
    while (std::getline(in, line)) {
        ++lineno;
        const std::string entry = trim(line);
        if (entry.empty() || entry[0] == '#' || entry[0] == ';') continue;
        const auto eq = entry.find('=');
        if (eq == std::string::npos)
            throw CLI::FileError(path + ":" + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(entry.substr(0, eq));
        std::string value = trim(entry.substr(eq + 1));
        if (value.size() >= 2 && ((value.front() == '"' && value.back() == '"') ||
                                  (value.front() == '\'' && value.back() == '\'')))
            value = value.substr(1, value.size() - 2);
        if (key.empty())
            throw CLI::FileError(path + ":" + std::to_string(lineno) + ": empty key");
        if (key == "config")
            throw CLI::FileError(path + ":" + std::to_string(lineno) +
                                 ": nested config files are not supported");
        tokens.push_back("--" + key + "=" + value);
    }
    return tokens;
}

void add_options(CLI::App* cmd, RunConfig& cfg, RangeStrings& ranges, unsigned groups) {
    cmd->option_defaults()->always_capture_default();
    cmd->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    cmd->add_option("--config", cfg.config_file, "flat key=value file; flags override it");
    cmd->add_option("--out", cfg.out_dir, "output directory (under LYZ_OUTPUT_ROOT if relative)");
    cmd->add_option("--seed", cfg.seed, "seed for every stochastic component");
    cmd->add_option("--omega-m-khz", cfg.omega_m_khz, "trap frequency omega_m / 2pi in kHz")
        ->check(CLI::PositiveNumber);
    cmd->add_flag("--gnuplot-hints", cfg.gnuplot_hints, "also write a column-semantics note");
    if (groups & kThermal) {
        cmd->add_option("--beta-omega", cfg.beta_omega, "dimensionless inverse temperature")
            ->check(CLI::PositiveNumber);
        // --hr is the scalar field on single-state experiments and an axis
        // lo:hi:count on grid-shaped ones
        if (!(groups & kHrRange))
            cmd->add_option("--hr", cfg.h_r, "dimensionless real field h_R/omega_m");
    }
    if (groups & kProfile) {
        cmd->add_option("--eta", cfg.eta, "Lamb-Dicke parameter")->check(CLI::NonNegativeNumber);
        cmd->add_option("--nmax", cfg.n_max, "Fock truncation")->check(CLI::NonNegativeNumber);
        cmd->add_flag("--truncated", cfg.truncated,
                      "treat nmax as an intentional support cut (skip the tail gate)");
    }
    if (groups & kDrive) {
        cmd->add_option("--omega-rabi-khz", cfg.omega_rabi_khz, "carrier Rabi frequency in kHz")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--detuning-khz", cfg.detuning_khz, "static detuning in kHz");
    }
    if (groups & kHrRange) cmd->add_option("--hr", ranges.h_r, "h_R/omega_m axis lo:hi:count");
    if (groups & kBhiRange)
        cmd->add_option("--bhi", ranges.beta_h_i, "beta*h_I axis lo:hi:count");
    if (groups & kTimeRange)
        cmd->add_option("--t-us", ranges.t_us, "time window in microseconds lo:hi:count");
    if (groups & kFit) {
        cmd->add_option("--components", cfg.n_components, "coherent components N")
            ->check(CLI::Range(1, 8));
        cmd->add_option("--starts", cfg.n_starts, "optimizer multi-starts")
            ->check(CLI::PositiveNumber);
    }
    if (groups & kNoise) {
        cmd->add_option("--gamma", cfg.gamma, "heating rate in quanta/s")
            ->check(CLI::NonNegativeNumber);
        cmd->add_option("--sigma-khz", cfg.sigma_delta_khz, "shot-to-shot detuning sigma in kHz")
            ->check(CLI::NonNegativeNumber);
        cmd->add_option("--runs", cfg.n_runs, "Monte Carlo run count")->check(CLI::PositiveNumber);
    }
    if (groups & kZeros)
        cmd->add_option("--tol", cfg.zero_tol, "zero residual tolerance")
            ->check(CLI::PositiveNumber);
    if (groups & kVary) {
        cmd->add_option("--vary-a", cfg.vary_a, "first component index to vary");
        cmd->add_option("--vary-b", cfg.vary_b, "second component index to vary");
        cmd->add_option("--vary-delta", cfg.vary_delta, "half-width of the displacement box")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--vary-steps", cfg.vary_steps, "grid points per axis")
            ->check(CLI::Range(2, 1001));
    }
    if (groups & kEtaOpt) {
        cmd->add_option("--range", ranges.eta_interval, "search interval lo:hi");
        cmd->add_option("--nmax", cfg.n_max, "largest Fock index in the objective")
            ->check(CLI::PositiveNumber);
    }
}

void collect_echo(const CLI::App* cmd, RunConfig& cfg) {
    for (const CLI::Option* opt : cmd->get_options()) {
        const std::string name = opt->get_name();
        if (name == "--help" || name == "--config") continue;
        std::string value;
        if (opt->count() > 0) {
            value = opt->results().back();  // take-last is the effective value
        } else {
            value = opt->get_default_str() + " (default)";
        }
        cfg.echo.emplace_back(name, value);
    }
}

}  // namespace

double RunConfig::omega_rabi() const { return khz_to_rad(omega_rabi_khz); }
double RunConfig::sigma_delta() const { return khz_to_rad(sigma_delta_khz); }
double RunConfig::detuning() const { return khz_to_rad(detuning_khz); }

RunConfig parse_config(const std::vector<std::string>& args) {
    RunConfig cfg;
    RangeStrings ranges;
    CLI::App app{"Lee-Yang zeros of a spin-probed trapped-ion phonon mode"};
    app.require_subcommand(1);

    struct SubSpec {
        Experiment experiment;
        const char* name;
        const char* desc;
        unsigned groups;
    };
    const SubSpec subs[] = {
        {Experiment::profile, "profile", "coupling profile xi_n", kProfile},
        {Experiment::gibbs, "gibbs", "Gibbs distribution and Z0", kThermal | kProfile},
        {Experiment::grid, "grid", "partition function over a complex-field rectangle",
         kThermal | kProfile | kHrRange | kBhiRange},
        {Experiment::zeros, "zeros", "locate partition-function zeros in (h_r, t)",
         kThermal | kProfile | kDrive | kHrRange | kTimeRange | kZeros},
        {Experiment::fit, "fit", "fit a coherent ensemble to the Gibbs distribution",
         kThermal | kProfile | kFit},
        {Experiment::sensitivity, "sensitivity", "fidelity under displacement perturbations",
         kThermal | kProfile | kFit | kVary},
        {Experiment::heating, "heating", "partition-function deviance under heating",
         kThermal | kProfile | kDrive | kTimeRange | kNoise},
        {Experiment::detuning, "detuning", "shot-to-shot detuning average",
         kThermal | kProfile | kDrive | kTimeRange | kNoise},
        {Experiment::noisy_grid, "noisy-grid", "partition function with heating and detuning",
         kThermal | kProfile | kDrive | kHrRange | kTimeRange | kNoise},
        {Experiment::eta_opt, "eta-opt", "optimize eta for detuning robustness", kEtaOpt},
        {Experiment::reproduce, "reproduce", "regenerate a named dataset (fig1 fig2 fig4 figT fig6)",
         kDrive | kFit | kNoise},
    };
    for (const SubSpec& spec : subs) {
        CLI::App* cmd = app.add_subcommand(spec.name, spec.desc);
        add_options(cmd, cfg, ranges, spec.groups);
        if (spec.experiment == Experiment::reproduce)
            cmd->add_option("target", cfg.reproduce_target, "fig1, fig2, fig4, figT or fig6")
                ->required();
    }

    // expand a config file, if any, right after the subcommand token
    std::vector<std::string> expanded = args;
    std::string config_path;
    for (std::size_t i = 0; i < expanded.size(); ++i) {
        if (expanded[i] == "--config" && i + 1 < expanded.size()) config_path = expanded[i + 1];
        else if (expanded[i].rfind("--config=", 0) == 0) config_path = expanded[i].substr(9);
    }
    if (!config_path.empty() && !expanded.empty()) {
        const std::vector<std::string> tokens = config_tokens(config_path);
        expanded.insert(expanded.begin() + 1, tokens.begin(), tokens.end());
    }

    std::vector<const char*> argv{"lyz"};
    for (const std::string& s : expanded) argv.push_back(s.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        std::cout << app.help();
        throw;
    } catch (const CLI::CallForAllHelp&) {
        std::cout << app.help("", CLI::AppFormatMode::All);
        throw;
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help();
        throw;
    }

    const SubSpec* active = nullptr;
    for (const SubSpec& spec : subs)
        if (app.get_subcommand(spec.name)->parsed()) active = &spec;
    cfg.experiment = active->experiment;
    collect_echo(app.get_subcommand(active->name), cfg);

    if (!ranges.h_r.empty()) cfg.h_r_range = parse_axis(ranges.h_r, "--hr");
    if (!ranges.beta_h_i.empty()) cfg.beta_h_i_range = parse_axis(ranges.beta_h_i, "--bhi");
    if (!ranges.t_us.empty()) cfg.t_us_range = parse_axis(ranges.t_us, "--t-us");
    if (!ranges.eta_interval.empty())
        std::tie(cfg.eta_lo, cfg.eta_hi) = parse_interval(ranges.eta_interval, "--range");
    if (cfg.experiment == Experiment::reproduce) {
        static const char* known[] = {"fig1", "fig2", "fig4", "figT", "fig6"};
        bool ok = false;
        for (const char* k : known) ok = ok || cfg.reproduce_target == k;
        if (!ok)
            throw std::invalid_argument("reproduce: unknown target '" + cfg.reproduce_target +
                                        "' (expected fig1, fig2, fig4, figT or fig6)");
    }
    return cfg;
}

namespace {

struct OutputWriter {
    std::filesystem::path dir;
    std::vector<std::pair<std::string, std::string>> hashes;

    void add(const std::string& name, std::string_view content) {
        io::write_file_atomic(dir / name, content);
        hashes.emplace_back(name, io::sha256_hex(content));
    }
};

std::filesystem::path resolve_out_dir(const std::filesystem::path& requested) {
    std::filesystem::path dir = requested;
    if (dir.is_relative())
        if (const char* root = std::getenv("LYZ_OUTPUT_ROOT")) dir = std::filesystem::path(root) / dir;
    std::filesystem::create_directories(dir);
    return dir;
}

std::vector<double> microseconds_to_seconds(const std::vector<double>& us) {
    std::vector<double> s(us.size());
    for (std::size_t i = 0; i < us.size(); ++i) s[i] = us[i] * 1e-6;
    return s;
}

DriveParams drive_of(const RunConfig& cfg) { return {cfg.omega_rabi(), cfg.detuning()}; }

ZeroSearchRegion region_of(const RunConfig& cfg) {
    return {cfg.h_r_range.lo, cfg.h_r_range.hi, cfg.t_us_range.lo * 1e-6, cfg.t_us_range.hi * 1e-6};
}

const char* kGnuplotHints =
    "Column semantics of the emitted files\n"
    "\n"
    "*.grid.csv / grid.csv / noisy_grid.csv : h_r, beta_h_i, re_z, im_z, abs_z\n"
    "  one row per grid node; plot abs_z over (h_r, beta_h_i) with pm3d map.\n"
    "  For noisy grids beta_h_i = omega_rabi * t; the time axis is in the JSON sidecar.\n"
    "traj*.csv / detuning_avg.csv : t_seconds, sigma_z, sigma_y\n"
    "  probe-spin components; sqrt(sigma_z^2+sigma_y^2) is the coherence magnitude.\n"
    "*deviance*.csv : t_seconds, re_dz, im_dz, abs_dz\n"
    "  complex partition-function deviance against the noiseless run.\n"
    "gibbs.csv / dist*.csv : n, p   (Fock populations)\n"
    "profile*.csv : n, xi           (dimensionless couplings)\n"
    "fid_sweep*.csv : h_r, fid_n2, fid_n3, max_alpha_n3\n"
    "fid_bw*.csv : h_r, fid_n3, max_alpha_n3\n"
    "sensitivity*.csv : alpha_a, alpha_b, fidelity\n"
    "zeros.json : [{h_r, t_seconds, beta_h_i, residual, converged}]\n";

void run_profile(const RunConfig& cfg, OutputWriter& w) {
    w.add("profile.csv", io::profile_csv(coupling_profile(cfg.eta, cfg.n_max)));
}

void run_gibbs(const RunConfig& cfg, OutputWriter& w) {
    ThermalParams params{cfg.beta_omega, cfg.h_r, coupling_profile(cfg.eta, cfg.n_max),
                         cfg.truncated};
    const GibbsState state = gibbs_distribution(params);
    w.add("gibbs.csv", io::fock_csv(state.dist));
    nlohmann::json j{{"beta_omega", cfg.beta_omega}, {"h_r", cfg.h_r},       {"eta", cfg.eta},
                     {"n_max", cfg.n_max},           {"z0", state.z0},       {"log_z0", state.log_z0},
                     {"truncated", cfg.truncated},   {"version", kVersion}};
    w.add("gibbs.json", j.dump(2) + "\n");
}

void run_grid(const RunConfig& cfg, OutputWriter& w) {
    const ComplexFieldGrid grid = partition_grid(cfg.beta_omega, coupling_profile(cfg.eta, cfg.n_max),
                                                 cfg.h_r_range, cfg.beta_h_i_range, cfg.truncated);
    w.add("grid.csv", io::grid_csv(grid));
    w.add("grid.json", io::grid_meta_json(grid));
}

void run_zeros(const RunConfig& cfg, OutputWriter& w) {
    const auto zeros = find_zeros(cfg.beta_omega, coupling_profile(cfg.eta, cfg.n_max),
                                  drive_of(cfg), region_of(cfg), cfg.h_r_range.count,
                                  cfg.t_us_range.count, cfg.zero_tol, cfg.truncated);
    w.add("zeros.json", io::zeros_json(zeros));
}

FitResult fit_for(const RunConfig& cfg, double beta_omega, double h_r, int n_max, int n_comp) {
    ThermalParams params{beta_omega, h_r, coupling_profile(cfg.eta, n_max), cfg.truncated};
    const FockDistribution target = gibbs_distribution(params).dist;
    FitSettings settings;
    settings.n_starts = cfg.n_starts;
    return fit_ensemble(target, n_comp, settings, cfg.seed);
}

void run_fit(const RunConfig& cfg, OutputWriter& w) {
    const FitResult fit = fit_for(cfg, cfg.beta_omega, cfg.h_r, cfg.n_max, cfg.n_components);
    w.add("ensemble.json",
          io::ensemble_json(fit, cfg.beta_omega, cfg.h_r, cfg.eta, cfg.n_max, cfg.seed));
}

void run_sensitivity(const RunConfig& cfg, OutputWriter& w) {
    ThermalParams params{cfg.beta_omega, cfg.h_r, coupling_profile(cfg.eta, cfg.n_max),
                         cfg.truncated};
    const FockDistribution target = gibbs_distribution(params).dist;
    FitSettings settings;
    settings.n_starts = cfg.n_starts;
    const FitResult fit = fit_ensemble(target, cfg.n_components, settings, cfg.seed);
    const double a0 = fit.ensemble.alphas.at(static_cast<std::size_t>(cfg.vary_a));
    const double b0 = fit.ensemble.alphas.at(static_cast<std::size_t>(cfg.vary_b));
    const AxisSpec axis_a{std::max(0.0, a0 - cfg.vary_delta), a0 + cfg.vary_delta, cfg.vary_steps};
    const AxisSpec axis_b{std::max(0.0, b0 - cfg.vary_delta), b0 + cfg.vary_delta, cfg.vary_steps};
    const auto fid = fidelity_sensitivity(target, fit.ensemble, cfg.vary_a, cfg.vary_b, axis_a,
                                          axis_b);
    w.add("ensemble.json",
          io::ensemble_json(fit, cfg.beta_omega, cfg.h_r, cfg.eta, cfg.n_max, cfg.seed));
    w.add("sensitivity.csv", io::sensitivity_csv(linspace(axis_a), linspace(axis_b), fid));
}

void run_heating(const RunConfig& cfg, OutputWriter& w) {
    const CouplingProfile profile = coupling_profile(cfg.eta, cfg.n_max);
    ThermalParams params{cfg.beta_omega, cfg.h_r, profile, cfg.truncated};
    const FockDistribution dist = gibbs_distribution(params).dist;
    const std::vector<double> times = microseconds_to_seconds(linspace(cfg.t_us_range));
    const auto dz = heating_deviance(dist, cfg.gamma, profile, drive_of(cfg), times);
    w.add("heating_deviance.csv", io::deviance_csv(times, dz));
}

void run_detuning(const RunConfig& cfg, OutputWriter& w) {
    const CouplingProfile profile = coupling_profile(cfg.eta, cfg.n_max);
    ThermalParams params{cfg.beta_omega, cfg.h_r, profile, cfg.truncated};
    const FockDistribution dist = gibbs_distribution(params).dist;
    const std::vector<double> times = microseconds_to_seconds(linspace(cfg.t_us_range));
    const DriveParams drive = drive_of(cfg);
    const NoiseConfig noise{0.0, cfg.sigma_delta(), cfg.n_runs, cfg.seed};
    const SpinTrajectory avg = detuning_average(dist, profile, drive, noise, times);
    const SpinTrajectory clean = detuned_spin(dist, profile, drive, times);
    std::vector<std::complex<double>> dz(times.size());
    for (std::size_t k = 0; k < times.size(); ++k)
        dz[k] = std::complex<double>(avg.sigma_z[k] - clean.sigma_z[k],
                                     avg.sigma_y[k] - clean.sigma_y[k]);
    w.add("detuning_avg.csv", io::trajectory_csv(avg));
    w.add("detuning_deviance.csv", io::deviance_csv(times, dz));
}

void run_noisy_grid(const RunConfig& cfg, OutputWriter& w) {
    const NoiseConfig noise{cfg.gamma, cfg.sigma_delta(), cfg.n_runs, cfg.seed};
    const NoisyGrid noisy =
        noisy_partition_grid(cfg.beta_omega, coupling_profile(cfg.eta, cfg.n_max), drive_of(cfg),
                             noise, region_of(cfg), cfg.h_r_range.count, cfg.t_us_range.count);
    w.add("noisy_grid.csv", io::grid_csv(noisy.grid));
    w.add("noisy_grid.json", io::noisy_grid_meta_json(noisy));
}

void run_eta_opt(const RunConfig& cfg, OutputWriter& w) {
    const EtaOptimum opt = optimize_eta(cfg.eta_lo, cfg.eta_hi, cfg.n_max);
    nlohmann::json j{{"eta_star", opt.eta_star},
                     {"min_abs_xi", opt.min_abs_xi},
                     {"eta_lo", cfg.eta_lo},
                     {"eta_hi", cfg.eta_hi},
                     {"n_max", cfg.n_max},
                     {"version", kVersion}};
    w.add("eta_opt.json", j.dump(2) + "\n");
}

// ---- reproduce recipes -------------------------------------------------
// Fixed parameter sets; only --seed, --starts and the output directory are
// honored from the command line.

void reproduce_fig1(const RunConfig& cfg, OutputWriter& w) {
    const double beta_omega = 0.5, eta = 0.47;
    const int n_max = 63;
    RunConfig base = cfg;
    base.eta = eta;
    std::string sweep = "h_r,fid_n2,fid_n3,max_alpha_n3\n";
    for (int i = 0; i <= 15; ++i) {
        const double h_r = static_cast<double>(i);
        const FitResult f2 = fit_for(base, beta_omega, h_r, n_max, 2);
        const FitResult f3 = fit_for(base, beta_omega, h_r, n_max, 3);
        sweep += io::g17(h_r) + "," + io::g17(f2.fidelity) + "," + io::g17(f3.fidelity) + "," +
                 io::g17(f3.ensemble.alphas.back()) + "\n";
    }
    w.add("fid_sweep.csv", sweep);

    const FitResult fit7 = fit_for(base, beta_omega, 7.0, n_max, 3);
    w.add("ensemble_hr7.json", io::ensemble_json(fit7, beta_omega, 7.0, eta, n_max, cfg.seed));
    ThermalParams params{beta_omega, 7.0, coupling_profile(eta, n_max), false};
    const FockDistribution target = gibbs_distribution(params).dist;
    const double a1 = fit7.ensemble.alphas[1], a2 = fit7.ensemble.alphas[2];
    const AxisSpec axis_a{std::max(0.0, a1 - 0.8), a1 + 0.8, 33};
    const AxisSpec axis_b{std::max(0.0, a2 - 0.8), a2 + 0.8, 33};
    const auto fid = fidelity_sensitivity(target, fit7.ensemble, 1, 2, axis_a, axis_b);
    w.add("sensitivity_hr7.csv", io::sensitivity_csv(linspace(axis_a), linspace(axis_b), fid));
}

void reproduce_fig2(const RunConfig&, OutputWriter& w) {
    const double beta_omega = 0.5;
    const int n_max = 63;
    for (double eta : {0.15, 0.47}) {
        const CouplingProfile profile = coupling_profile(eta, n_max);
        const std::string tag = "eta" + std::to_string(eta).substr(0, 4);
        const ComplexFieldGrid grid =
            partition_grid(beta_omega, profile, {0.0, 15.0, 151}, {0.0, 40.0, 401});
        w.add("grid_" + tag + ".csv", io::grid_csv(grid));
        w.add("grid_" + tag + ".json", io::grid_meta_json(grid));
        w.add("profile_" + tag + ".csv", io::profile_csv(profile));
        for (double h_r : {7.0, 13.0}) {
            ThermalParams params{beta_omega, h_r, profile, false};
            w.add("dist_" + tag + "_hr" + std::to_string(static_cast<int>(h_r)) + ".csv",
                  io::fock_csv(gibbs_distribution(params).dist));
        }
    }
}

void reproduce_fig4(const RunConfig& cfg, OutputWriter& w) {
    const double beta_omega = 0.5, eta = 0.47;
    const int n_max = 63;
    const CouplingProfile profile = coupling_profile(eta, n_max);
    const DriveParams drive{khz_to_rad(50.0), 0.0};

    const ComplexFieldGrid grid =
        partition_grid(beta_omega, profile, {0.0, 15.0, 151}, {0.0, 40.0, 401});
    w.add("grid.csv", io::grid_csv(grid));
    w.add("grid.json", io::grid_meta_json(grid));

    const ZeroSearchRegion region{0.0, 15.0, 0.0, 200e-6};
    const auto zeros = find_zeros(beta_omega, profile, drive, region, 61, 81, cfg.zero_tol);
    w.add("zeros.json", io::zeros_json(zeros));

    const std::vector<double> times = microseconds_to_seconds(linspace({0.0, 200.0, 2048}));
    for (double h_r : {7.0, 13.0}) {
        ThermalParams params{beta_omega, h_r, profile, false};
        const FockDistribution dist = gibbs_distribution(params).dist;
        w.add("traj_hr" + std::to_string(static_cast<int>(h_r)) + ".csv",
              io::trajectory_csv(spin_coherence(dist, profile, drive, times)));
    }
}

void reproduce_figT(const RunConfig& cfg, OutputWriter& w) {
    const double eta = 0.47;
    RunConfig base = cfg;
    base.eta = eta;
    for (double beta_omega : {2.0, 1.5, 0.8, 0.3}) {
        const int n_max = beta_omega < 0.4 ? 127 : 63;  // high temperature needs headroom
        const CouplingProfile profile = coupling_profile(eta, n_max);
        char tag[16];
        std::snprintf(tag, sizeof(tag), "bw%.1f", beta_omega);
        const ComplexFieldGrid grid =
            partition_grid(beta_omega, profile, {0.0, 15.0, 151}, {0.0, 40.0, 401});
        w.add(std::string("grid_") + tag + ".csv", io::grid_csv(grid));
        w.add(std::string("grid_") + tag + ".json", io::grid_meta_json(grid));
        std::string sweep = "h_r,fid_n3,max_alpha_n3\n";
        for (int i = 0; i <= 15; ++i) {
            const FitResult fit = fit_for(base, beta_omega, static_cast<double>(i), n_max, 3);
            sweep += io::g17(static_cast<double>(i)) + "," + io::g17(fit.fidelity) + "," +
                     io::g17(fit.ensemble.alphas.back()) + "\n";
        }
        w.add(std::string("fid_") + tag + ".csv", sweep);
    }
}

void reproduce_fig6(const RunConfig& cfg, OutputWriter& w) {
    const double beta_omega = 0.5, eta = 0.47, gamma = 300.0;
    const int n_max = 63;
    const CouplingProfile profile = coupling_profile(eta, n_max);
    const DriveParams drive{khz_to_rad(50.0), 0.0};
    const double sigma = khz_to_rad(1.0);
    ThermalParams params{beta_omega, 7.0, profile, false};
    const FockDistribution dist = gibbs_distribution(params).dist;
    const std::vector<double> times = microseconds_to_seconds(linspace({0.0, 200.0, 201}));

    w.add("heating_deviance_hr7.csv",
          io::deviance_csv(times, heating_deviance(dist, gamma, profile, drive, times)));

    const SpinTrajectory clean = detuned_spin(dist, profile, drive, times);
    {
        // fixed-detuning reading of "1 kHz"
        const SpinTrajectory det = detuned_spin(dist, profile, {drive.omega_rabi, sigma}, times);
        std::vector<std::complex<double>> dz(times.size());
        for (std::size_t k = 0; k < times.size(); ++k)
            dz[k] = std::complex<double>(det.sigma_z[k] - clean.sigma_z[k],
                                         det.sigma_y[k] - clean.sigma_y[k]);
        w.add("detuning_fixed_deviance_hr7.csv", io::deviance_csv(times, dz));
    }
    {
        // Gaussian shot-to-shot reading, 100 runs
        const NoiseConfig noise{0.0, sigma, 100, cfg.seed};
        const SpinTrajectory avg = detuning_average(dist, profile, drive, noise, times);
        std::vector<std::complex<double>> dz(times.size());
        for (std::size_t k = 0; k < times.size(); ++k)
            dz[k] = std::complex<double>(avg.sigma_z[k] - clean.sigma_z[k],
                                         avg.sigma_y[k] - clean.sigma_y[k]);
        w.add("detuning_gaussian_deviance_hr7.csv", io::deviance_csv(times, dz));
    }

    const NoiseConfig noise{gamma, sigma, 100, cfg.seed};
    const NoisyGrid noisy =
        noisy_partition_grid(beta_omega, profile, drive, noise, {0.0, 15.0, 0.0, 200e-6}, 61, 81);
    w.add("noisy_grid.csv", io::grid_csv(noisy.grid));
    w.add("noisy_grid.json", io::noisy_grid_meta_json(noisy));
}

void dispatch(const RunConfig& cfg, OutputWriter& w) {
    switch (cfg.experiment) {
        case Experiment::profile: run_profile(cfg, w); return;
        case Experiment::gibbs: run_gibbs(cfg, w); return;
        case Experiment::grid: run_grid(cfg, w); return;
        case Experiment::zeros: run_zeros(cfg, w); return;
        case Experiment::fit: run_fit(cfg, w); return;
        case Experiment::sensitivity: run_sensitivity(cfg, w); return;
        case Experiment::heating: run_heating(cfg, w); return;
        case Experiment::detuning: run_detuning(cfg, w); return;
        case Experiment::noisy_grid: run_noisy_grid(cfg, w); return;
        case Experiment::eta_opt: run_eta_opt(cfg, w); return;
        case Experiment::reproduce: break;
    }
    if (cfg.reproduce_target == "fig1") reproduce_fig1(cfg, w);
    else if (cfg.reproduce_target == "fig2") reproduce_fig2(cfg, w);
    else if (cfg.reproduce_target == "fig4") reproduce_fig4(cfg, w);
    else if (cfg.reproduce_target == "figT") reproduce_figT(cfg, w);
    else reproduce_fig6(cfg, w);
}

std::string experiment_name(const RunConfig& cfg) {
    switch (cfg.experiment) {
        case Experiment::profile: return "profile";
        case Experiment::gibbs: return "gibbs";
        case Experiment::grid: return "grid";
        case Experiment::zeros: return "zeros";
        case Experiment::fit: return "fit";
        case Experiment::sensitivity: return "sensitivity";
        case Experiment::heating: return "heating";
        case Experiment::detuning: return "detuning";
        case Experiment::noisy_grid: return "noisy-grid";
        case Experiment::eta_opt: return "eta-opt";
        case Experiment::reproduce: return "reproduce " + cfg.reproduce_target;
    }
    return "?";
}

}  // namespace

RunOutcome run_experiment(const RunConfig& cfg) {
    const auto t_start = std::chrono::steady_clock::now();
    OutputWriter writer;
    writer.dir = resolve_out_dir(cfg.out_dir);

    for (const auto& [key, value] : cfg.echo)
        std::cerr << "config " << key << " = " << value << "\n";

    dispatch(cfg, writer);
    if (cfg.gnuplot_hints) writer.add("gnuplot_hints.txt", kGnuplotHints);

    nlohmann::json manifest;
    manifest["experiment"] = experiment_name(cfg);
    manifest["version"] = kVersion;
    manifest["seed"] = cfg.seed;
    nlohmann::json config = nlohmann::json::object();
    for (const auto& [key, value] : cfg.echo) config[key] = value;
    manifest["config"] = config;
    nlohmann::json env = nlohmann::json::object();
    if (const char* v = std::getenv("LYZ_OUTPUT_ROOT")) env["LYZ_OUTPUT_ROOT"] = v;
    if (const char* v = std::getenv("LYZ_THREADS")) env["LYZ_THREADS"] = v;
    manifest["env"] = env;
    nlohmann::json outputs = nlohmann::json::array();
    for (const auto& [name, hash] : writer.hashes)
        outputs.push_back({{"file", name}, {"sha256", hash}});
    manifest["outputs"] = outputs;
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - t_start;
    manifest["wall_time_s"] = elapsed.count();

    RunOutcome outcome;
    outcome.out_dir = writer.dir;
    outcome.manifest_path = writer.dir / "manifest.json";
    outcome.output_hashes = writer.hashes;
    io::write_file_atomic(outcome.manifest_path, manifest.dump(2) + "\n");
    return outcome;
}

namespace {

int fail(const char* kind, const std::string& message, int code,
         const std::optional<std::filesystem::path>& out_dir) {
    nlohmann::json j{{"error", kind}, {"message", message}, {"exit_code", code}};
    std::cerr << j.dump() << "\n";
    if (out_dir) {
        try {
            io::write_file_atomic(*out_dir / "error.json", j.dump(2) + "\n");
        } catch (...) {
        }
    }
    return code;
}

}  // namespace

int cli_main(const std::vector<std::string>& args) {
    std::optional<RunConfig> cfg;
    try {
        cfg = parse_config(args);
    } catch (const CLI::CallForHelp& e) {
        std::cout << e.what() << "\n";
        return kExitOk;
    } catch (const CLI::CallForAllHelp& e) {
        std::cout << e.what() << "\n";
        return kExitOk;
    } catch (const CLI::ValidationError& e) {
        return fail("validation", e.what(), kExitValidation, std::nullopt);
    } catch (const CLI::ParseError& e) {
        return fail("usage", e.what(), kExitUsage, std::nullopt);
    } catch (const std::invalid_argument& e) {
        return fail("validation", e.what(), kExitValidation, std::nullopt);
    }

    std::optional<std::filesystem::path> out_dir;
    try {
        out_dir = resolve_out_dir(cfg->out_dir);
        run_experiment(*cfg);
        return kExitOk;
    } catch (const truncation_error& e) {
        return fail("numerical", e.what(), kExitNumerical, out_dir);
    } catch (const numerical_error& e) {
        return fail("numerical", e.what(), kExitNumerical, out_dir);
    } catch (const std::invalid_argument& e) {
        return fail("validation", e.what(), kExitValidation, out_dir);
    } catch (const std::filesystem::filesystem_error& e) {
        return fail("io", e.what(), kExitIo, out_dir);
    } catch (const std::exception& e) {
        return fail("io", e.what(), kExitIo, out_dir);
    }
}

}  // namespace lyz::cli
