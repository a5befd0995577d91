#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "lyz/errors.hpp"
#include "lyz/noise.hpp"
#include "lyz/thermal.hpp"
#include "oracles.hpp"

using lyz::coupling_profile;
using lyz::CouplingProfile;
using lyz::detuned_spin;
using lyz::detuning_average;
using lyz::detuning_samples;
using lyz::DriveParams;
using lyz::FockDistribution;
using lyz::gibbs_distribution;
using lyz::heating_deviance;
using lyz::heating_evolve;
using lyz::NoiseConfig;
using lyz::noisy_partition_grid;
using lyz::partition_value;
using lyz::ThermalParams;
using lyz::ZeroSearchRegion;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
const DriveParams kDrive{kTwoPi * 50e3, 0.0};

FockDistribution gibbs_target(double beta_omega, double h_r, const CouplingProfile& profile) {
    return gibbs_distribution(ThermalParams{beta_omega, h_r, profile, false}).dist;
}

}  // namespace

TEST_CASE("zero heating rate returns the padded input") {
    const auto profile = coupling_profile(0.47, 30);
    const auto dist = gibbs_target(0.5, 7.0, coupling_profile(0.47, 63));
    const auto out = heating_evolve(dist, 0.0, 1.0, 80);
    REQUIRE(out.size() == 81);
    for (int n = 0; n <= 63; ++n) CHECK(out[n] == dist[n]);
    for (int n = 64; n <= 80; ++n) CHECK(out[n] == 0.0);
    (void)profile;
}

TEST_CASE("vacuum heats at the first-order rate") {
    const auto vacuum = FockDistribution::point_mass(0, 0);
    const double gamma = 300.0;
    const double t = 1e-4 / gamma;  // gamma t = 1e-4
    const auto out = heating_evolve(vacuum, gamma, t, 63);
    CHECK(std::fabs(out[1] - 1e-4) <= 1e-7);
}

TEST_CASE("mean phonon number grows at exactly the heating rate") {
    const auto vacuum = FockDistribution::point_mass(0, 0);
    const double gamma = 300.0;
    const double t_max = 0.1 / gamma;
    // least-squares slope over 11 samples
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const int samples = 11;
    for (int i = 0; i < samples; ++i) {
        const double t = t_max * i / (samples - 1);
        const double mean = heating_evolve(vacuum, gamma, t, 63).mean();
        sx += t;
        sy += mean;
        sxx += t * t;
        sxy += t * mean;
    }
    const double slope = (samples * sxy - sx * sy) / (samples * sxx - sx * sx);
    CHECK(std::fabs(slope - gamma) / gamma <= 1e-3);
}

TEST_CASE("probability and positivity are preserved") {
    const auto profile = coupling_profile(0.47, 63);
    const auto dist = gibbs_target(0.5, 7.0, profile);
    const auto out = heating_evolve(dist, 300.0, 200e-6, 63);
    double sum = 0.0;
    for (int n = 0; n <= 63; ++n) {
        CHECK(out[n] >= 0.0);
        sum += out[n];
    }
    CHECK(std::fabs(sum - 1.0) <= 1e-12);
}

TEST_CASE("integration agrees with a 10x finer reference run") {
    const auto profile = coupling_profile(0.47, 63);
    const auto dist = gibbs_target(0.5, 7.0, profile);
    const double gamma = 300.0, t = 100e-6;
    const auto fast = heating_evolve(dist, gamma, t, 63);
    const double h_max = 0.1 / (gamma * (2.0 * 63.0 + 1.0));
    const int fine_steps = 10 * static_cast<int>(std::ceil(t / h_max));
    const auto fine = oracles::birth_death_reference(dist.probs(), gamma, t, fine_steps);
    double max_diff = 0.0;
    for (int n = 0; n <= 63; ++n) max_diff = std::max(max_diff, std::fabs(fast[n] - fine[n]));
    CHECK(max_diff <= 1e-6);
    // same bar for the second factorial moment
    double fine_m2 = 0.0;
    for (int n = 2; n <= 63; ++n) fine_m2 += double(n) * (n - 1) * fine[n];
    CHECK(std::fabs(fast.second_factorial_moment() - fine_m2) <= 1e-6);
}

TEST_CASE("heating tail gate fires when the chain outgrows the box") {
    const auto dist = FockDistribution::point_mass(4, 5);
    CHECK_THROWS_AS(heating_evolve(dist, 1000.0, 1.0, 6), lyz::truncation_error);
    CHECK_THROWS_AS(heating_evolve(dist, 300.0, 1e-3, 3), std::invalid_argument);  // no headroom
}

TEST_CASE("heating deviance vanishes without heating or time") {
    const auto profile = coupling_profile(0.47, 63);
    const auto dist = gibbs_target(0.5, 7.0, profile);
    const std::vector<double> times{0.0, 20e-6, 90e-6};
    const auto none = heating_deviance(dist, 0.0, profile, kDrive, times);
    for (const auto& dz : none) CHECK(std::abs(dz) == 0.0);
    const auto some = heating_deviance(dist, 300.0, profile, kDrive, times);
    CHECK(std::abs(some[0]) == 0.0);
    CHECK(std::abs(some[2]) > 0.0);
    CHECK(std::abs(some[2]) < 0.02);
}

TEST_CASE("detuning samples and averages are reproducible") {
    const auto profile = coupling_profile(0.47, 63);
    const auto dist = gibbs_target(0.5, 7.0, profile);
    const std::vector<double> times{0.0, 30e-6, 60e-6, 120e-6};
    const NoiseConfig cfg{0.0, kTwoPi * 1e3, 64, 99};
    const auto a = detuning_average(dist, profile, kDrive, cfg, times);
    const auto b = detuning_average(dist, profile, kDrive, cfg, times);
    for (std::size_t k = 0; k < times.size(); ++k) {
        CHECK(a.sigma_z[k] == b.sigma_z[k]);
        CHECK(a.sigma_y[k] == b.sigma_y[k]);
    }
    NoiseConfig other = cfg;
    other.seed = 100;
    const auto c = detuning_average(dist, profile, kDrive, other, times);
    bool differs = false;
    for (std::size_t k = 0; k < times.size(); ++k) differs = differs || c.sigma_z[k] != a.sigma_z[k];
    CHECK(differs);
    CHECK(detuning_samples(cfg) == detuning_samples(cfg));
}

TEST_CASE("zero-width detuning equals the deterministic evolution bit for bit") {
    const auto profile = coupling_profile(0.47, 63);
    const auto dist = gibbs_target(0.5, 7.0, profile);
    const std::vector<double> times{0.0, 25e-6, 75e-6};
    const NoiseConfig cfg{0.0, 0.0, 5, 7};
    const auto avg = detuning_average(dist, profile, kDrive, cfg, times);
    const auto exact = detuned_spin(dist, profile, kDrive, times);
    for (std::size_t k = 0; k < times.size(); ++k) {
        CHECK(avg.sigma_z[k] == exact.sigma_z[k]);
        CHECK(avg.sigma_y[k] == exact.sigma_y[k]);
    }
    // a nonzero static detuning is the mean of the jitter distribution
    const DriveParams offset{kDrive.omega_rabi, kTwoPi * 2e3};
    const auto avg_off = detuning_average(dist, profile, offset, cfg, times);
    const auto exact_off = detuned_spin(dist, profile, offset, times);
    for (std::size_t k = 0; k < times.size(); ++k) CHECK(avg_off.sigma_z[k] == exact_off.sigma_z[k]);
}

TEST_CASE("Monte Carlo average converges to the Gauss-Hermite quadrature") {
    const auto profile = coupling_profile(0.47, 63);
    const auto dist = gibbs_target(0.5, 7.0, profile);
    const double sigma = kTwoPi * 1e3;
    const std::vector<double> times{15e-6, 45e-6, 90e-6, 160e-6};
    const NoiseConfig cfg{0.0, sigma, 100000, 2024};

    // per-run trajectories give both the mean and its standard error
    const auto samples = detuning_samples(cfg);
    std::vector<double> sum(times.size(), 0.0), sum_sq(times.size(), 0.0);
    for (double delta : samples) {
        const auto traj = detuned_spin(dist, profile, {kDrive.omega_rabi, delta}, times);
        for (std::size_t k = 0; k < times.size(); ++k) {
            sum[k] += traj.sigma_z[k];
            sum_sq[k] += traj.sigma_z[k] * traj.sigma_z[k];
        }
    }
    const auto rule = oracles::gauss_hermite(64);
    const double runs = static_cast<double>(cfg.n_runs);
    for (std::size_t k = 0; k < times.size(); ++k) {
        const double mc_mean = sum[k] / runs;
        const double variance = std::max(0.0, sum_sq[k] / runs - mc_mean * mc_mean);
        const double std_error = std::sqrt(variance / runs);
        const double quadrature = oracles::gaussian_average(rule, sigma, [&](double delta) {
            const auto traj = detuned_spin(dist, profile, {kDrive.omega_rabi, delta},
                                           std::vector<double>{times[k]});
            return traj.sigma_z[0];
        });
        CHECK(std::fabs(mc_mean - quadrature) <= 3.0 * std_error + 1e-12);
    }
    // the library mean matches the per-run accumulation
    const auto avg = detuning_average(dist, profile, kDrive, cfg, times);
    for (std::size_t k = 0; k < times.size(); ++k)
        CHECK(avg.sigma_z[k] == doctest::Approx(sum[k] / runs).epsilon(1e-12));
}

TEST_CASE("standard error scales as the inverse square root of the run count") {
    const auto profile = coupling_profile(0.47, 63);
    const auto dist = gibbs_target(0.5, 7.0, profile);
    const double sigma = kTwoPi * 1e3;
    const std::vector<double> times{30e-6};
    double se[3];
    const int counts[3] = {100, 400, 1600};
    for (int c = 0; c < 3; ++c) {
        const NoiseConfig cfg{0.0, sigma, counts[c], 5150};
        const auto samples = detuning_samples(cfg);
        double sum = 0.0, sum_sq = 0.0;
        for (double delta : samples) {
            const auto traj = detuned_spin(dist, profile, {kDrive.omega_rabi, delta}, times);
            sum += traj.sigma_z[0];
            sum_sq += traj.sigma_z[0] * traj.sigma_z[0];
        }
        const double runs = static_cast<double>(counts[c]);
        const double mean = sum / runs;
        se[c] = std::sqrt(std::max(0.0, sum_sq / runs - mean * mean) / runs);
    }
    CHECK(se[0] / se[1] == doctest::Approx(2.0).epsilon(0.2));
    CHECK(se[1] / se[2] == doctest::Approx(2.0).epsilon(0.2));
}

TEST_CASE("detuning deviance stays small at the coherence-collapse times") {
    // both readings of a 1 kHz detuning: fixed offset, and the 100-run
    // Gaussian shot-to-shot average
    const auto profile = coupling_profile(0.47, 63);
    const auto dist = gibbs_target(0.5, 7.0, profile);
    const std::vector<double> zero_times{29.68e-6, 43.20e-6, 56.89e-6};
    const auto clean = detuned_spin(dist, profile, kDrive, zero_times);
    const DriveParams fixed{kDrive.omega_rabi, kTwoPi * 1e3};
    const auto fixed_traj = detuned_spin(dist, profile, fixed, zero_times);
    const NoiseConfig cfg{0.0, kTwoPi * 1e3, 100, 11};
    const auto gaussian = detuning_average(dist, profile, kDrive, cfg, zero_times);
    for (std::size_t k = 0; k < zero_times.size(); ++k) {
        CHECK(std::hypot(fixed_traj.sigma_z[k] - clean.sigma_z[k],
                         fixed_traj.sigma_y[k] - clean.sigma_y[k]) <= 0.02);
        CHECK(std::hypot(gaussian.sigma_z[k] - clean.sigma_z[k],
                         gaussian.sigma_y[k] - clean.sigma_y[k]) <= 0.02);
    }
}

TEST_CASE("noise-free grid reproduces the noiseless partition function") {
    const auto profile = coupling_profile(0.47, 63);
    const NoiseConfig cfg{0.0, 0.0, 1, 0};
    const ZeroSearchRegion region{0.0, 15.0, 0.0, 100e-6};
    const auto noisy = noisy_partition_grid(0.5, profile, kDrive, cfg, region, 16, 17);
    const auto clean = lyz::partition_grid(
        0.5, profile, lyz::AxisSpec{0.0, 15.0, 16},
        lyz::AxisSpec{0.0, kDrive.omega_rabi * 100e-6, 17});
    for (std::size_t i = 0; i < noisy.grid.values.size(); ++i)
        for (std::size_t j = 0; j < noisy.grid.values[i].size(); ++j)
            CHECK(std::abs(noisy.grid.values[i][j] - clean.values[i][j]) <= 1e-12);
}
