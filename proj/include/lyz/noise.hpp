#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "lyz/dynamics.hpp"

namespace lyz {

struct NoiseConfig {
    double gamma = 0.0;        // heating rate, quanta/s
    double sigma_delta = 0.0;  // std dev of shot-to-shot detuning, rad/s
    int n_runs = 1;
    std::uint64_t seed = 0;
};

/// Populations under the heating master equation close on themselves (the
/// Hamiltonian is number diagonal, both dissipators map diagonal to diagonal),
/// so this integrates the birth-death chain
///   dp_n/dt = gamma [ (n+1) p_{n+1} + n p_{n-1} - (2n+1) p_n ]
/// with explicit RK4 at step h <= 0.1 / (gamma (2 n_max_evolve + 1)), the
/// stability headroom for the generator's spectral radius. The chain is
/// truncated conservatively (the upward rate out of the top bin is dropped);
/// the suppressed flux is integrated alongside and raises a truncation error
/// past 1e-8. Outputs are marked truncated: the 1e-8 flux gate replaces the
/// generic 1e-10 tail gate.
FockDistribution heating_evolve(const FockDistribution& dist, double gamma, double t,
                                int n_max_evolve);

/// For each t: Delta p(t) = heating_evolve(dist, gamma, t) - dist, and the
/// returned value is sum_n Delta p_n e^{+i Omega xi_n t}. Heating acts for the
/// same duration as the coherent evolution.
std::vector<std::complex<double>> heating_deviance(const FockDistribution& dist, double gamma,
                                                   const CouplingProfile& profile,
                                                   const DriveParams& drive,
                                                   std::span<const double> times);

/// The detunings Delta_k drawn for a config: run k uses mt19937_64 seeded from
/// substream (seed, k), one Box-Muller normal scaled by sigma_delta. Exposed so
/// callers can reproduce per-run trajectories.
std::vector<double> detuning_samples(const NoiseConfig& cfg);

/// Pointwise mean of detuned_spin over n_runs shot-to-shot detunings
/// drive.detuning + Delta_k. Deterministic given cfg.seed.
SpinTrajectory detuning_average(const FockDistribution& dist, const CouplingProfile& profile,
                                const DriveParams& drive, const NoiseConfig& cfg,
                                std::span<const double> times);

struct NoisyGrid {
    ComplexFieldGrid grid;      // beta_h_i_axis carries Omega * t
    std::vector<double> t_axis; // seconds
    NoiseConfig noise;
    DriveParams drive;
};

/// Per column (fixed h_r): Gibbs state, heated for each grid time, then
/// detuning-averaged; values are sigma_z + i sigma_y in the detuned_spin
/// convention, which reduces to partition_value at beta_h_i = Omega t for a
/// zero-noise config.
NoisyGrid noisy_partition_grid(double beta_omega, const CouplingProfile& profile,
                               const DriveParams& drive, const NoiseConfig& cfg,
                               const ZeroSearchRegion& region, int n_h_r, int n_t);

}  // namespace lyz
