#pragma once

#include <complex>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lyz/dynamics.hpp"
#include "lyz/ensemble.hpp"
#include "lyz/noise.hpp"

namespace lyz::io {

/// 17 significant digits — enough to round-trip a double exactly.
std::string g17(double v);

std::string sha256_hex(std::string_view data);

/// Write-temp-then-rename so readers never observe a partial file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

// CSV payloads. Values are printed with g17 throughout.
std::string grid_csv(const ComplexFieldGrid& grid);                       // h_r,beta_h_i,re_z,im_z,abs_z
std::string trajectory_csv(const SpinTrajectory& traj);                   // t_seconds,sigma_z,sigma_y
std::string deviance_csv(std::span<const double> times,
                         std::span<const std::complex<double>> dz);       // t_seconds,re_dz,im_dz,abs_dz
std::string fock_csv(const FockDistribution& dist);                       // n,p
std::string profile_csv(const CouplingProfile& profile);                  // n,xi
std::string sensitivity_csv(std::span<const double> axis_a, std::span<const double> axis_b,
                            const std::vector<std::vector<double>>& fid); // alpha_a,alpha_b,fidelity

// JSON payloads (serialized text).
std::string zeros_json(const std::vector<ZeroLocation>& zeros);
std::string ensemble_json(const FitResult& fit, double beta_omega, double h_r, double eta,
                          int n_max, std::uint64_t seed);
std::string grid_meta_json(const ComplexFieldGrid& grid);
std::string noisy_grid_meta_json(const NoisyGrid& noisy);

}  // namespace lyz::io
