#pragma once

#include <complex>
#include <span>
#include <vector>

#include "lyz/coupling.hpp"
#include "lyz/fock.hpp"
#include "lyz/thermal.hpp"

namespace lyz {

struct DriveParams {
    double omega_rabi = 0.0;  // carrier Rabi frequency, rad/s
    double detuning = 0.0;    // static detuning, rad/s
};

struct SpinTrajectory {
    std::vector<double> times;
    std::vector<double> sigma_z;
    std::vector<double> sigma_y;
};

// Sign conventions, fixed once here:
//   spin_coherence:  sigma_z + i sigma_y = sum_n p_n exp(+i Omega xi_n t),
//                    the complex conjugate of partition_value at
//                    beta_h_i = Omega t (equivalently partition_value at
//                    beta_h_i = -Omega t).
//   detuned_spin:    sigma_y carries the opposite sign at Delta = 0, so
//                    sigma_z + i sigma_y = partition_value at beta_h_i = +Omega t.
// Zero locations are unaffected: both components vanish together, and the
// zero set is mirror symmetric under conjugation.

SpinTrajectory spin_coherence(const FockDistribution& dist, const CouplingProfile& profile,
                              const DriveParams& drive, std::span<const double> times);

/// Rabi dynamics under a static detuning Delta: with Omega_n = Omega xi_n and
/// X_n = sqrt(Delta^2 + Omega_n^2),
///   sigma_z = sum_n p_n (Delta^2/X_n^2 + (Omega_n^2/X_n^2) cos(X_n t))
///   sigma_y = -sum_n p_n (Omega_n/X_n) sin(X_n t)
SpinTrajectory detuned_spin(const FockDistribution& dist, const CouplingProfile& profile,
                            const DriveParams& drive, std::span<const double> times);

/// Map between evolution time and the imaginary-field coordinate:
/// beta_h_i = Omega t (magnitude convention; see the conjugation note above).
double time_to_field(const DriveParams& drive, double t);
double field_to_time(const DriveParams& drive, double beta_h_i);

struct ZeroLocation {
    double h_r;
    double t;         // seconds
    double beta_h_i;  // Omega * t
    double residual;  // |Z/Z0| at the refined point
    bool converged;   // implies residual <= min(tol, 1e-8)
};

struct ZeroSearchRegion {
    double h_r_lo, h_r_hi;
    double t_lo, t_hi;  // seconds
};

/// Unnormalized partition value and its analytic partials at (h_r, t):
///   Z      = sum_n exp(-beta_omega (n + h_r xi_n) - log_shift) e^{i Omega xi_n t}
///   dZ/dh_r brings down -beta_omega xi_n, dZ/dt brings down i Omega xi_n.
/// log_shift rescales all three together (zeros are scale invariant).
struct PartitionPoint {
    std::complex<double> z;
    std::complex<double> dz_dh_r;
    std::complex<double> dz_dt;
};

PartitionPoint partition_point(double beta_omega, const CouplingProfile& profile,
                               const DriveParams& drive, double h_r, double t, double log_shift);

/// Locate partition-function zeros in a rectangle of (h_r, t):
/// coarse grid evaluation, candidate cells from |Z| local minima below 0.1 or
/// simultaneous sign changes of Re Z and Im Z, damped Newton refinement on the
/// unnormalized Z (same zero set, simpler Jacobian), deduplication within half
/// a coarse cell, sort by (h_r, t). Candidates whose refinement diverges are
/// reported with converged = false.
std::vector<ZeroLocation> find_zeros(double beta_omega, const CouplingProfile& profile,
                                     const DriveParams& drive, const ZeroSearchRegion& region,
                                     int n_h_r, int n_t, double tol = 1e-8,
                                     bool hard_truncation = false);

}  // namespace lyz
