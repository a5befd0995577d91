#pragma once

#include <complex>

#include "lyz/coupling.hpp"
#include "lyz/fock.hpp"
#include "lyz/grid.hpp"

namespace lyz {

/// Everything is dimensionless: beta_omega = beta * omega_m, h_r = h_R / omega_m,
/// and imaginary fields enter as beta_h_i = beta * h_I. Physical units exist
/// only at the CLI boundary.
struct ThermalParams {
    double beta_omega = 0.5;
    double h_r = 0.0;
    CouplingProfile profile;
    // Treat the profile length as an intentional support cut: skip the tail
    // gate and mark the resulting distribution truncated.
    bool hard_truncation = false;
};

/// Gibbs weights p_n ∝ exp(-beta_omega (n + h_r xi_n)).
///
/// z0 is reported as the raw truncated sum sum_n exp(-beta_omega (n + h_r xi_n)).
/// Only ratios Z/Z0 are physical; the convention is stated so that the number
/// is comparable across implementations. log_z0 stays finite even when z0
/// under- or overflows.
struct GibbsState {
    FockDistribution dist;
    double z0 = 0.0;
    double log_z0 = 0.0;
};

GibbsState gibbs_distribution(const ThermalParams& params);

/// Z/Z0 = sum_n p_n exp(-i beta_h_i xi_n); an average of unit phasors, so
/// |Z/Z0| <= 1 with equality iff the coupling is uniform over the support.
std::complex<double> partition_value(const ThermalParams& params, double beta_h_i);
std::complex<double> partition_value(const FockDistribution& dist, const CouplingProfile& profile,
                                     double beta_h_i);

/// Cartesian evaluation of partition_value; each h_r column builds its own
/// Gibbs distribution.
ComplexFieldGrid partition_grid(double beta_omega, const CouplingProfile& profile,
                                const AxisSpec& h_r_axis, const AxisSpec& beta_h_i_axis,
                                bool hard_truncation = false);

}  // namespace lyz
