#pragma once

#include <complex>
#include <vector>

namespace lyz {

// Inclusive uniformly spaced axis; count == 1 collapses to {lo}.
struct AxisSpec {
    double lo = 0.0;
    double hi = 0.0;
    int count = 1;
};

std::vector<double> linspace(const AxisSpec& axis);

/// Sampled normalized partition function Z/Z0 over a rectangle of complex
/// field. values[i][j] corresponds to (h_r_axis[i], beta_h_i_axis[j]);
/// every |value| <= 1 and the slice at beta_h_i = 0 is identically 1.
struct ComplexFieldGrid {
    std::vector<double> h_r_axis;
    std::vector<double> beta_h_i_axis;
    std::vector<std::vector<std::complex<double>>> values;
    // parameters the grid was built from
    double beta_omega = 0.0;
    double eta = 0.0;
    int n_max = 0;
};

}  // namespace lyz
