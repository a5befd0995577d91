// Independent oracles for the test suites. Everything here deliberately
// avoids the library's computation paths: closed-form sums, dense matrix
// exponentials, explicit 2x2 unitaries and quadrature stand on their own.
#pragma once

#include <complex>
#include <functional>
#include <utility>
#include <vector>

namespace oracles {

// L_n(x) = sum_{k=0}^{n} C(n,k) (-x)^k / k!, accumulated in long double.
// Safe against cancellation for the small n, x used in the tests.
long double laguerre_closed_form(int n, long double x);

// Z/Z0 on the truncated Fock space via dense matrix exponentials:
// trace(expm(D)) / trace(expm(Re D)) with D the diagonal matrix
// -beta_omega (n + h_r xi_n) - i beta_h_i xi_n embedded as a dense complex
// matrix and exponentiated by scaling-and-squaring Taylor.
std::complex<double> dense_partition_ratio(double beta_omega, double h_r,
                                           const std::vector<double>& xi, double beta_h_i);

// Exact Rabi evolution of one two-level system: U = exp(-i H t) with
// H = (delta/2) sigma_z + (omega_n/2) sigma_x applied to spin-up; returns
// (<sigma_z>, <sigma_y>).
std::pair<double, double> two_level_spin(double omega_n, double delta, double t);

struct GaussHermite {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Physicists' Gauss-Hermite rule (Newton refinement on the recurrence).
GaussHermite gauss_hermite(int order);

// E[g(X)] for X ~ Normal(0, sigma^2).
double gaussian_average(const GaussHermite& rule, double sigma,
                        const std::function<double(double)>& g);

// Reference RK4 for the truncated birth-death chain (same generator as the
// library, independent code, caller-chosen step count).
std::vector<double> birth_death_reference(std::vector<double> populations, double gamma, double t,
                                          int steps);

struct EtaScan {
    double eta_star;
    double min_abs_xi;
};

// Exhaustive scan of max_eta min_{n_lo..n_hi} |xi_n(eta)| at a fixed step.
EtaScan brute_force_eta(double eta_lo, double eta_hi, double step, int n_lo, int n_hi);

}  // namespace oracles
