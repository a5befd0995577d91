#pragma once

#include <vector>

namespace lyz {

/// Laguerre polynomial L_n(x) by the three-term recurrence
/// (n+1) L_{n+1} = (2n+1-x) L_n - n L_{n-1}, seeded L_0 = 1, L_1 = 1-x.
/// Stable for the small arguments used here (x <= 4, n <= 200).
double laguerre(int n, double x);

/// Lamb-Dicke parameter eta, truncation n_max, and the dimensionless carrier
/// couplings xi_n = exp(-eta^2/2) L_n(eta^2). xi_0 = exp(-eta^2/2) exactly,
/// xi_n = 1 for all n at eta = 0, and |xi_n| <= 1 throughout.
struct CouplingProfile {
    double eta = 0.0;
    std::vector<double> xi;

    int n_max() const { return static_cast<int>(xi.size()) - 1; }
};

CouplingProfile coupling_profile(double eta, int n_max);

struct EtaOptimum {
    double eta_star;
    double min_abs_xi;
};

/// Maximize f(eta) = min_{n_lo <= n <= n_hi} |xi_n(eta)| over [eta_lo, eta_hi]
/// by dense grid scan (step <= 1e-3) followed by local refinement
/// (step <= 1e-5). f is continuous but kinked where the active n switches or
/// a xi_n crosses zero, so the coarse scan must land refinement in the right
/// basin; a smooth optimizer would not be trustworthy here.
EtaOptimum optimize_eta_window(double eta_lo, double eta_hi, int n_lo, int n_hi);

inline EtaOptimum optimize_eta(double eta_lo, double eta_hi, int n_max) {
    return optimize_eta_window(eta_lo, eta_hi, 0, n_max);
}

}  // namespace lyz
