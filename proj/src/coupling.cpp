#include "lyz/coupling.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace lyz {

double laguerre(int n, double x) {
    if (n < 0) throw std::invalid_argument("laguerre: n must be >= 0");
    if (!std::isfinite(x) || x < 0.0)
        throw std::invalid_argument("laguerre: x must be finite and >= 0");
    double p0 = 1.0;
    if (n == 0) return p0;
    double p1 = 1.0 - x;
    for (int k = 1; k < n; ++k) {
        const double p2 = ((2.0 * k + 1.0 - x) * p1 - k * p0) / (k + 1.0);
        p0 = p1;
        p1 = p2;
    }
    return p1;
}

CouplingProfile coupling_profile(double eta, int n_max) {
    if (!std::isfinite(eta) || eta < 0.0)
        throw std::invalid_argument("coupling_profile: eta must be finite and >= 0");
    if (n_max < 0) throw std::invalid_argument("coupling_profile: n_max must be >= 0");
    const double x = eta * eta;
    const double pre = std::exp(-x / 2.0);
    CouplingProfile profile;
    profile.eta = eta;
    profile.xi.resize(static_cast<std::size_t>(n_max) + 1);
    // single forward recurrence pass keeps prefixes bit-stable across n_max
    double p0 = 1.0, p1 = 1.0 - x;
    profile.xi[0] = pre;
    if (n_max >= 1) profile.xi[1] = pre * p1;
    for (int n = 2; n <= n_max; ++n) {
        const double p2 = ((2.0 * (n - 1) + 1.0 - x) * p1 - (n - 1) * p0) / static_cast<double>(n);
        p0 = p1;
        p1 = p2;
        profile.xi[static_cast<std::size_t>(n)] = pre * p1;
    }
    return profile;
}

namespace {

// min_{n_lo..n_hi} |xi_n(eta)| in one recurrence sweep
double min_abs_xi(double eta, int n_lo, int n_hi) {
    const double x = eta * eta;
    const double pre = std::exp(-x / 2.0);
    double p0 = 1.0, p1 = 1.0 - x;
    double best = (n_lo == 0) ? pre : std::numeric_limits<double>::infinity();
    if (n_hi >= 1 && n_lo <= 1) best = std::min(best, pre * std::fabs(p1));
    for (int n = 2; n <= n_hi; ++n) {
        const double p2 = ((2.0 * (n - 1) + 1.0 - x) * p1 - (n - 1) * p0) / static_cast<double>(n);
        p0 = p1;
        p1 = p2;
        if (n >= n_lo) best = std::min(best, pre * std::fabs(p1));
    }
    return best;
}

struct ScanBest {
    double eta;
    double f;
};

ScanBest scan(double lo, double hi, double max_step, int n_lo, int n_hi) {
    const int cells = std::max(1, static_cast<int>(std::ceil((hi - lo) / max_step)));
    const double step = (hi - lo) / cells;
    ScanBest best{lo, -1.0};
    for (int i = 0; i <= cells; ++i) {
        const double eta = (i == cells) ? hi : lo + step * i;
        const double f = min_abs_xi(eta, n_lo, n_hi);
        if (f > best.f) best = {eta, f};
    }
    return best;
}

}  // namespace

EtaOptimum optimize_eta_window(double eta_lo, double eta_hi, int n_lo, int n_hi) {
    if (!std::isfinite(eta_lo) || !std::isfinite(eta_hi) || eta_lo < 0.0 || !(eta_lo < eta_hi))
        throw std::invalid_argument("optimize_eta: require 0 <= eta_lo < eta_hi, finite");
    if (n_lo < 0 || n_hi < std::max(n_lo, 1))
        throw std::invalid_argument("optimize_eta: require 0 <= n_lo <= n_hi, n_hi >= 1");
    const ScanBest coarse = scan(eta_lo, eta_hi, 1e-3, n_lo, n_hi);
    const double cell = (eta_hi - eta_lo) /
                        std::max(1, static_cast<int>(std::ceil((eta_hi - eta_lo) / 1e-3)));
    const double lo = std::max(eta_lo, coarse.eta - cell);
    const double hi = std::min(eta_hi, coarse.eta + cell);
    const ScanBest fine = scan(lo, hi, 1e-5, n_lo, n_hi);
    return {fine.eta, fine.f};
}

}  // namespace lyz
