#include "lyz/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lyz/errors.hpp"

namespace lyz {

namespace {

void validate_lengths(const FockDistribution& dist, const CouplingProfile& profile) {
    if (dist.size() != profile.n_max() + 1)
        throw std::invalid_argument("distribution and coupling profile lengths differ");
}

void validate_times(std::span<const double> times) {
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!std::isfinite(times[i])) throw std::invalid_argument("times must be finite");
        if (i > 0 && times[i] < times[i - 1])
            throw std::invalid_argument("times must be non-decreasing");
    }
}

void validate_drive(const DriveParams& drive) {
    if (!std::isfinite(drive.omega_rabi) || drive.omega_rabi <= 0.0)
        throw std::invalid_argument("DriveParams: omega_rabi must be finite and > 0");
    if (!std::isfinite(drive.detuning))
        throw std::invalid_argument("DriveParams: detuning must be finite");
}

}  // namespace

SpinTrajectory spin_coherence(const FockDistribution& dist, const CouplingProfile& profile,
                              const DriveParams& drive, std::span<const double> times) {
    validate_lengths(dist, profile);
    validate_drive(drive);
    validate_times(times);
    SpinTrajectory traj;
    traj.times.assign(times.begin(), times.end());
    traj.sigma_z.resize(times.size());
    traj.sigma_y.resize(times.size());
    for (std::size_t k = 0; k < times.size(); ++k) {
        double sz = 0.0, sy = 0.0;
        for (int n = 0; n < dist.size(); ++n) {
            const double phase = drive.omega_rabi * profile.xi[static_cast<std::size_t>(n)] * times[k];
            sz += dist[n] * std::cos(phase);
            sy += dist[n] * std::sin(phase);
        }
        traj.sigma_z[k] = sz;
        traj.sigma_y[k] = sy;
    }
    return traj;
}

SpinTrajectory detuned_spin(const FockDistribution& dist, const CouplingProfile& profile,
                            const DriveParams& drive, std::span<const double> times) {
    validate_lengths(dist, profile);
    validate_drive(drive);
    validate_times(times);
    const double delta = drive.detuning;
    const int count = dist.size();
    std::vector<double> rabi(static_cast<std::size_t>(count)), x_n(static_cast<std::size_t>(count));
    for (int n = 0; n < count; ++n) {
        rabi[static_cast<std::size_t>(n)] = drive.omega_rabi * profile.xi[static_cast<std::size_t>(n)];
        x_n[static_cast<std::size_t>(n)] =
            std::sqrt(delta * delta + rabi[static_cast<std::size_t>(n)] * rabi[static_cast<std::size_t>(n)]);
    }
    SpinTrajectory traj;
    traj.times.assign(times.begin(), times.end());
    traj.sigma_z.resize(times.size());
    traj.sigma_y.resize(times.size());
    for (std::size_t k = 0; k < times.size(); ++k) {
        double sz = 0.0, sy = 0.0;
        for (int n = 0; n < count; ++n) {
            const double X = x_n[static_cast<std::size_t>(n)];
            if (X == 0.0) {
                sz += dist[n];  // Omega_n = Delta = 0: this component is frozen
                continue;
            }
            const double om = rabi[static_cast<std::size_t>(n)];
            const double inv_x2 = 1.0 / (X * X);
            sz += dist[n] * (delta * delta * inv_x2 + om * om * inv_x2 * std::cos(X * times[k]));
            sy -= dist[n] * (om / X) * std::sin(X * times[k]);
        }
        traj.sigma_z[k] = sz;
        traj.sigma_y[k] = sy;
    }
    return traj;
}

double time_to_field(const DriveParams& drive, double t) {
    validate_drive(drive);
    return drive.omega_rabi * t;
}

double field_to_time(const DriveParams& drive, double beta_h_i) {
    validate_drive(drive);
    return beta_h_i / drive.omega_rabi;
}

PartitionPoint partition_point(double beta_omega, const CouplingProfile& profile,
                               const DriveParams& drive, double h_r, double t, double log_shift) {
    PartitionPoint point{0.0, 0.0, 0.0};
    for (std::size_t n = 0; n < profile.xi.size(); ++n) {
        const double xi = profile.xi[n];
        const double weight =
            std::exp(-beta_omega * (static_cast<double>(n) + h_r * xi) - log_shift);
        const std::complex<double> term =
            weight * std::exp(std::complex<double>(0.0, drive.omega_rabi * xi * t));
        point.z += term;
        point.dz_dh_r += -beta_omega * xi * term;
        point.dz_dt += std::complex<double>(0.0, drive.omega_rabi * xi) * term;
    }
    return point;
}

namespace {

struct NewtonOutcome {
    double h_r, t, residual;
    bool converged;
};

// |Z/Z0| at (h_r, t); Z0 recomputed because it moves with h_r
double normalized_residual(double beta_omega, const CouplingProfile& profile,
                           const DriveParams& drive, double h_r, double t) {
    double e_min = std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n < profile.xi.size(); ++n)
        e_min = std::min(e_min, beta_omega * (static_cast<double>(n) + h_r * profile.xi[n]));
    double z0 = 0.0;
    std::complex<double> z = 0.0;
    for (std::size_t n = 0; n < profile.xi.size(); ++n) {
        const double w =
            std::exp(-(beta_omega * (static_cast<double>(n) + h_r * profile.xi[n]) - e_min));
        z0 += w;
        z += w * std::exp(std::complex<double>(0.0, drive.omega_rabi * profile.xi[n] * t));
    }
    return std::abs(z) / z0;
}

NewtonOutcome refine_zero(double beta_omega, const CouplingProfile& profile,
                          const DriveParams& drive, double h_r, double t, double tol_eff) {
    constexpr int kMaxIters = 50;
    constexpr double kTargetResidual = 1e-12;  // polish well below the gate
    double residual = normalized_residual(beta_omega, profile, drive, h_r, t);
    for (int iter = 0; iter < kMaxIters && residual > kTargetResidual; ++iter) {
        // shift exponents so the 2x2 solve works on O(1) numbers; the common
        // scale cancels out of the Newton step
        double e_min = std::numeric_limits<double>::infinity();
        for (std::size_t n = 0; n < profile.xi.size(); ++n)
            e_min = std::min(e_min, beta_omega * (static_cast<double>(n) + h_r * profile.xi[n]));
        const PartitionPoint p = partition_point(beta_omega, profile, drive, h_r, t, -e_min);
        const double j11 = p.dz_dh_r.real(), j12 = p.dz_dt.real();
        const double j21 = p.dz_dh_r.imag(), j22 = p.dz_dt.imag();
        const double det = j11 * j22 - j12 * j21;
        if (det == 0.0 || !std::isfinite(det)) break;
        const double step_h = (-p.z.real() * j22 + p.z.imag() * j12) / det;
        const double step_t = (-j11 * p.z.imag() + j21 * p.z.real()) / det;
        // damping: halve until the normalized residual actually drops
        double lambda = 1.0;
        bool improved = false;
        for (int k = 0; k < 24; ++k, lambda *= 0.5) {
            const double cand_h = h_r + lambda * step_h;
            const double cand_t = t + lambda * step_t;
            const double cand_res = normalized_residual(beta_omega, profile, drive, cand_h, cand_t);
            if (cand_res < residual) {
                h_r = cand_h;
                t = cand_t;
                residual = cand_res;
                improved = true;
                break;
            }
        }
        if (!improved) break;  // stalled
    }
    return {h_r, t, residual, residual <= tol_eff};
}

bool spans_zero(double a, double b, double c, double d) {
    const double lo = std::min(std::min(a, b), std::min(c, d));
    const double hi = std::max(std::max(a, b), std::max(c, d));
    return lo < 0.0 && hi > 0.0;
}

}  // namespace

std::vector<ZeroLocation> find_zeros(double beta_omega, const CouplingProfile& profile,
                                     const DriveParams& drive, const ZeroSearchRegion& region,
                                     int n_h_r, int n_t, double tol, bool hard_truncation) {
    validate_drive(drive);
    if (!(std::isfinite(region.h_r_lo) && std::isfinite(region.h_r_hi) &&
          std::isfinite(region.t_lo) && std::isfinite(region.t_hi)) ||
        !(region.h_r_lo < region.h_r_hi) || !(region.t_lo < region.t_hi))
        throw std::invalid_argument("find_zeros: region must be a finite non-empty rectangle");
    if (n_h_r < 16 || n_t < 16)
        throw std::invalid_argument("find_zeros: coarse grid must be at least 16x16");
    if (!(tol > 0.0)) throw std::invalid_argument("find_zeros: tol must be > 0");
    const double tol_eff = std::min(tol, 1e-8);  // converged always implies residual <= 1e-8

    const std::vector<double> hs = linspace({region.h_r_lo, region.h_r_hi, n_h_r});
    const std::vector<double> ts = linspace({region.t_lo, region.t_hi, n_t});
    std::vector<std::vector<std::complex<double>>> z(hs.size());
    for (std::size_t i = 0; i < hs.size(); ++i) {
        ThermalParams params{beta_omega, hs[i], profile, hard_truncation};
        const FockDistribution dist = gibbs_distribution(params).dist;  // aborts with offending h_r
        z[i].resize(ts.size());
        for (std::size_t j = 0; j < ts.size(); ++j) {
            std::complex<double> s = 0.0;
            for (int n = 0; n < dist.size(); ++n)
                s += dist[n] * std::exp(std::complex<double>(
                                   0.0, drive.omega_rabi * profile.xi[static_cast<std::size_t>(n)] * ts[j]));
            z[i][j] = s;
        }
    }

    std::vector<std::pair<double, double>> candidates;
    for (std::size_t i = 0; i + 1 < hs.size(); ++i) {
        for (std::size_t j = 0; j + 1 < ts.size(); ++j) {
            const auto a = z[i][j], b = z[i + 1][j], c = z[i][j + 1], d = z[i + 1][j + 1];
            if (spans_zero(a.real(), b.real(), c.real(), d.real()) &&
                spans_zero(a.imag(), b.imag(), c.imag(), d.imag()))
                candidates.emplace_back(0.5 * (hs[i] + hs[i + 1]), 0.5 * (ts[j] + ts[j + 1]));
        }
    }
    for (std::size_t i = 1; i + 1 < hs.size(); ++i) {
        for (std::size_t j = 1; j + 1 < ts.size(); ++j) {
            const double v = std::abs(z[i][j]);
            if (v < 0.1 && v <= std::abs(z[i - 1][j]) && v <= std::abs(z[i + 1][j]) &&
                v <= std::abs(z[i][j - 1]) && v <= std::abs(z[i][j + 1]))
                candidates.emplace_back(hs[i], ts[j]);
        }
    }

    std::vector<ZeroLocation> zeros;
    for (const auto& [h0, t0] : candidates) {
        const NewtonOutcome out = refine_zero(beta_omega, profile, drive, h0, t0, tol_eff);
        if (out.h_r < region.h_r_lo || out.h_r > region.h_r_hi || out.t < region.t_lo ||
            out.t > region.t_hi)
            continue;  // refinement left the requested region
        // unconverged candidates are only worth reporting when the residual at
        // least dipped below the candidate-detection threshold
        if (!out.converged && out.residual >= 0.1) continue;
        zeros.push_back({out.h_r, out.t, time_to_field(drive, out.t), out.residual, out.converged});
    }

    std::sort(zeros.begin(), zeros.end(), [](const ZeroLocation& a, const ZeroLocation& b) {
        if (a.residual != b.residual) return a.residual < b.residual;
        return std::make_pair(a.h_r, a.t) < std::make_pair(b.h_r, b.t);
    });
    const double dedup_h = 0.5 * (hs[1] - hs[0]);
    const double dedup_t = 0.5 * (ts[1] - ts[0]);
    std::vector<ZeroLocation> unique;
    for (const ZeroLocation& zl : zeros) {
        bool duplicate = false;
        for (const ZeroLocation& kept : unique)
            if (std::fabs(kept.h_r - zl.h_r) < dedup_h && std::fabs(kept.t - zl.t) < dedup_t) {
                duplicate = true;
                break;
            }
        if (!duplicate) unique.push_back(zl);  // best residual wins within a cell
    }
    std::sort(unique.begin(), unique.end(), [](const ZeroLocation& a, const ZeroLocation& b) {
        return std::make_pair(a.h_r, a.t) < std::make_pair(b.h_r, b.t);
    });
    return unique;
}

}  // namespace lyz
