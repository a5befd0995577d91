#include "lyz/noise.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "lyz/errors.hpp"
#include "lyz/rng.hpp"

namespace lyz {

namespace {

// Birth-death derivative on p[0..N] with the upward rate out of the top bin
// dropped (conservative truncation). leak_rate reports the suppressed flux
// gamma (N+1) p_N so the caller can integrate it as a tail monitor.
void birth_death_derivative(const std::vector<double>& p, double gamma, std::vector<double>& dp,
                            double& leak_rate) {
    const std::size_t count = p.size();
    for (std::size_t n = 0; n < count; ++n) {
        const double dn = static_cast<double>(n);
        double rate = -gamma * dn * p[n];                                      // n -> n-1 out
        if (n + 1 < count) rate -= gamma * (dn + 1.0) * p[n];                  // n -> n+1 out
        if (n > 0) rate += gamma * dn * p[n - 1];                              // n-1 -> n in
        if (n + 1 < count) rate += gamma * (dn + 1.0) * p[n + 1];              // n+1 -> n in
        dp[n] = rate;
    }
    leak_rate = gamma * static_cast<double>(count) * p[count - 1];
}

struct HeatingIntegrator {
    double gamma;
    std::vector<double> p;
    double leaked = 0.0;
    double now = 0.0;
    std::vector<double> k1, k2, k3, k4, scratch;
    double lk1 = 0, lk2 = 0, lk3 = 0, lk4 = 0;

    HeatingIntegrator(std::vector<double> initial, double gamma_in)
        : gamma(gamma_in), p(std::move(initial)) {
        k1.resize(p.size());
        k2.resize(p.size());
        k3.resize(p.size());
        k4.resize(p.size());
        scratch.resize(p.size());
    }

    // RK4 with h <= 0.1 / (gamma (2N+1)); the spectral radius of the truncated
    // generator is about gamma (2N+1), so this keeps the explicit step stable.
    void advance_to(double t_target) {
        const double span = t_target - now;
        if (span <= 0.0 || gamma == 0.0) {
            now = t_target;
            return;
        }
        const double n_top = static_cast<double>(p.size() - 1);
        const double h_max = 0.1 / (gamma * (2.0 * n_top + 1.0));
        const int steps = std::max(1, static_cast<int>(std::ceil(span / h_max)));
        const double h = span / steps;
        for (int s = 0; s < steps; ++s) {
            birth_death_derivative(p, gamma, k1, lk1);
            for (std::size_t n = 0; n < p.size(); ++n) scratch[n] = p[n] + 0.5 * h * k1[n];
            birth_death_derivative(scratch, gamma, k2, lk2);
            for (std::size_t n = 0; n < p.size(); ++n) scratch[n] = p[n] + 0.5 * h * k2[n];
            birth_death_derivative(scratch, gamma, k3, lk3);
            for (std::size_t n = 0; n < p.size(); ++n) scratch[n] = p[n] + h * k3[n];
            birth_death_derivative(scratch, gamma, k4, lk4);
            for (std::size_t n = 0; n < p.size(); ++n)
                p[n] += h / 6.0 * (k1[n] + 2.0 * k2[n] + 2.0 * k3[n] + k4[n]);
            leaked += h / 6.0 * (lk1 + 2.0 * lk2 + 2.0 * lk3 + lk4);
        }
        now = t_target;
    }

    FockDistribution snapshot(const std::string& context) const {
        if (leaked > 1e-8)
            throw truncation_error(context + ": tail mass beyond n_max_evolve reached " +
                                   std::to_string(leaked) + "; raise n_max_evolve");
        double sum = 0.0;
        std::vector<double> out(p.size());
        for (std::size_t n = 0; n < p.size(); ++n) {
            if (p[n] < -1e-12)
                throw numerical_error(context + ": population went negative beyond tolerance");
            out[n] = std::max(p[n], 0.0);
            sum += out[n];
        }
        if (std::fabs(sum - 1.0) > 1e-9)
            throw numerical_error(context + ": probability drifted by " +
                                  std::to_string(sum - 1.0));
        // heating owns its 1e-8 flux gate; mark truncated so the generic
        // 1e-10 tail gate does not re-fire on legitimately heated states
        return FockDistribution::from_weights(std::move(out), true, context);
    }
};

std::vector<double> padded(const FockDistribution& dist, int n_max_evolve) {
    std::vector<double> p(static_cast<std::size_t>(n_max_evolve) + 1, 0.0);
    for (int n = 0; n < dist.size(); ++n) p[static_cast<std::size_t>(n)] = dist[n];
    return p;
}

void validate_heating_args(const FockDistribution& dist, double gamma, double t,
                           int n_max_evolve) {
    if (!std::isfinite(gamma) || gamma < 0.0)
        throw std::invalid_argument("heating: gamma must be finite and >= 0");
    if (!std::isfinite(t) || t < 0.0)
        throw std::invalid_argument("heating: t must be finite and >= 0");
    if (n_max_evolve < dist.n_max())
        throw std::invalid_argument("heating: n_max_evolve must give headroom (>= dist n_max)");
}

}  // namespace

FockDistribution heating_evolve(const FockDistribution& dist, double gamma, double t,
                                int n_max_evolve) {
    validate_heating_args(dist, gamma, t, n_max_evolve);
    if (gamma == 0.0 || t == 0.0) return FockDistribution::padded(dist, n_max_evolve);
    HeatingIntegrator integ(padded(dist, n_max_evolve), gamma);
    integ.advance_to(t);
    return integ.snapshot("heating_evolve");
}

std::vector<std::complex<double>> heating_deviance(const FockDistribution& dist, double gamma,
                                                   const CouplingProfile& profile,
                                                   const DriveParams& drive,
                                                   std::span<const double> times) {
    const int n_max_evolve = profile.n_max();
    validate_heating_args(dist, gamma, times.empty() ? 0.0 : times.back(), n_max_evolve);
    for (std::size_t k = 0; k < times.size(); ++k)
        if (!std::isfinite(times[k]) || times[k] < 0.0 || (k > 0 && times[k] < times[k - 1]))
            throw std::invalid_argument("heating_deviance: times must be non-decreasing and >= 0");

    std::vector<std::complex<double>> deviance(times.size(), 0.0);
    if (gamma == 0.0) return deviance;  // nothing heats, exactly
    const std::vector<double> initial = padded(dist, n_max_evolve);
    HeatingIntegrator integ(initial, gamma);
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (times[k] == 0.0) continue;  // no time to heat
        integ.advance_to(times[k]);
        const FockDistribution heated = integ.snapshot("heating_deviance");
        std::complex<double> dz = 0.0;
        for (std::size_t n = 0; n < initial.size(); ++n)
            dz += (heated[static_cast<int>(n)] - initial[n]) *
                  std::exp(std::complex<double>(0.0, drive.omega_rabi * profile.xi[n] * times[k]));
        deviance[k] = dz;
    }
    return deviance;
}

std::vector<double> detuning_samples(const NoiseConfig& cfg) {
    if (cfg.n_runs < 1) throw std::invalid_argument("NoiseConfig: n_runs must be >= 1");
    if (!std::isfinite(cfg.sigma_delta) || cfg.sigma_delta < 0.0)
        throw std::invalid_argument("NoiseConfig: sigma_delta must be finite and >= 0");
    std::vector<double> samples(static_cast<std::size_t>(cfg.n_runs));
    for (int k = 0; k < cfg.n_runs; ++k) {
        std::mt19937_64 gen(rng::substream_seed(cfg.seed, static_cast<std::uint64_t>(k)));
        samples[static_cast<std::size_t>(k)] = cfg.sigma_delta * rng::standard_normal(gen);
    }
    return samples;
}

SpinTrajectory detuning_average(const FockDistribution& dist, const CouplingProfile& profile,
                                const DriveParams& drive, const NoiseConfig& cfg,
                                std::span<const double> times) {
    if (cfg.n_runs < 1) throw std::invalid_argument("NoiseConfig: n_runs must be >= 1");
    // all runs are the same run at zero width; the mean is that run exactly
    if (cfg.sigma_delta == 0.0) return detuned_spin(dist, profile, drive, times);
    const std::vector<double> samples = detuning_samples(cfg);
    SpinTrajectory mean;
    mean.times.assign(times.begin(), times.end());
    mean.sigma_z.assign(times.size(), 0.0);
    mean.sigma_y.assign(times.size(), 0.0);
    for (double delta : samples) {
        DriveParams run_drive = drive;
        run_drive.detuning = drive.detuning + delta;
        const SpinTrajectory traj = detuned_spin(dist, profile, run_drive, times);
        for (std::size_t k = 0; k < times.size(); ++k) {
            mean.sigma_z[k] += traj.sigma_z[k];
            mean.sigma_y[k] += traj.sigma_y[k];
        }
    }
    const double inv = 1.0 / static_cast<double>(cfg.n_runs);
    for (std::size_t k = 0; k < times.size(); ++k) {
        mean.sigma_z[k] *= inv;
        mean.sigma_y[k] *= inv;
    }
    return mean;
}

NoisyGrid noisy_partition_grid(double beta_omega, const CouplingProfile& profile,
                               const DriveParams& drive, const NoiseConfig& cfg,
                               const ZeroSearchRegion& region, int n_h_r, int n_t) {
    if (n_h_r < 1 || n_t < 1)
        throw std::invalid_argument("noisy_partition_grid: counts must be >= 1");
    if (!(region.h_r_lo <= region.h_r_hi) || !(region.t_lo <= region.t_hi) || region.t_lo < 0.0)
        throw std::invalid_argument("noisy_partition_grid: invalid region");

    NoisyGrid out;
    out.noise = cfg;
    out.drive = drive;
    out.t_axis = linspace({region.t_lo, region.t_hi, n_t});
    out.grid.h_r_axis = linspace({region.h_r_lo, region.h_r_hi, n_h_r});
    out.grid.beta_h_i_axis.resize(out.t_axis.size());
    for (std::size_t j = 0; j < out.t_axis.size(); ++j)
        out.grid.beta_h_i_axis[j] = time_to_field(drive, out.t_axis[j]);
    out.grid.beta_omega = beta_omega;
    out.grid.eta = profile.eta;
    out.grid.n_max = profile.n_max();

    const std::vector<double> samples = detuning_samples(cfg);
    const std::size_t n_states = profile.xi.size();
    // per-(run, n) detuned Rabi tables; they depend on neither h_r nor t
    std::vector<double> frac_z(samples.size() * n_states);   // Delta^2 / X^2
    std::vector<double> frac_c(samples.size() * n_states);   // Omega_n^2 / X^2
    std::vector<double> frac_y(samples.size() * n_states);   // Omega_n / X
    std::vector<double> x_freq(samples.size() * n_states);   // X
    for (std::size_t k = 0; k < samples.size(); ++k) {
        const double delta = drive.detuning + samples[k];
        for (std::size_t n = 0; n < n_states; ++n) {
            const double om = drive.omega_rabi * profile.xi[n];
            const double x = std::sqrt(delta * delta + om * om);
            const std::size_t idx = k * n_states + n;
            if (x == 0.0) {
                frac_z[idx] = 1.0;  // frozen component
                frac_c[idx] = 0.0;
                frac_y[idx] = 0.0;
                x_freq[idx] = 0.0;
            } else {
                frac_z[idx] = delta * delta / (x * x);
                frac_c[idx] = om * om / (x * x);
                frac_y[idx] = om / x;
                x_freq[idx] = x;
            }
        }
    }

    const double inv_runs = 1.0 / static_cast<double>(samples.size());
    out.grid.values.resize(out.grid.h_r_axis.size());
    for (std::size_t i = 0; i < out.grid.h_r_axis.size(); ++i) {
        ThermalParams params{beta_omega, out.grid.h_r_axis[i], profile, false};
        const FockDistribution dist = gibbs_distribution(params).dist;
        HeatingIntegrator integ(padded(dist, profile.n_max()), cfg.gamma);
        auto& row = out.grid.values[i];
        row.resize(out.t_axis.size());
        for (std::size_t j = 0; j < out.t_axis.size(); ++j) {
            const double t = out.t_axis[j];
            integ.advance_to(t);
            const FockDistribution heated = integ.snapshot("noisy_partition_grid");
            double sz = 0.0, sy = 0.0;
            for (std::size_t k = 0; k < samples.size(); ++k) {
                const std::size_t base = k * n_states;
                for (std::size_t n = 0; n < n_states; ++n) {
                    const double pn = heated[static_cast<int>(n)];
                    const double xt = x_freq[base + n] * t;
                    sz += pn * (frac_z[base + n] + frac_c[base + n] * std::cos(xt));
                    sy -= pn * frac_y[base + n] * std::sin(xt);
                }
            }
            row[j] = std::complex<double>(sz * inv_runs, sy * inv_runs);
        }
    }
    return out;
}

}  // namespace lyz
