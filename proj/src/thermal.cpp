#include "lyz/thermal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "lyz/errors.hpp"

namespace lyz {

namespace {

void validate(const ThermalParams& params) {
    if (!std::isfinite(params.beta_omega) || params.beta_omega <= 0.0)
        throw std::invalid_argument("ThermalParams: beta_omega must be finite and > 0");
    if (!std::isfinite(params.h_r))
        throw std::invalid_argument("ThermalParams: h_r must be finite");
    if (params.profile.xi.empty())
        throw std::invalid_argument("ThermalParams: coupling profile is empty");
}

}  // namespace

GibbsState gibbs_distribution(const ThermalParams& params) {
    validate(params);
    const auto& xi = params.profile.xi;
    const std::size_t count = xi.size();
    std::vector<double> exponents(count);
    double e_min = std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n < count; ++n) {
        exponents[n] = params.beta_omega * (static_cast<double>(n) + params.h_r * xi[n]);
        e_min = std::min(e_min, exponents[n]);
    }
    // log-sum-exp shift: large beta_omega or h_r drives raw exponents past
    // the underflow range
    std::vector<double> weights(count);
    double sum = 0.0;
    for (std::size_t n = 0; n < count; ++n) {
        weights[n] = std::exp(-(exponents[n] - e_min));
        sum += weights[n];
    }
    const double log_z0 = -e_min + std::log(sum);
    std::string context = "gibbs_distribution(beta_omega=" + std::to_string(params.beta_omega) +
                          ", h_r=" + std::to_string(params.h_r) +
                          ", eta=" + std::to_string(params.profile.eta) +
                          ", n_max=" + std::to_string(params.profile.n_max()) + ")";
    GibbsState state;
    state.dist = FockDistribution::from_weights(std::move(weights), params.hard_truncation, context);
    state.log_z0 = log_z0;
    state.z0 = std::exp(log_z0);
    return state;
}

std::complex<double> partition_value(const FockDistribution& dist, const CouplingProfile& profile,
                                     double beta_h_i) {
    if (dist.size() != profile.n_max() + 1)
        throw std::invalid_argument("partition_value: distribution and profile lengths differ");
    if (!std::isfinite(beta_h_i))
        throw std::invalid_argument("partition_value: beta_h_i must be finite");
    std::complex<double> z = 0.0;
    for (int n = 0; n < dist.size(); ++n)
        z += dist[n] * std::exp(std::complex<double>(0.0, -beta_h_i * profile.xi[static_cast<std::size_t>(n)]));
    return z;
}

std::complex<double> partition_value(const ThermalParams& params, double beta_h_i) {
    return partition_value(gibbs_distribution(params).dist, params.profile, beta_h_i);
}

ComplexFieldGrid partition_grid(double beta_omega, const CouplingProfile& profile,
                                const AxisSpec& h_r_axis, const AxisSpec& beta_h_i_axis,
                                bool hard_truncation) {
    ComplexFieldGrid grid;
    grid.h_r_axis = linspace(h_r_axis);
    grid.beta_h_i_axis = linspace(beta_h_i_axis);
    grid.beta_omega = beta_omega;
    grid.eta = profile.eta;
    grid.n_max = profile.n_max();
    grid.values.resize(grid.h_r_axis.size());
    for (std::size_t i = 0; i < grid.h_r_axis.size(); ++i) {
        ThermalParams params{beta_omega, grid.h_r_axis[i], profile, hard_truncation};
        const FockDistribution dist = gibbs_distribution(params).dist;
        auto& row = grid.values[i];
        row.resize(grid.beta_h_i_axis.size());
        for (std::size_t j = 0; j < grid.beta_h_i_axis.size(); ++j)
            row[j] = partition_value(dist, profile, grid.beta_h_i_axis[j]);
    }
    return grid;
}

}  // namespace lyz
