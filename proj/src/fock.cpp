#include "lyz/fock.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "lyz/errors.hpp"

namespace lyz {

namespace {
constexpr double kNegativeClamp = -1e-12;

std::string prefixed(std::string_view context, const std::string& msg) {
    return context.empty() ? msg : std::string(context) + ": " + msg;
}
}  // namespace

FockDistribution FockDistribution::from_weights(std::vector<double> weights, bool truncated,
                                                std::string_view context) {
    if (weights.empty())
        throw std::invalid_argument(prefixed(context, "distribution must have at least one entry"));
    double sum = 0.0;
    for (double& w : weights) {
        if (!std::isfinite(w))
            throw std::invalid_argument(prefixed(context, "non-finite probability weight"));
        if (w < 0.0) {
            if (w < kNegativeClamp)
                throw std::invalid_argument(prefixed(context, "negative probability weight " +
                                                                  std::to_string(w)));
            w = 0.0;
        }
        sum += w;
    }
    if (sum <= 0.0)
        throw std::invalid_argument(prefixed(context, "probability weights sum to zero"));
    for (double& w : weights) w /= sum;
    if (!truncated && weights.back() > kTailThreshold)
        throw truncation_error(prefixed(
            context, "tail p[n_max] = " + std::to_string(weights.back()) +
                         " exceeds 1e-10; raise n_max"));
    FockDistribution dist;
    dist.probs_ = std::move(weights);
    dist.truncated_ = truncated;
    return dist;
}

FockDistribution FockDistribution::point_mass(int n, int n_max) {
    if (n < 0 || n_max < n)
        throw std::invalid_argument("point_mass requires 0 <= n <= n_max");
    std::vector<double> w(static_cast<std::size_t>(n_max) + 1, 0.0);
    w[static_cast<std::size_t>(n)] = 1.0;
    // a point mass away from the top bin passes the tail gate on its own
    return from_weights(std::move(w), n == n_max);
}

FockDistribution FockDistribution::padded(const FockDistribution& dist, int n_max) {
    if (n_max < dist.n_max())
        throw std::invalid_argument("padded: n_max must not shrink the distribution");
    FockDistribution out;
    out.probs_ = dist.probs_;
    out.probs_.resize(static_cast<std::size_t>(n_max) + 1, 0.0);
    out.truncated_ = dist.truncated_;
    return out;
}

double FockDistribution::mean() const {
    double m = 0.0;
    for (std::size_t n = 0; n < probs_.size(); ++n) m += static_cast<double>(n) * probs_[n];
    return m;
}

double FockDistribution::second_factorial_moment() const {
    double m = 0.0;
    for (std::size_t n = 2; n < probs_.size(); ++n)
        m += static_cast<double>(n) * static_cast<double>(n - 1) * probs_[n];
    return m;
}

double FockDistribution::tail_beyond(int n) const {
    double t = 0.0;
    for (std::size_t k = static_cast<std::size_t>(n) + 1; k < probs_.size(); ++k) t += probs_[k];
    return t;
}

}  // namespace lyz
