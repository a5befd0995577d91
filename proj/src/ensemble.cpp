#include "lyz/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "lyz/errors.hpp"
#include "lyz/rng.hpp"

namespace lyz {

namespace {
constexpr double kAlphaSqFloor = 1e-300;  // below this the component is the vacuum
}

CoherentEnsemble make_ensemble(std::vector<double> weights, std::vector<double> alphas) {
    if (weights.empty() || weights.size() != alphas.size())
        throw std::invalid_argument("make_ensemble: weights and alphas must match and be non-empty");
    double sum = 0.0;
    for (double w : weights) {
        if (!std::isfinite(w) || w < 0.0)
            throw std::invalid_argument("make_ensemble: weights must be finite and >= 0");
        sum += w;
    }
    if (std::fabs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("make_ensemble: weights must sum to 1 within 1e-12");
    for (double a : alphas)
        if (!std::isfinite(a) || a < 0.0)
            throw std::invalid_argument("make_ensemble: alphas must be finite and >= 0");
    for (double& w : weights) w /= sum;
    // canonical form: alphas ascending, weights following their components
    std::vector<std::size_t> order(weights.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return alphas[a] < alphas[b]; });
    CoherentEnsemble ens;
    ens.weights.reserve(weights.size());
    ens.alphas.reserve(alphas.size());
    for (std::size_t idx : order) {
        ens.weights.push_back(weights[idx]);
        ens.alphas.push_back(alphas[idx]);
    }
    return ens;
}

namespace {

// Raw (unnormalized-tail) Poisson mixture over n = 0..n_max. The objective
// works on these directly so that tail mass lost to truncation scores as
// infidelity instead of throwing mid-optimization.
struct MixtureEval {
    std::vector<double> log_factorial;

    explicit MixtureEval(int n_max) : log_factorial(static_cast<std::size_t>(n_max) + 1) {
        for (std::size_t n = 0; n < log_factorial.size(); ++n)
            log_factorial[n] = std::lgamma(static_cast<double>(n) + 1.0);
    }

    void accumulate(std::vector<double>& q, double weight, double alpha_sq) const {
        if (alpha_sq < kAlphaSqFloor) {
            q[0] += weight;
            return;
        }
        const double log_a2 = std::log(alpha_sq);
        for (std::size_t n = 0; n < q.size(); ++n)
            q[n] += weight * std::exp(-alpha_sq + static_cast<double>(n) * log_a2 - log_factorial[n]);
    }

    double bhattacharyya_sq(const std::vector<double>& p, const std::vector<double>& q) const {
        double bc = 0.0;
        for (std::size_t n = 0; n < p.size(); ++n) bc += std::sqrt(p[n] * q[n]);
        return bc * bc;
    }
};

struct Decoded {
    std::vector<double> weights;
    std::vector<double> alphas;
};

// theta = [logit_1 .. logit_{N-1}, s_1 .. s_N]; weights = softmax(logits, 0),
// alpha_i = s_i^2.
Decoded decode(const std::vector<double>& theta, int n_comp) {
    Decoded d;
    d.weights.resize(static_cast<std::size_t>(n_comp));
    d.alphas.resize(static_cast<std::size_t>(n_comp));
    double max_logit = 0.0;
    for (int i = 0; i + 1 < n_comp; ++i) max_logit = std::max(max_logit, theta[static_cast<std::size_t>(i)]);
    double sum = 0.0;
    for (int i = 0; i < n_comp; ++i) {
        const double logit = (i + 1 < n_comp) ? theta[static_cast<std::size_t>(i)] : 0.0;
        d.weights[static_cast<std::size_t>(i)] = std::exp(logit - max_logit);
        sum += d.weights[static_cast<std::size_t>(i)];
    }
    for (double& w : d.weights) w /= sum;
    for (int i = 0; i < n_comp; ++i) {
        const double s = theta[static_cast<std::size_t>(n_comp - 1 + i)];
        d.alphas[static_cast<std::size_t>(i)] = s * s;
    }
    return d;
}

// Standard Nelder-Mead (reflection 1, expansion 2, contraction 1/2,
// shrink 1/2) minimizing f; stops when the simplex diameter drops below tol.
template <typename F>
std::pair<std::vector<double>, double> nelder_mead(const F& f, std::vector<double> x0,
                                                   double initial_step, int max_iters, double tol) {
    const std::size_t dim = x0.size();
    std::vector<std::vector<double>> xs(dim + 1, x0);
    std::vector<double> fs(dim + 1);
    for (std::size_t i = 0; i < dim; ++i) xs[i + 1][i] += initial_step;
    for (std::size_t i = 0; i <= dim; ++i) fs[i] = f(xs[i]);

    std::vector<std::size_t> order(dim + 1);
    for (int iter = 0; iter < max_iters; ++iter) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return fs[a] < fs[b]; });
        {
            std::vector<std::vector<double>> xs2(dim + 1);
            std::vector<double> fs2(dim + 1);
            for (std::size_t i = 0; i <= dim; ++i) {
                xs2[i] = xs[order[i]];
                fs2[i] = fs[order[i]];
            }
            xs.swap(xs2);
            fs.swap(fs2);
        }
        double diameter = 0.0;
        for (std::size_t i = 1; i <= dim; ++i)
            for (std::size_t k = 0; k < dim; ++k)
                diameter = std::max(diameter, std::fabs(xs[i][k] - xs[0][k]));
        if (diameter < tol) break;

        std::vector<double> centroid(dim, 0.0);
        for (std::size_t i = 0; i < dim; ++i)
            for (std::size_t k = 0; k < dim; ++k) centroid[k] += xs[i][k] / static_cast<double>(dim);
        auto along = [&](double coef) {
            std::vector<double> y(dim);
            for (std::size_t k = 0; k < dim; ++k) y[k] = centroid[k] + coef * (xs[dim][k] - centroid[k]);
            return y;
        };

        const std::vector<double> reflected = along(-1.0);
        const double f_reflected = f(reflected);
        if (f_reflected < fs[0]) {
            const std::vector<double> expanded = along(-2.0);
            const double f_expanded = f(expanded);
            if (f_expanded < f_reflected) {
                xs[dim] = expanded;
                fs[dim] = f_expanded;
            } else {
                xs[dim] = reflected;
                fs[dim] = f_reflected;
            }
        } else if (f_reflected < fs[dim - 1]) {
            xs[dim] = reflected;
            fs[dim] = f_reflected;
        } else {
            const std::vector<double> contracted = along(f_reflected < fs[dim] ? -0.5 : 0.5);
            const double f_contracted = f(contracted);
            if (f_contracted < std::min(f_reflected, fs[dim])) {
                xs[dim] = contracted;
                fs[dim] = f_contracted;
            } else {
                for (std::size_t i = 1; i <= dim; ++i) {
                    for (std::size_t k = 0; k < dim; ++k)
                        xs[i][k] = xs[0][k] + 0.5 * (xs[i][k] - xs[0][k]);
                    fs[i] = f(xs[i]);
                }
            }
        }
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i <= dim; ++i)
        if (fs[i] < fs[best]) best = i;
    return {xs[best], fs[best]};
}

std::vector<double> moment_centers(const FockDistribution& target) {
    std::vector<double> centers{std::sqrt(std::max(target.mean(), 0.0))};
    const auto& p = target.probs();
    if (p.size() >= 2 && p[0] > p[1]) centers.push_back(0.0);
    for (std::size_t n = 1; n + 1 < p.size(); ++n)
        if (p[n] > p[n - 1] && p[n] > p[n + 1] && p[n] > 1e-3)
            centers.push_back(std::sqrt(static_cast<double>(n)));
    std::sort(centers.begin(), centers.end());
    return centers;
}

}  // namespace

FockDistribution poisson_diag(double alpha, int n_max) {
    if (!std::isfinite(alpha) || alpha < 0.0)
        throw std::invalid_argument("poisson_diag: alpha must be finite and >= 0");
    if (n_max < 0) throw std::invalid_argument("poisson_diag: n_max must be >= 0");
    MixtureEval eval(n_max);
    std::vector<double> q(static_cast<std::size_t>(n_max) + 1, 0.0);
    eval.accumulate(q, 1.0, alpha * alpha);
    return FockDistribution::from_weights(std::move(q), false,
                                          "poisson_diag(alpha=" + std::to_string(alpha) + ")");
}

FockDistribution ensemble_distribution(const CoherentEnsemble& ens, int n_max) {
    if (ens.size() < 1 || ens.weights.size() != ens.alphas.size())
        throw std::invalid_argument("ensemble_distribution: invalid ensemble");
    if (n_max < 0) throw std::invalid_argument("ensemble_distribution: n_max must be >= 0");
    MixtureEval eval(n_max);
    std::vector<double> q(static_cast<std::size_t>(n_max) + 1, 0.0);
    for (int i = 0; i < ens.size(); ++i) {
        const double a = ens.alphas[static_cast<std::size_t>(i)];
        eval.accumulate(q, ens.weights[static_cast<std::size_t>(i)], a * a);
    }
    return FockDistribution::from_weights(std::move(q), false, "ensemble_distribution");
}

double fidelity(const FockDistribution& p, const FockDistribution& q) {
    if (p.size() != q.size())
        throw std::invalid_argument("fidelity: distributions must have equal length");
    double bc = 0.0;
    for (int n = 0; n < p.size(); ++n) bc += std::sqrt(p[n] * q[n]);
    return std::min(bc * bc, 1.0);  // roundoff guard
}

FitResult fit_ensemble(const FockDistribution& target, int n_components,
                       const FitSettings& settings, std::uint64_t seed) {
    if (n_components < 1) throw std::invalid_argument("fit_ensemble: n_components must be >= 1");
    if (n_components > 8)
        throw std::invalid_argument("fit_ensemble: n_components > 8 is not supported");
    if (settings.n_starts < 1 || settings.max_iters < 1 || !(settings.tol > 0.0))
        throw std::invalid_argument("fit_ensemble: invalid optimizer settings");

    const int dim = 2 * n_components - 1;
    MixtureEval eval(target.n_max());
    std::vector<double> q(target.probs().size());
    const auto objective = [&](const std::vector<double>& theta) {
        const Decoded d = decode(theta, n_components);
        std::fill(q.begin(), q.end(), 0.0);
        for (int i = 0; i < n_components; ++i) {
            const double alpha = d.alphas[static_cast<std::size_t>(i)];
            eval.accumulate(q, d.weights[static_cast<std::size_t>(i)], alpha * alpha);
        }
        return 1.0 - eval.bhattacharyya_sq(target.probs(), q);
    };

    const std::vector<double> centers = moment_centers(target);
    double best_value = std::numeric_limits<double>::infinity();
    std::vector<double> best_theta;
    for (int start = 0; start < settings.n_starts; ++start) {
        std::mt19937_64 gen(rng::substream_seed(seed, static_cast<std::uint64_t>(start)));
        std::vector<double> theta(static_cast<std::size_t>(dim), 0.0);
        for (int i = 0; i < n_components; ++i) {
            double alpha;
            if (start == 0) {
                // deterministic moment-matched start: spread over the centers
                alpha = centers[static_cast<std::size_t>(i) % centers.size()];
            } else {
                const double pick = rng::uniform_01(gen) * static_cast<double>(centers.size());
                const std::size_t c = std::min(centers.size() - 1, static_cast<std::size_t>(pick));
                alpha = std::max(0.0, centers[c] + (2.0 * rng::uniform_01(gen) - 1.0));
            }
            theta[static_cast<std::size_t>(n_components - 1 + i)] = std::sqrt(alpha);
        }
        if (start != 0)
            for (int i = 0; i + 1 < n_components; ++i)
                theta[static_cast<std::size_t>(i)] = 2.0 * rng::uniform_01(gen) - 1.0;

        auto [x, value] = nelder_mead(objective, std::move(theta), 0.25, settings.max_iters,
                                      settings.tol);
        if (value < best_value) {
            best_value = value;
            best_theta = std::move(x);
        } else if (value == best_value && !best_theta.empty()) {
            // deterministic tie break: lexicographically smaller canonical form
            const Decoded a = decode(x, n_components);
            const Decoded b = decode(best_theta, n_components);
            if (make_ensemble(a.weights, a.alphas).alphas < make_ensemble(b.weights, b.alphas).alphas)
                best_theta = std::move(x);
        }
    }

    const Decoded d = decode(best_theta, n_components);
    FitResult result;
    result.ensemble = make_ensemble(d.weights, d.alphas);
    result.fidelity = fidelity(target, ensemble_distribution(result.ensemble, target.n_max()));
    return result;
}

std::vector<std::vector<double>> fidelity_sensitivity(const FockDistribution& target,
                                                      const CoherentEnsemble& ens, int index_a,
                                                      int index_b, const AxisSpec& axis_a,
                                                      const AxisSpec& axis_b) {
    if (index_a < 0 || index_b < 0 || index_a >= ens.size() || index_b >= ens.size() ||
        index_a == index_b)
        throw std::invalid_argument("fidelity_sensitivity: indices must be distinct and in range");
    const std::vector<double> as = linspace(axis_a);
    const std::vector<double> bs = linspace(axis_b);
    if (as.front() < 0.0 || bs.front() < 0.0)
        throw std::invalid_argument("fidelity_sensitivity: displacement axes must be >= 0");
    std::vector<std::vector<double>> result(as.size(), std::vector<double>(bs.size()));
    CoherentEnsemble probe = ens;  // weights and remaining alphas stay frozen
    for (std::size_t i = 0; i < as.size(); ++i) {
        for (std::size_t j = 0; j < bs.size(); ++j) {
            probe.alphas[static_cast<std::size_t>(index_a)] = as[i];
            probe.alphas[static_cast<std::size_t>(index_b)] = bs[j];
            result[i][j] = fidelity(target, ensemble_distribution(probe, target.n_max()));
        }
    }
    return result;
}

}  // namespace lyz
