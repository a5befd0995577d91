#pragma once

#include <cstdint>
#include <vector>

#include "lyz/fock.hpp"
#include "lyz/grid.hpp"

namespace lyz {

/// Weighted mixture of coherent-state number diagonals. Coherent-state phases
/// never enter (only |alpha|^2 does), so displacements are real >= 0 and kept
/// sorted ascending as the canonical form; weights follow their alphas.
struct CoherentEnsemble {
    std::vector<double> weights;
    std::vector<double> alphas;

    int size() const { return static_cast<int>(weights.size()); }
};

CoherentEnsemble make_ensemble(std::vector<double> weights, std::vector<double> alphas);

/// Poisson number statistics of |alpha>: q_n = exp(-alpha^2) alpha^(2n) / n!,
/// evaluated in log space.
FockDistribution poisson_diag(double alpha, int n_max);

FockDistribution ensemble_distribution(const CoherentEnsemble& ens, int n_max);

/// Classical (Bhattacharyya) fidelity F(p, q) = (sum_n sqrt(p_n q_n))^2.
/// Symmetric, in [0, 1], F = 1 iff p = q.
double fidelity(const FockDistribution& p, const FockDistribution& q);

struct FitSettings {
    int n_starts = 32;
    int max_iters = 2000;  // Nelder-Mead iterations per start
    double tol = 1e-8;     // simplex diameter stop
};

struct FitResult {
    CoherentEnsemble ensemble;
    double fidelity = 0.0;
};

/// Multi-start Nelder-Mead over an unconstrained 2N-1 parameterization
/// (softmax logits for the weight simplex, alpha = s^2 for positivity).
/// Starts are seeded around sqrt(target mean) and sqrt of the target modes;
/// deterministic for a given seed, result in canonical form.
FitResult fit_ensemble(const FockDistribution& target, int n_components,
                       const FitSettings& settings, std::uint64_t seed);

/// Fidelity on a grid with alphas[index_a], alphas[index_b] replaced by the
/// axis values and everything else frozen. result[i][j] pairs axis_a[i] with
/// axis_b[j].
std::vector<std::vector<double>> fidelity_sensitivity(const FockDistribution& target,
                                                      const CoherentEnsemble& ens, int index_a,
                                                      int index_b, const AxisSpec& axis_a,
                                                      const AxisSpec& axis_b);

}  // namespace lyz
