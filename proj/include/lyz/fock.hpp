#pragma once

#include <string_view>
#include <vector>

namespace lyz {

/// Truncated probability vector over phonon number n = 0..n_max.
///
/// Diagonal weights are the universal state representation here: every
/// observable this library computes depends on the motional state through
/// them alone. Entries are non-negative and sum to one; the top bin must be
/// empty (p[n_max] <= 1e-10) unless the distribution was explicitly
/// constructed as truncated, in which case the cut is intentional.
class FockDistribution {
public:
    static constexpr double kTailThreshold = 1e-10;

    FockDistribution() = default;

    // Clamps tiny negatives (>= -1e-12), normalizes exactly, enforces the
    // tail condition unless `truncated`. `context` prefixes error messages.
    static FockDistribution from_weights(std::vector<double> weights, bool truncated = false,
                                         std::string_view context = {});

    static FockDistribution point_mass(int n, int n_max);

    // Same distribution on a larger support, upper entries zero; bit-preserving.
    static FockDistribution padded(const FockDistribution& dist, int n_max);

    const std::vector<double>& probs() const { return probs_; }
    double operator[](int n) const { return probs_[static_cast<std::size_t>(n)]; }
    int size() const { return static_cast<int>(probs_.size()); }
    int n_max() const { return size() - 1; }
    bool truncated() const { return truncated_; }

    double mean() const;
    double second_factorial_moment() const;  // <n(n-1)>
    double tail_beyond(int n) const;         // sum of p_k for k > n

private:
    std::vector<double> probs_;
    bool truncated_ = false;
};

}  // namespace lyz
