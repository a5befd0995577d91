#include <doctest.h>

#include <cmath>
#include <random>

#include "lyz/ensemble.hpp"
#include "lyz/errors.hpp"
#include "lyz/thermal.hpp"

using lyz::AxisSpec;
using lyz::CoherentEnsemble;
using lyz::coupling_profile;
using lyz::ensemble_distribution;
using lyz::fidelity;
using lyz::fidelity_sensitivity;
using lyz::fit_ensemble;
using lyz::FitSettings;
using lyz::FockDistribution;
using lyz::gibbs_distribution;
using lyz::make_ensemble;
using lyz::poisson_diag;
using lyz::ThermalParams;

namespace {

FockDistribution gibbs_target(double beta_omega, double h_r, double eta = 0.47, int n_max = 63) {
    return gibbs_distribution(ThermalParams{beta_omega, h_r, coupling_profile(eta, n_max), false})
        .dist;
}

}  // namespace

TEST_CASE("vacuum statistics are a point mass") {
    const auto q = poisson_diag(0.0, 20);
    CHECK(q[0] == 1.0);
    for (int n = 1; n <= 20; ++n) CHECK(q[n] == 0.0);
}

TEST_CASE("poisson mean equals alpha squared") {
    CHECK(poisson_diag(2.0, 63).mean() == doctest::Approx(4.0).epsilon(1e-9));
}

TEST_CASE("frozen poisson weight at n = 10, alpha = 3.3") {
    // exp(-10.89) 10.89^10 / 10! evaluated in extended precision
    CHECK(poisson_diag(3.3, 63)[10] == doctest::Approx(0.12051715107262684).epsilon(1e-12));
}

TEST_CASE("poisson tail gate fires when the truncation bites") {
    CHECK_THROWS_AS(poisson_diag(7.0, 30), lyz::truncation_error);
}

TEST_CASE("degenerate mixtures collapse to a single component") {
    const auto single = poisson_diag(1.4, 40);
    const auto mixed = ensemble_distribution(make_ensemble({0.5, 0.5}, {1.4, 1.4}), 40);
    for (int n = 0; n <= 40; ++n) CHECK(mixed[n] == doctest::Approx(single[n]).epsilon(1e-15));
    const auto vacuum = ensemble_distribution(make_ensemble({1.0}, {0.0}), 20);
    CHECK(vacuum[0] == 1.0);
}

TEST_CASE("mixtures are linear in the weights") {
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const double lambda = unif(gen);
        const double a1 = 3.0 * unif(gen), a2 = 3.0 * unif(gen);
        const auto d1 = ensemble_distribution(make_ensemble({1.0}, {a1}), 63);
        const auto d2 = ensemble_distribution(make_ensemble({1.0}, {a2}), 63);
        const auto mix = ensemble_distribution(make_ensemble({lambda, 1.0 - lambda},
                                                             {a1, a2}), 63);
        for (int n = 0; n <= 63; ++n)
            CHECK(mix[n] == doctest::Approx(lambda * d1[n] + (1.0 - lambda) * d2[n]).epsilon(1e-12));
    }
}

TEST_CASE("fidelity basics") {
    const auto p = gibbs_target(0.5, 7.0);
    CHECK(fidelity(p, p) == doctest::Approx(1.0).epsilon(1e-12));
    const auto a = FockDistribution::point_mass(2, 10);
    const auto b = FockDistribution::point_mass(7, 10);
    CHECK(fidelity(a, b) == 0.0);
    CHECK_THROWS_AS(fidelity(p, a), std::invalid_argument);
}

TEST_CASE("frozen fidelity between a geometric state and a coherent state") {
    const auto p = gibbs_target(0.5, 0.0, 0.0);
    const auto q = poisson_diag(1.0, 63);
    // direct long-double summation oracle
    CHECK(fidelity(p, q) == doctest::Approx(0.91443719134953180).epsilon(1e-10));
    CHECK(fidelity(q, p) == fidelity(p, q));
}

TEST_CASE("fidelity stays within bounds on random pairs") {
    std::mt19937_64 gen(17);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> w1(32), w2(32);
        for (int n = 0; n < 32; ++n) {
            w1[n] = unif(gen);
            w2[n] = unif(gen);
        }
        w1[31] = 0.0;
        w2[31] = 0.0;
        const auto p = FockDistribution::from_weights(w1);
        const auto q = FockDistribution::from_weights(w2);
        const double f = fidelity(p, q);
        CHECK(f >= 0.0);
        CHECK(f <= 1.0);
        CHECK(f == fidelity(q, p));
    }
}

TEST_CASE("single-component fit recovers an exactly representable target") {
    const auto target = poisson_diag(2.0, 63);
    const auto fit = fit_ensemble(target, 1, FitSettings{}, 42);
    CHECK(fit.ensemble.alphas[0] == doctest::Approx(2.0).epsilon(1e-3));
    CHECK(fit.fidelity >= 1.0 - 1e-8);
}

TEST_CASE("fits are deterministic given the seed") {
    const auto target = gibbs_target(0.5, 7.0);
    const auto a = fit_ensemble(target, 3, FitSettings{}, 12345);
    const auto b = fit_ensemble(target, 3, FitSettings{}, 12345);
    CHECK(a.fidelity == b.fidelity);
    for (int i = 0; i < 3; ++i) {
        CHECK(a.ensemble.alphas[i] == b.ensemble.alphas[i]);
        CHECK(a.ensemble.weights[i] == b.ensemble.weights[i]);
    }
    CHECK(std::is_sorted(a.ensemble.alphas.begin(), a.ensemble.alphas.end()));
}

TEST_CASE("component count limits") {
    const auto target = poisson_diag(1.0, 20);
    CHECK_THROWS_AS(fit_ensemble(target, 0, FitSettings{}, 1), std::invalid_argument);
    CHECK_THROWS_AS(fit_ensemble(target, 9, FitSettings{}, 1), std::invalid_argument);
}

TEST_CASE("adding a component never loses fidelity") {
    for (int h_r = 0; h_r <= 13; ++h_r) {
        const auto target = gibbs_target(0.5, static_cast<double>(h_r));
        double previous = 0.0;
        for (int n_comp = 1; n_comp <= 3; ++n_comp) {
            const auto fit = fit_ensemble(target, n_comp, FitSettings{}, 7);
            CHECK(fit.fidelity >= previous - 1e-9);
            previous = fit.fidelity;
        }
    }
}

TEST_CASE("sub-Poissonian targets defeat coherent mixtures") {
    // strong fields concentrate the weights near the energy argmin; the
    // number variance drops below the mean and no Poisson mixture keeps up
    const auto target = gibbs_target(0.5, 40.0);
    const double mean = target.mean();
    double second = 0.0;
    for (int n = 0; n <= target.n_max(); ++n) second += double(n) * n * target[n];
    CHECK(second - mean * mean < mean);  // sub-Poissonian indeed
    const auto fit = fit_ensemble(target, 3, FitSettings{}, 3);
    const auto plateau = fit_ensemble(gibbs_target(0.5, 7.0), 3, FitSettings{}, 3);
    CHECK(fit.fidelity < 0.995);
    CHECK(plateau.fidelity - fit.fidelity > 0.003);
}

TEST_CASE("sensitivity grid center reproduces the fit fidelity") {
    const auto target = gibbs_target(0.5, 7.0);
    const auto fit = fit_ensemble(target, 3, FitSettings{}, 7);
    const double a1 = fit.ensemble.alphas[1], a2 = fit.ensemble.alphas[2];
    const auto grid = fidelity_sensitivity(target, fit.ensemble, 1, 2, AxisSpec{a1, a1, 1},
                                           AxisSpec{a2, a2, 1});
    CHECK(grid[0][0] == fit.fidelity);
}

TEST_CASE("far-field displacement drops the fidelity below 0.99") {
    const auto target = gibbs_target(0.5, 7.0);
    const auto fit = fit_ensemble(target, 3, FitSettings{}, 7);
    const double a1 = fit.ensemble.alphas[1] + 2.0, a2 = fit.ensemble.alphas[2] + 2.0;
    const auto grid = fidelity_sensitivity(target, fit.ensemble, 1, 2, AxisSpec{a1, a1, 1},
                                           AxisSpec{a2, a2, 1});
    CHECK(grid[0][0] < 0.99);
}

TEST_CASE("sensitivity rejects bad indices") {
    const auto target = gibbs_target(0.5, 7.0);
    const auto ens = make_ensemble({0.5, 0.5}, {1.0, 2.0});
    CHECK_THROWS_AS(fidelity_sensitivity(target, ens, 0, 0, AxisSpec{1, 1, 1}, AxisSpec{1, 1, 1}),
                    std::invalid_argument);
    CHECK_THROWS_AS(fidelity_sensitivity(target, ens, 0, 2, AxisSpec{1, 1, 1}, AxisSpec{1, 1, 1}),
                    std::invalid_argument);
    CHECK_THROWS_AS(fidelity_sensitivity(target, ens, 0, 1, AxisSpec{-0.5, 1, 4}, AxisSpec{1, 1, 1}),
                    std::invalid_argument);
}

TEST_CASE("canonical form sorts alphas and validates the simplex") {
    const auto ens = make_ensemble({0.25, 0.75}, {2.0, 1.0});
    CHECK(ens.alphas[0] == 1.0);
    CHECK(ens.alphas[1] == 2.0);
    CHECK(ens.weights[0] == 0.75);
    CHECK(ens.weights[1] == 0.25);
    CHECK_THROWS_AS(make_ensemble({0.5, 0.6}, {1.0, 2.0}), std::invalid_argument);
    CHECK_THROWS_AS(make_ensemble({0.5, 0.5}, {1.0, -2.0}), std::invalid_argument);
    CHECK_THROWS_AS(make_ensemble({}, {}), std::invalid_argument);
}
