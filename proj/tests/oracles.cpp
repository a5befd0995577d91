#include "oracles.hpp"

#include <cmath>
#include <stdexcept>

namespace oracles {

long double laguerre_closed_form(int n, long double x) {
    long double term = 1.0L, sum = 1.0L;
    for (int k = 0; k < n; ++k) {
        term *= -x * static_cast<long double>(n - k) /
                (static_cast<long double>(k + 1) * static_cast<long double>(k + 1));
        sum += term;
    }
    return sum;
}

namespace {

using Matrix = std::vector<std::complex<double>>;  // row-major square

Matrix identity(std::size_t dim) {
    Matrix m(dim * dim, 0.0);
    for (std::size_t i = 0; i < dim; ++i) m[i * dim + i] = 1.0;
    return m;
}

Matrix multiply(const Matrix& a, const Matrix& b, std::size_t dim) {
    Matrix c(dim * dim, 0.0);
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t k = 0; k < dim; ++k) {
            const std::complex<double> aik = a[i * dim + k];
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < dim; ++j) c[i * dim + j] += aik * b[k * dim + j];
        }
    return c;
}

// scaling-and-squaring Taylor; adequate for the modest norms used here
Matrix expm(Matrix a, std::size_t dim) {
    double norm = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < dim; ++j) row += std::abs(a[i * dim + j]);
        norm = std::max(norm, row);
    }
    int squarings = 0;
    while (norm > 0.25) {
        norm /= 2.0;
        ++squarings;
    }
    const double scale = std::ldexp(1.0, -squarings);
    for (auto& v : a) v *= scale;

    Matrix result = identity(dim);
    Matrix term = identity(dim);
    for (int k = 1; k <= 24; ++k) {
        term = multiply(term, a, dim);
        for (auto& v : term) v /= static_cast<double>(k);
        for (std::size_t i = 0; i < dim * dim; ++i) result[i] += term[i];
    }
    for (int s = 0; s < squarings; ++s) result = multiply(result, result, dim);
    return result;
}

std::complex<double> trace(const Matrix& m, std::size_t dim) {
    std::complex<double> t = 0.0;
    for (std::size_t i = 0; i < dim; ++i) t += m[i * dim + i];
    return t;
}

}  // namespace

std::complex<double> dense_partition_ratio(double beta_omega, double h_r,
                                           const std::vector<double>& xi, double beta_h_i) {
    const std::size_t dim = xi.size();
    Matrix full(dim * dim, 0.0), real_part(dim * dim, 0.0);
    for (std::size_t n = 0; n < dim; ++n) {
        const double re = -beta_omega * (static_cast<double>(n) + h_r * xi[n]);
        full[n * dim + n] = std::complex<double>(re, -beta_h_i * xi[n]);
        real_part[n * dim + n] = re;
    }
    return trace(expm(full, dim), dim) / trace(expm(real_part, dim), dim);
}

std::pair<double, double> two_level_spin(double omega_n, double delta, double t) {
    const double x = std::sqrt(delta * delta + omega_n * omega_n);
    std::complex<double> u00, u01, u10, u11;
    if (x == 0.0) {
        u00 = u11 = 1.0;
        u01 = u10 = 0.0;
    } else {
        // U = cos(Xt/2) I - i sin(Xt/2) (delta sigma_z + omega_n sigma_x) / X
        const double c = std::cos(0.5 * x * t);
        const double s = std::sin(0.5 * x * t);
        u00 = std::complex<double>(c, -s * delta / x);
        u11 = std::complex<double>(c, +s * delta / x);
        u01 = std::complex<double>(0.0, -s * omega_n / x);
        u10 = u01;
    }
    const std::complex<double> psi0 = u00;  // column applied to (1, 0)
    const std::complex<double> psi1 = u10;
    const double sigma_z = std::norm(psi0) - std::norm(psi1);
    const double sigma_y = 2.0 * std::imag(std::conj(psi0) * psi1);
    return {sigma_z, sigma_y};
}

GaussHermite gauss_hermite(int order) {
    if (order < 2) throw std::invalid_argument("gauss_hermite: order must be >= 2");
    GaussHermite rule;
    rule.nodes.resize(static_cast<std::size_t>(order));
    rule.weights.resize(static_cast<std::size_t>(order));
    const double pi_quarter = std::pow(M_PI, -0.25);
    for (int i = 0; i < (order + 1) / 2; ++i) {
        // Stroud-Secrest style initial guesses, then Newton on H_n
        double x;
        if (i == 0)
            x = std::sqrt(2.0 * order + 1.0) - 1.85575 * std::pow(2.0 * order + 1.0, -1.0 / 6.0);
        else if (i == 1)
            x = rule.nodes[0] - 1.14 * std::pow(static_cast<double>(order), 0.426) / rule.nodes[0];
        else if (i == 2)
            x = 1.86 * rule.nodes[1] - 0.86 * rule.nodes[0];
        else if (i == 3)
            x = 1.91 * rule.nodes[2] - 0.91 * rule.nodes[1];
        else
            x = 2.0 * rule.nodes[static_cast<std::size_t>(i) - 1] -
                rule.nodes[static_cast<std::size_t>(i) - 2];
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            // orthonormal Hermite recurrence
            double p1 = pi_quarter, p2 = 0.0;
            for (int j = 0; j < order; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = x * std::sqrt(2.0 / (j + 1.0)) * p2 -
                     std::sqrt(static_cast<double>(j) / (j + 1.0)) * p3;
            }
            pp = std::sqrt(2.0 * order) * p2;
            const double dx = p1 / pp;
            x -= dx;
            if (std::fabs(dx) < 1e-15) break;
        }
        rule.nodes[static_cast<std::size_t>(i)] = x;
        rule.nodes[static_cast<std::size_t>(order - 1 - i)] = -x;
        rule.weights[static_cast<std::size_t>(i)] = 2.0 / (pp * pp);
        rule.weights[static_cast<std::size_t>(order - 1 - i)] = rule.weights[static_cast<std::size_t>(i)];
    }
    return rule;
}

double gaussian_average(const GaussHermite& rule, double sigma,
                        const std::function<double(double)>& g) {
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        acc += rule.weights[i] * g(std::sqrt(2.0) * sigma * rule.nodes[i]);
    return acc / std::sqrt(M_PI);
}

std::vector<double> birth_death_reference(std::vector<double> populations, double gamma, double t,
                                          int steps) {
    const std::size_t count = populations.size();
    const double h = t / steps;
    auto deriv = [&](const std::vector<double>& q) {
        std::vector<double> d(count, 0.0);
        for (std::size_t n = 0; n < count; ++n) {
            double rate = -gamma * static_cast<double>(n) * q[n];
            if (n + 1 < count) rate -= gamma * static_cast<double>(n + 1) * q[n];
            if (n > 0) rate += gamma * static_cast<double>(n) * q[n - 1];
            if (n + 1 < count) rate += gamma * static_cast<double>(n + 1) * q[n + 1];
            d[n] = rate;
        }
        return d;
    };
    std::vector<double> tmp(count);
    for (int s = 0; s < steps; ++s) {
        const auto k1 = deriv(populations);
        for (std::size_t n = 0; n < count; ++n) tmp[n] = populations[n] + 0.5 * h * k1[n];
        const auto k2 = deriv(tmp);
        for (std::size_t n = 0; n < count; ++n) tmp[n] = populations[n] + 0.5 * h * k2[n];
        const auto k3 = deriv(tmp);
        for (std::size_t n = 0; n < count; ++n) tmp[n] = populations[n] + h * k3[n];
        const auto k4 = deriv(tmp);
        for (std::size_t n = 0; n < count; ++n)
            populations[n] += h / 6.0 * (k1[n] + 2.0 * k2[n] + 2.0 * k3[n] + k4[n]);
    }
    return populations;
}

EtaScan brute_force_eta(double eta_lo, double eta_hi, double step, int n_lo, int n_hi) {
    EtaScan best{eta_lo, -1.0};
    const int cells = static_cast<int>(std::ceil((eta_hi - eta_lo) / step));
    for (int i = 0; i <= cells; ++i) {
        const long double eta = (i == cells) ? eta_hi : eta_lo + step * i;
        const long double x = eta * eta;
        const long double pre = expl(-x / 2.0L);
        long double f = 1e300L;
        for (int n = n_lo; n <= n_hi; ++n)
            f = std::min(f, pre * fabsl(laguerre_closed_form(n, x)));
        if (static_cast<double>(f) > best.min_abs_xi) {
            best.min_abs_xi = static_cast<double>(f);
            best.eta_star = static_cast<double>(eta);
        }
    }
    return best;
}

}  // namespace oracles
