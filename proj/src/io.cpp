#include "lyz/io.hpp"

#include <array>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "lyz/version.hpp"

namespace lyz::io {

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

// SHA-256 (FIPS 180-4), straightforward block implementation.
struct Sha256 {
    std::array<std::uint32_t, 8> h{0x6a09e667u, 0xbb67ae85u, 0x3c6ef372u, 0xa54ff53au,
                                   0x510e527fu, 0x9b05688cu, 0x1f83d9abu, 0x5be0cd19u};
    std::array<std::uint8_t, 64> block{};
    std::size_t block_len = 0;
    std::uint64_t total_bits = 0;

    static constexpr std::array<std::uint32_t, 64> k{
        0x428a2f98u, 0x71374491u, 0xb5c0fbcfu, 0xe9b5dba5u, 0x3956c25bu, 0x59f111f1u, 0x923f82a4u,
        0xab1c5ed5u, 0xd807aa98u, 0x12835b01u, 0x243185beu, 0x550c7dc3u, 0x72be5d74u, 0x80deb1feu,
        0x9bdc06a7u, 0xc19bf174u, 0xe49b69c1u, 0xefbe4786u, 0x0fc19dc6u, 0x240ca1ccu, 0x2de92c6fu,
        0x4a7484aau, 0x5cb0a9dcu, 0x76f988dau, 0x983e5152u, 0xa831c66du, 0xb00327c8u, 0xbf597fc7u,
        0xc6e00bf3u, 0xd5a79147u, 0x06ca6351u, 0x14292967u, 0x27b70a85u, 0x2e1b2138u, 0x4d2c6dfcu,
        0x53380d13u, 0x650a7354u, 0x766a0abbu, 0x81c2c92eu, 0x92722c85u, 0xa2bfe8a1u, 0xa81a664bu,
        0xc24b8b70u, 0xc76c51a3u, 0xd192e819u, 0xd6990624u, 0xf40e3585u, 0x106aa070u, 0x19a4c116u,
        0x1e376c08u, 0x2748774cu, 0x34b0bcb5u, 0x391c0cb3u, 0x4ed8aa4au, 0x5b9cca4fu, 0x682e6ff3u,
        0x748f82eeu, 0x78a5636fu, 0x84c87814u, 0x8cc70208u, 0x90befffau, 0xa4506cebu, 0xbef9a3f7u,
        0xc67178f2u};

    static std::uint32_t rotr(std::uint32_t x, int n) { return (x >> n) | (x << (32 - n)); }

    void compress() {
        std::array<std::uint32_t, 64> w{};
        for (int i = 0; i < 16; ++i)
            w[i] = (std::uint32_t(block[4 * i]) << 24) | (std::uint32_t(block[4 * i + 1]) << 16) |
                   (std::uint32_t(block[4 * i + 2]) << 8) | std::uint32_t(block[4 * i + 3]);
        for (int i = 16; i < 64; ++i) {
            const std::uint32_t s0 = rotr(w[i - 15], 7) ^ rotr(w[i - 15], 18) ^ (w[i - 15] >> 3);
            const std::uint32_t s1 = rotr(w[i - 2], 17) ^ rotr(w[i - 2], 19) ^ (w[i - 2] >> 10);
            w[i] = w[i - 16] + s0 + w[i - 7] + s1;
        }
        auto [a, b, c, d, e, f, g, hh] = h;
        for (int i = 0; i < 64; ++i) {
            const std::uint32_t s1 = rotr(e, 6) ^ rotr(e, 11) ^ rotr(e, 25);
            const std::uint32_t ch = (e & f) ^ (~e & g);
            const std::uint32_t t1 = hh + s1 + ch + k[i] + w[i];
            const std::uint32_t s0 = rotr(a, 2) ^ rotr(a, 13) ^ rotr(a, 22);
            const std::uint32_t maj = (a & b) ^ (a & c) ^ (b & c);
            const std::uint32_t t2 = s0 + maj;
            hh = g; g = f; f = e; e = d + t1;
            d = c; c = b; b = a; a = t1 + t2;
        }
        h[0] += a; h[1] += b; h[2] += c; h[3] += d;
        h[4] += e; h[5] += f; h[6] += g; h[7] += hh;
    }

    void update(const std::uint8_t* data, std::size_t len) {
        total_bits += std::uint64_t(len) * 8;
        while (len > 0) {
            const std::size_t take = std::min(len, block.size() - block_len);
            std::memcpy(block.data() + block_len, data, take);
            block_len += take;
            data += take;
            len -= take;
            if (block_len == block.size()) {
                compress();
                block_len = 0;
            }
        }
    }

    std::string finish() {
        const std::uint64_t bits = total_bits;
        const std::uint8_t pad = 0x80;
        update(&pad, 1);
        const std::uint8_t zero = 0x00;
        while (block_len != 56) update(&zero, 1);
        std::array<std::uint8_t, 8> len_bytes{};
        for (int i = 0; i < 8; ++i) len_bytes[i] = std::uint8_t(bits >> (56 - 8 * i));
        update(len_bytes.data(), len_bytes.size());
        std::string hex;
        hex.reserve(64);
        static const char* digits = "0123456789abcdef";
        for (std::uint32_t v : h)
            for (int i = 28; i >= 0; i -= 4) hex.push_back(digits[(v >> i) & 0xF]);
        return hex;
    }
};

}  // namespace

std::string sha256_hex(std::string_view data) {
    Sha256 hasher;
    hasher.update(reinterpret_cast<const std::uint8_t*>(data.data()), data.size());
    return hasher.finish();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw std::runtime_error("short write to " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::string grid_csv(const ComplexFieldGrid& grid) {
    std::string csv = "h_r,beta_h_i,re_z,im_z,abs_z\n";
    for (std::size_t i = 0; i < grid.h_r_axis.size(); ++i)
        for (std::size_t j = 0; j < grid.beta_h_i_axis.size(); ++j) {
            const auto v = grid.values[i][j];
            csv += g17(grid.h_r_axis[i]) + "," + g17(grid.beta_h_i_axis[j]) + "," +
                   g17(v.real()) + "," + g17(v.imag()) + "," + g17(std::abs(v)) + "\n";
        }
    return csv;
}

std::string trajectory_csv(const SpinTrajectory& traj) {
    std::string csv = "t_seconds,sigma_z,sigma_y\n";
    for (std::size_t k = 0; k < traj.times.size(); ++k)
        csv += g17(traj.times[k]) + "," + g17(traj.sigma_z[k]) + "," + g17(traj.sigma_y[k]) + "\n";
    return csv;
}

std::string deviance_csv(std::span<const double> times, std::span<const std::complex<double>> dz) {
    std::string csv = "t_seconds,re_dz,im_dz,abs_dz\n";
    for (std::size_t k = 0; k < times.size(); ++k)
        csv += g17(times[k]) + "," + g17(dz[k].real()) + "," + g17(dz[k].imag()) + "," +
               g17(std::abs(dz[k])) + "\n";
    return csv;
}

std::string fock_csv(const FockDistribution& dist) {
    std::string csv = "n,p\n";
    for (int n = 0; n < dist.size(); ++n)
        csv += std::to_string(n) + "," + g17(dist[n]) + "\n";
    return csv;
}

std::string profile_csv(const CouplingProfile& profile) {
    std::string csv = "n,xi\n";
    for (std::size_t n = 0; n < profile.xi.size(); ++n)
        csv += std::to_string(n) + "," + g17(profile.xi[n]) + "\n";
    return csv;
}

std::string sensitivity_csv(std::span<const double> axis_a, std::span<const double> axis_b,
                            const std::vector<std::vector<double>>& fid) {
    std::string csv = "alpha_a,alpha_b,fidelity\n";
    for (std::size_t i = 0; i < axis_a.size(); ++i)
        for (std::size_t j = 0; j < axis_b.size(); ++j)
            csv += g17(axis_a[i]) + "," + g17(axis_b[j]) + "," + g17(fid[i][j]) + "\n";
    return csv;
}

std::string zeros_json(const std::vector<ZeroLocation>& zeros) {
    nlohmann::json arr = nlohmann::json::array();
    for (const ZeroLocation& z : zeros)
        arr.push_back({{"h_r", z.h_r},
                       {"t_seconds", z.t},
                       {"beta_h_i", z.beta_h_i},
                       {"residual", z.residual},
                       {"converged", z.converged}});
    return arr.dump(2) + "\n";
}

std::string ensemble_json(const FitResult& fit, double beta_omega, double h_r, double eta,
                          int n_max, std::uint64_t seed) {
    nlohmann::json j{{"weights", fit.ensemble.weights},
                     {"alphas", fit.ensemble.alphas},
                     {"fidelity", fit.fidelity},
                     {"target_params",
                      {{"beta_omega", beta_omega}, {"h_r", h_r}, {"eta", eta}, {"n_max", n_max}}},
                     {"seed", seed}};
    return j.dump(2) + "\n";
}

std::string grid_meta_json(const ComplexFieldGrid& grid) {
    nlohmann::json j{{"beta_omega", grid.beta_omega},
                     {"eta", grid.eta},
                     {"n_max", grid.n_max},
                     {"h_r_axis", {{"lo", grid.h_r_axis.front()},
                                   {"hi", grid.h_r_axis.back()},
                                   {"count", grid.h_r_axis.size()}}},
                     {"beta_h_i_axis", {{"lo", grid.beta_h_i_axis.front()},
                                        {"hi", grid.beta_h_i_axis.back()},
                                        {"count", grid.beta_h_i_axis.size()}}},
                     {"version", kVersion}};
    return j.dump(2) + "\n";
}

std::string noisy_grid_meta_json(const NoisyGrid& noisy) {
    nlohmann::json j = nlohmann::json::parse(grid_meta_json(noisy.grid));
    j["t_axis_seconds"] = {{"lo", noisy.t_axis.front()},
                           {"hi", noisy.t_axis.back()},
                           {"count", noisy.t_axis.size()}};
    j["drive"] = {{"omega_rabi_rad_s", noisy.drive.omega_rabi},
                  {"detuning_rad_s", noisy.drive.detuning}};
    j["noise"] = {{"gamma_quanta_s", noisy.noise.gamma},
                  {"sigma_delta_rad_s", noisy.noise.sigma_delta},
                  {"n_runs", noisy.noise.n_runs},
                  {"seed", noisy.noise.seed}};
    return j.dump(2) + "\n";
}

}  // namespace lyz::io
