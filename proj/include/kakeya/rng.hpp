#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

namespace kakeya {

// Deterministic, platform-independent RNG. std:: distributions are
// implementation-defined, so all sampling goes through this type; byte-stable
// outputs across runs and worker counts depend on it.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Seed-splitting rule: substream i of seed s is seeded from
// splitmix64 applied to s XOR (i+1)*golden. Documented so that parallel
// workers derive identical substreams regardless of scheduling.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    std::uint64_t s = base ^ ((stream + 1) * 0x9e3779b97f4a7c15ULL);
    return splitmix64(s);
}

class Rng {
  public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : state_) word = splitmix64(sm);
    }

    // xoshiro256**
    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform in [0,1), 53-bit resolution.
    double next_double() { return double(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * next_double(); }

    // Uniform integer in [0, n).
    std::uint64_t uniform_index(std::uint64_t n) {
        return n ? next_u64() % n : 0;
    }

    // Box-Muller without caching so that the consumed stream length is a
    // deterministic function of the call count.
    double normal() {
        double u1 = next_double();
        double u2 = next_double();
        if (u1 <= 0) u1 = 0x1.0p-60;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
    }

    std::vector<double> unit_vector(int n) {
        std::vector<double> v(n);
        double norm2 = 0;
        do {
            norm2 = 0;
            for (int i = 0; i < n; ++i) {
                v[i] = normal();
                norm2 += v[i] * v[i];
            }
        } while (norm2 < 1e-24);
        const double inv = 1.0 / std::sqrt(norm2);
        for (double& x : v) x *= inv;
        return v;
    }

    // Uniform in the Euclidean ball of radius r (rejection from the cube).
    std::vector<double> in_ball(int n, double r) {
        std::vector<double> v(n);
        while (true) {
            double norm2 = 0;
            for (int i = 0; i < n; ++i) {
                v[i] = uniform(-1.0, 1.0);
                norm2 += v[i] * v[i];
            }
            if (norm2 <= 1.0) break;
        }
        for (double& x : v) x *= r;
        return v;
    }

    Rng split(std::uint64_t stream) const {
        std::uint64_t h = state_[0] ^ rotl(state_[1], 13) ^ rotl(state_[2], 29) ^ rotl(state_[3], 47);
        return Rng(derive_seed(h, stream));
    }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::array<std::uint64_t, 4> state_{};
};

} // namespace kakeya
