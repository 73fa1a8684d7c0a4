#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace snft {

// Deterministic generator with hand-rolled distributions. std::*
// distributions are implementation-defined, and every artifact this
// project emits must be byte-identical across platforms for a fixed
// seed, so nothing from <random> is used beyond raw bit generation.
class Rng {
public:
    explicit Rng(uint64_t seed) {
        // splitmix64 expansion of the seed into xoshiro256** state
        uint64_t x = seed;
        for (auto& s : state_) {
            x += 0x9e3779b97f4a7c15ULL;
            uint64_t z = x;
            z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
            z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
            s = z ^ (z >> 31);
        }
    }

    uint64_t next_u64() {
        const uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // uniform in [0, bound) via rejection sampling
    uint64_t uniform_u64(uint64_t bound) {
        if (bound == 0) throw std::invalid_argument("uniform_u64: zero bound");
        const uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

    // inclusive integer range
    int64_t uniform_int(int64_t lo, int64_t hi) {
        if (lo > hi) throw std::invalid_argument("uniform_int: empty range");
        return lo + static_cast<int64_t>(uniform_u64(static_cast<uint64_t>(hi - lo) + 1));
    }

    // uniform in [0, 1) with 53 bits of precision
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    bool bernoulli(double p) { return uniform01() < p; }

    // Box-Muller; no caching so the draw count per call is fixed
    double gaussian(double mean, double sigma) {
        double u1 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        const double u2 = uniform01();
        const double mag = std::sqrt(-2.0 * std::log(u1));
        return mean + sigma * mag * std::cos(2.0 * std::numbers::pi * u2);
    }

    // Independent substream; stream ids keep module draws decoupled.
    Rng fork(uint64_t stream) const {
        uint64_t mix = state_[0] ^ rotl(state_[2], 13) ^ (stream * 0x9e3779b97f4a7c15ULL + 1);
        return Rng(mix);
    }

    // k distinct indices from [0, n), order of first selection
    std::vector<size_t> sample_without_replacement(size_t n, size_t k) {
        if (k > n) throw std::invalid_argument("sample: k > n");
        std::vector<size_t> pool(n);
        for (size_t i = 0; i < n; ++i) pool[i] = i;
        std::vector<size_t> out;
        out.reserve(k);
        for (size_t i = 0; i < k; ++i) {
            size_t j = i + static_cast<size_t>(uniform_u64(n - i));
            std::swap(pool[i], pool[j]);
            out.push_back(pool[i]);
        }
        return out;
    }

private:
    static constexpr uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    uint64_t state_[4];
};

}  // namespace snft
