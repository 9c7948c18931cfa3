// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>

namespace semseg {

/// Deterministic pseudo-random stream based on SplitMix64
/// (Steele, Lea, Flood 2014). The generator is a fixed, portable
/// algorithm so seeded fixtures reproduce bit-identically
/// everywhere; normal variates use the Marsaglia polar method,
/// which only relies on sqrt and log.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [lo, hi], both inclusive. Uses rejection
    /// sampling so the distribution is exact.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        const std::uint64_t span =
            static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo) + 1;
        std::uint64_t draw = next_u64();
        if (span != 0) {
            const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
            while (draw >= limit) draw = next_u64();
            draw %= span;
        }
        return static_cast<std::int64_t>(static_cast<std::uint64_t>(lo) + draw);
    }

    /// Standard normal variate (Marsaglia polar method).
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform01() - 1.0;
            v = 2.0 * uniform01() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double factor = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * factor;
        has_spare_ = true;
        return u * factor;
    }

    /// Derives an independent child stream. Distinct tags give
    /// decorrelated streams for the same parent.
    Rng fork(std::uint64_t tag) {
        std::uint64_t mix = state_ ^ (0x9e3779b97f4a7c15ULL * (tag + 1));
        mix = (mix ^ (mix >> 30)) * 0xbf58476d1ce4e5b9ULL;
        mix = (mix ^ (mix >> 27)) * 0x94d049bb133111ebULL;
        return Rng(mix ^ (mix >> 31));
    }

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace semseg
