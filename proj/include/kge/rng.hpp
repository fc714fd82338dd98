#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace kge {

/// Seeded random stream. Every stage of a pipeline (init, shuffle,
/// corruption, dedupe) gets its own stream derived from the run seed and a
/// stream name, so changing how one stage consumes randomness does not
/// perturb the others.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Derive a named sub-stream from a run seed.
    static Rng stream(std::uint64_t seed, std::string_view name) {
        // FNV-1a over the name, mixed with the seed.
        std::uint64_t h = 14695981039346656037ULL;
        for (unsigned char c : name) {
            h ^= c;
            h *= 1099511628211ULL;
        }
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32)};
        Rng r(0);
        r.engine_.seed(seq);
        return r;
    }

    /// Uniform real on [lo, hi).
    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(engine_);
    }

    /// Uniform integer on [lo, hi] inclusive.
    int uniform_int(int lo, int hi) {
        return std::uniform_int_distribution<int>(lo, hi)(engine_);
    }

    /// Fair coin.
    bool coin() { return std::uniform_int_distribution<int>(0, 1)(engine_) == 1; }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

}  // namespace kge
