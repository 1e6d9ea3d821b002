#pragma once

#include <cstdint>
#include <random>

namespace fk {

/// Deterministic random stream. All draws are specified here (not via
/// std distributions), so identical seeds give identical sequences on
/// every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next() { return gen_(); }

    /// Uniform in [0, 1).
    double uniform() { return (next() >> 11) * 0x1.0p-53; }

    /// Uniform in {0, ..., n-1}, unbiased.
    std::uint64_t uniform_int(std::uint64_t n) {
        const std::uint64_t limit = ~0ull - ~0ull % n;
        std::uint64_t v;
        do {
            v = next();
        } while (v >= limit);
        return v % n;
    }

    /// Derive a child seed (per chain, per worker) from a master seed.
    static std::uint64_t child_seed(std::uint64_t master, std::uint64_t stream) {
        std::uint64_t z = master + (stream + 1) * 0x9E3779B97F4A7C15ull;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace fk
