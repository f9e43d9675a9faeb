#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "tryon/tensor.hpp"

namespace tryon {

// Deterministic random source. All randomness in the library flows through
// one of these; there is no global entropy.
//
// Generator: std::mt19937_64 (the engine itself is fully specified by the
// standard). Value mappings are implemented here rather than with the
// standard <random> distributions, whose algorithms vary between library
// implementations:
//   uniform () -> [0,1):    (x >> 11) * 2^-53
//   normal  ()          :   Box-Muller on two fresh uniforms
//   below (n)           :   64-bit draw with rejection of the biased tail
// Identical seed therefore yields an identical, bit-exact sample stream.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    std::uint64_t seed() const { return seed_; }

    std::uint64_t bits() { return engine_(); }

    double uniform() {
        return static_cast<double>(bits() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double normal() {
        // u1 in (0,1] so the log is finite.
        double u1 = static_cast<double>((bits() >> 11) + 1) * 0x1.0p-53;
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) throw ValueError("Rng::below: n must be positive");
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x = bits();
        while (x >= limit) x = bits();
        return x % n;
    }

    // Independent child stream; derivation is a fixed splitmix64 mix of the
    // parent seed and the tag, so forks are reproducible and order-free.
    Rng fork(std::uint64_t tag) const {
        return Rng(splitmix64(seed_ ^ (0x9E3779B97F4A7C15ULL * (tag + 1))));
    }

    template <typename Scalar>
    Tensor<Scalar> normal_tensor(std::vector<std::size_t> shape) {
        Tensor<Scalar> t(std::move(shape));
        for (std::size_t i = 0; i < t.numel(); ++i) t[i] = static_cast<Scalar>(normal());
        return t;
    }

    template <typename Scalar>
    Tensor<Scalar> uniform_tensor(std::vector<std::size_t> shape, double lo, double hi) {
        Tensor<Scalar> t(std::move(shape));
        for (std::size_t i = 0; i < t.numel(); ++i) t[i] = static_cast<Scalar>(uniform(lo, hi));
        return t;
    }

    static std::uint64_t splitmix64(std::uint64_t x) {
        x += 0x9E3779B97F4A7C15ULL;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
        return x ^ (x >> 31);
    }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

}  // namespace tryon
