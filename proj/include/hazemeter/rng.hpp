#pragma once

#include <cstdint>
#include <random>

namespace haze {

// Deterministic random source. mt19937_64 is fully specified by the standard
// and the uniform/normal transforms below are our own, so a given seed yields
// bit-identical streams on every platform. Do not swap in std distributions:
// their output is implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal via Box-Muller; the second deviate is cached.
    double normal();

    // Derive an independent sub-seed from (seed, a, b); used so per-time or
    // per-trial streams do not depend on evaluation order.
    static std::uint64_t derive(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

private:
    std::mt19937_64 gen_;
    bool has_cached_ = false;
    double cached_ = 0.0;
};

}  // namespace haze
