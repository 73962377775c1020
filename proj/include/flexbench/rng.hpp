#pragma once

#include <cstdint>
#include <random>

namespace flexbench {

std::uint64_t splitmix64(std::uint64_t& state);

// mt19937_64 seeded through splitmix64. One instance per run.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next() { return engine_(); }
    // Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    // Uniform integer in [0, n), n > 0.
    std::uint64_t below(std::uint64_t n);

private:
    std::mt19937_64 engine_;
};

// Seed of run `run` in experiment cell `cell`.
inline std::uint64_t run_seed(std::uint64_t base_seed, std::uint64_t cell, std::uint64_t run)
{
    return base_seed ^ ((cell << 32) + run);
}

} // namespace flexbench
