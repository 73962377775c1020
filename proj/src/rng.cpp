#include "flexbench/rng.hpp"

#include <array>
#include <limits>

#include "flexbench/errors.hpp"

namespace flexbench {

std::uint64_t splitmix64(std::uint64_t& state)
{
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

Rng::Rng(std::uint64_t seed)
{
    std::array<std::uint32_t, 8> words{};
    std::uint64_t s = seed;
    for (std::size_t i = 0; i < words.size(); i += 2) {
        const std::uint64_t v = splitmix64(s);
        words[i] = static_cast<std::uint32_t>(v);
        words[i + 1] = static_cast<std::uint32_t>(v >> 32);
    }
    std::seed_seq seq(words.begin(), words.end());
    engine_.seed(seq);
}

std::uint64_t Rng::below(std::uint64_t n)
{
    if (n == 0) {
        throw DomainError("Rng::below: n must be positive");
    }
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t v = engine_();
    while (v >= limit) {
        v = engine_();
    }
    return v % n;
}

} // namespace flexbench
