#pragma once

#include <cstdint>
#include <deque>
#include <stdexcept>

// Replays a fixed stream of uniforms; below(n) consumes from its own queue.
struct ScriptedRng {
    std::deque<double> uniforms;
    std::deque<std::uint64_t> integers;

    double uniform()
    {
        if (uniforms.empty()) {
            throw std::runtime_error("scripted rng: uniform stream exhausted");
        }
        const double u = uniforms.front();
        uniforms.pop_front();
        return u;
    }

    std::uint64_t below(std::uint64_t n)
    {
        if (integers.empty()) {
            throw std::runtime_error("scripted rng: integer stream exhausted");
        }
        const std::uint64_t v = integers.front();
        integers.pop_front();
        if (v >= n) {
            throw std::runtime_error("scripted rng: integer out of range");
        }
        return v;
    }
};
