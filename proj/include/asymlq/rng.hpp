#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace asymlq {

// splitmix64 step, used to derive independent sub-seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Standard-normal stream that is reproducible across platforms: mt19937_64
// (fully specified by the standard) plus an explicit Box-Muller transform.
// Each sample consumes exactly two 64-bit generator outputs; the
// implementation-defined std::normal_distribution is deliberately avoided.
class NormalSampler {
public:
    explicit NormalSampler(std::uint64_t seed) : gen_(seed) {}

    double operator()() {
        const double u1 = uniform_open();  // in (0, 1]
        const double u2 = uniform_open();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

private:
    double uniform_open() {
        // 53-bit mantissa, shifted into (0, 1] so log() is always finite.
        return (static_cast<double>(gen_() >> 11) + 1.0) * 0x1p-53;
    }

    std::mt19937_64 gen_;
};

}  // namespace asymlq
