#pragma once

#include <cstdint>
#include <random>

namespace hvlgp {

// splitmix64 finalizer; used to derive independent per-trial seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seeded generator with platform-independent derived distributions.
///
/// The standard library's distribution objects are implementation-defined,
/// so bounded integers and unit reals are derived here directly from the
/// 64-bit Mersenne Twister output stream, which is fully specified.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform integer in [0, bound). bound must be positive.
    std::uint64_t below(std::uint64_t bound)
    {
        // Rejection on the largest multiple of bound that fits in 2^64.
        const std::uint64_t limit = -bound % bound;
        for (;;) {
            const std::uint64_t r = engine_();
            if (r >= limit) {
                return r % bound;
            }
        }
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    bool coin() { return (engine_() >> 63) != 0; }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type{0}; }
    result_type operator()() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

} // namespace hvlgp
