#ifndef PREDCONS_RNG_HPP
#define PREDCONS_RNG_HPP

#include <cstdint>
#include <limits>
#include <random>

namespace predcons {

using Seed = std::uint64_t;

/// SplitMix64 finalizer; used to derive independent child seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr Seed derive_seed(Seed base, std::uint64_t stream) noexcept
{
    return mix_seed(base ^ mix_seed(stream + 1));
}

// The project-wide generator. std::mt19937_64 is fully specified by the
// standard; the distributions below are hand-rolled because the standard
// library ones are not bit-identical across implementations.
class Rng {
public:
    explicit Rng(Seed seed) : engine_(seed) {}

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n); n > 0. Rejection sampling, no modulo bias.
    std::uint64_t below(std::uint64_t n)
    {
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max()
            - std::numeric_limits<std::uint64_t>::max() % n;
        std::uint64_t r = engine_();
        while (r >= limit) r = engine_();
        return r % n;
    }

private:
    std::mt19937_64 engine_;
};

} // namespace predcons

#endif
