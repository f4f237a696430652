#pragma once

#include <cstdint>
#include <random>

namespace pctladp {

/// SplitMix64 finalizer; used to derive independent stream seeds.
inline std::uint64_t mix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/**
 * Seeded generator that can be split into independent child streams.
 *
 * Children are keyed by an integer id, so a batch of trajectories can be drawn
 * in any order (or on any worker) and still reproduce bit for bit.
 */
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : seed_(seed), engine_(mix64(seed)) {}

    std::uint64_t seed() const { return seed_; }

    Rng split(std::uint64_t stream) const { return Rng(mix64(seed_ ^ mix64(stream + 0x632be59bd9b4e019ULL))); }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    std::uint64_t next() { return engine_(); }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

}  // namespace pctladp
