#pragma once

#include <cstdint>

namespace manelab {

// Counter-based generator built on the splitmix64 finalizer.  Every draw is a
// pure function of (seed, stream, index), so batch sampling is reproducible
// independent of thread count and evaluation order.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
        : base_(mix(mix(seed + 0x9e3779b97f4a7c15ull) ^ mix(stream + 0x6a09e667f3bcc909ull))) {}

    std::uint64_t raw(std::uint64_t index, std::uint64_t slot = 0) const {
        return mix(base_ ^ mix(index * 0xbf58476d1ce4e5b9ull + slot + 1));
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform(std::uint64_t index, std::uint64_t slot = 0) const {
        return static_cast<double>(raw(index, slot) >> 11) * 0x1.0p-53;
    }

    /// Uniform double in [-half_width, half_width).
    double symmetric(double half_width, std::uint64_t index, std::uint64_t slot = 0) const {
        return half_width * (2.0 * uniform(index, slot) - 1.0);
    }

    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ull;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t base_;
};

} // namespace manelab
