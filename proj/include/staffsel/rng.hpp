#pragma once

#include <cstdint>

namespace staffsel {

namespace detail {

inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace detail

/** splitmix64. Small, fast, and reproducible across platforms; one instance
    per episode keeps simulation results independent of run ordering. */
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // uniform on [0, 1) with 53 random bits
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // decorrelated stream for one episode of a batch
    static SplitMix64 substream(std::uint64_t seed, std::uint64_t index) {
        return SplitMix64(detail::mix64(seed) ^ detail::mix64(index * 0xD1342543DE82EF95ULL + 1ULL));
    }

  private:
    std::uint64_t state_;
};

}  // namespace staffsel
