#ifndef GEOSCAN_RNG_HPP
#define GEOSCAN_RNG_HPP

#include <cstdint>

namespace geoscan {

/**
 * SplitMix64 counter generator (Steele, Lea & Flood). Chosen over
 * std::uniform_real_distribution because its output sequence is fully
 * specified, so scenario draws are bit-identical across platforms and
 * standard libraries.
 */
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1) using the top 53 bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n), n > 0. Modulo bias is irrelevant here.
    std::uint64_t uniform_u64(std::uint64_t n) { return next_u64() % n; }

  private:
    std::uint64_t state_;
};

}  // namespace geoscan

#endif  // GEOSCAN_RNG_HPP
