#pragma once

#include <cstdint>

namespace dlab {

/// SplitMix64: a small, fast, splittable generator with a fixed well-known
/// update, so seeded runs reproduce bit-for-bit on every platform (the
/// standard <random> distributions do not guarantee that).
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += UINT64_C(0x9E3779B97F4A7C15));
        z = (z ^ (z >> 30)) * UINT64_C(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)) * UINT64_C(0x94D049BB133111EB);
        return z ^ (z >> 31);
    }

    /// Uniform draw from [0, bound) by rejection; exact, no modulo bias.
    std::uint64_t next_below(std::uint64_t bound) {
        if (bound <= 1) return 0;
        const std::uint64_t threshold = -bound % bound;  // 2^64 mod bound
        for (;;) {
            const std::uint64_t r = next();
            if (r >= threshold) return r % bound;
        }
    }

    /// Uniform draw from [lo, hi] inclusive.
    std::int64_t next_in(std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(
                        next_below(static_cast<std::uint64_t>(hi - lo) + 1));
    }

    /// Derives an independent stream; used to give sub-experiments their own
    /// generators so results do not depend on evaluation order.
    SplitMix64 split() { return SplitMix64(next() ^ UINT64_C(0x6A09E667F3BCC909)); }

  private:
    std::uint64_t state_;
};

}  // namespace dlab
