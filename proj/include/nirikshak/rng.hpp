#pragma once

#include <cassert>
#include <cstdint>
#include <random>
#include <vector>

namespace nirikshak {

/// Seeded random source with pinned draw algorithms.
///
/// std::uniform_int_distribution is implementation-defined, so bounded draws
/// are done here by rejection sampling on the raw engine output. Same seed,
/// same call sequence, same values — on every platform.
class Rng {
public:
    explicit Rng(uint64_t seed) : engine_(seed) {}

    uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, n). n must be > 0.
    uint64_t below(uint64_t n) {
        assert(n > 0);
        // Rejection sampling keeps the draw unbiased.
        const uint64_t limit = UINT64_MAX - (UINT64_MAX % n);
        uint64_t v = engine_();
        while (v >= limit) v = engine_();
        return v % n;
    }

    /// Uniform in [lo, hi], inclusive.
    int64_t int_in(int64_t lo, int64_t hi) {
        assert(lo <= hi);
        const uint64_t span = static_cast<uint64_t>(hi) - static_cast<uint64_t>(lo) + 1;
        if (span == 0) return static_cast<int64_t>(engine_()); // full 64-bit range
        return lo + static_cast<int64_t>(below(span));
    }

    /// Uniform in [0, 1) with 53 bits of precision.
    double real01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi).
    double real_in(double lo, double hi) { return lo + (hi - lo) * real01(); }

    bool coin() { return (engine_() & 1) != 0; }

    template <typename T>
    const T& pick(const std::vector<T>& items) {
        assert(!items.empty());
        return items[static_cast<size_t>(below(items.size()))];
    }

private:
    std::mt19937_64 engine_;
};

} // namespace nirikshak
