#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>

namespace matmart {

/// Deterministic 64-bit stream generator (splitmix64 update).
///
/// Streams are pure functions of their seed, and per-trajectory seeds are
/// derived from (master seed, stream index) so that results do not depend
/// on worker count or scheduling.
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    /// Stream seed for trajectory `index` under `master_seed`.
    static uint64_t derive_stream(uint64_t master_seed, uint64_t index) {
        return mix(master_seed ^ mix(index + 0x9E3779B97F4A7C15ull));
    }

    static Rng for_stream(uint64_t master_seed, uint64_t index) {
        return Rng(derive_stream(master_seed, index));
    }

    uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ull;
        return mix(state_);
    }

    /// Uniform double in [0, 1), 53 random bits.
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform double in [lo, hi).
    double next_range(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

    /// Uniform integer in [0, n), n >= 1.
    int next_below(int n) {
        if (n < 1) throw std::invalid_argument("next_below requires n >= 1");
        return static_cast<int>(next_u64() % static_cast<uint64_t>(n));
    }

    /// Index drawn from a finite distribution (probabilities summing to ~1).
    int next_outcome(std::span<const double> probabilities) {
        if (probabilities.empty()) throw std::invalid_argument("empty outcome distribution");
        const double u = next_unit();
        double cdf = 0.0;
        for (size_t i = 0; i < probabilities.size(); ++i) {
            cdf += probabilities[i];
            if (u < cdf) return static_cast<int>(i);
        }
        return static_cast<int>(probabilities.size() - 1);  // rounding slack
    }

private:
    static uint64_t mix(uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    uint64_t state_;
};

}  // namespace matmart
