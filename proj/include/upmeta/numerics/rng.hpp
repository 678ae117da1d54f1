#pragma once

// Seeded, splittable random streams. The generator is SplitMix64; child
// streams are derived by keyed hashing of (parent seed, salt), so the same
// (seed, index) pair always yields the same stream regardless of scheduling
// order. split() does not advance the parent.

#include <cmath>
#include <cstdint>

namespace upmeta::num {

namespace detail {

inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace detail

class RandomStream {
  public:
    explicit RandomStream(std::uint64_t seed)
        : state_(detail::mix64(seed ^ 0x2545F4914F6CDD1Dull)) {}

    RandomStream split(std::uint64_t salt) const {
        return RandomStream(detail::mix64(seed_base() + 0x9E3779B97F4A7C15ull * (salt + 1)));
    }

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ull;
        return detail::mix64(state_);
    }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return (next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform in (0, 1]; safe to pass to log().
    double uniform_pos() { return 1.0 - uniform(); }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Unit-mean exponential.
    double exponential() { return -std::log(uniform_pos()); }

    /// Uniform point in the disk of the given radius centered at the origin.
    void uniform_in_disk(double radius, double& x, double& y) {
        const double r = radius * std::sqrt(uniform());
        const double phi = 2.0 * 3.141592653589793238462643 * uniform();
        x = r * std::cos(phi);
        y = r * std::sin(phi);
    }

    /// Poisson by exponential inter-arrival counting; O(mean) per draw.
    int poisson(double mean) {
        if (mean <= 0.0) return 0;
        int k = 0;
        double acc = 0.0;
        while (true) {
            acc += exponential();
            if (acc >= mean) return k;
            ++k;
        }
    }

  private:
    std::uint64_t seed_base() const { return state_; }
    std::uint64_t state_;
};

}  // namespace upmeta::num
