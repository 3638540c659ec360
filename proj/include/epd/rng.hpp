#pragma once

// Deterministic, thread-count-independent randomness: every logical unit of
// work (an instance, a detection, a trial) derives its own stream from the
// seed plus structural ids, so parallel schedules cannot reorder draws.
// Mapping from raw bits to doubles is done by hand — std::*_distribution is
// not pinned down by the standard and would break byte-identical output.

#include <cstdint>
#include <cmath>
#include <random>

namespace epd::rng {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class Stream {
  public:
    // Substream keyed by (seed, a, b, c); equal keys give equal sequences.
    static Stream of(std::uint64_t seed, std::uint64_t a = 0, std::uint64_t b = 0,
                     std::uint64_t c = 0) {
        std::uint64_t h = seed ^ 0x2545f4914f6cdd1dULL;
        for (std::uint64_t v : {a, b, c}) {
            h ^= v * 0x9e3779b97f4a7c15ULL + 0x632be59bd9b4e019ULL;
            (void)splitmix64(h);
        }
        return Stream(splitmix64(h));
    }

    std::uint64_t next_u64() { return gen_(); }

    // [0, 1) with 53 random mantissa bits.
    double unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + unit() * (hi - lo); }

    // Inclusive range; slight modulo bias is irrelevant at test scale and
    // keeps the mapping portable.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(gen_() % static_cast<std::uint64_t>(hi - lo + 1));
    }

    // Box-Muller from two fresh uniforms; no cached spare, so the number of
    // raw draws per call is fixed.
    double normal(double mean = 0.0, double sigma = 1.0) {
        const double u1 = static_cast<double>((gen_() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
        const double u2 = unit();
        const double r = std::sqrt(-2.0 * std::log(u1));
        return mean + sigma * r * std::cos(6.283185307179586476925286766559 * u2);
    }

  private:
    explicit Stream(std::uint64_t key) : gen_(key) {}
    std::mt19937_64 gen_;
};

}  // namespace epd::rng
