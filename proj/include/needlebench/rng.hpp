#pragma once

#include <cmath>
#include <cstdint>

namespace needlebench {

// Counter-based random stream: every draw is a pure function of
// (key, counter), so episodes replay bit-identically regardless of worker
// scheduling.  The generator is a double application of the splitmix64
// finalizer, which passes the usual statistical batteries for this kind of
// keyed-counter use.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream)
        : key_(mix(mix(seed + 0x9e3779b97f4a7c15ULL) ^ mix(stream + 0xbf58476d1ce4e5b9ULL))) {}

    // Uniform in [0, 1) for the given counter value.
    double uniform(std::uint64_t counter) const {
        return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller on counters (2i, 2i+1).
    double normal(std::uint64_t i) const {
        const double u1 = uniform(2 * i);
        const double u2 = uniform(2 * i + 1);
        // Guard log(0): counters mapping to exactly 0 get the smallest positive value.
        const double r = std::sqrt(-2.0 * std::log(u1 > 0 ? u1 : 0x1.0p-53));
        return r * std::cos(2.0 * 3.14159265358979323846 * u2);
    }

    // Uniform integer in [0, n) for the given counter value.
    std::uint64_t below(std::uint64_t counter, std::uint64_t n) const {
        // 128-bit multiply-shift; bias is < 2^-64 and irrelevant at our n.
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(bits(counter)) * n) >> 64);
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t bits(std::uint64_t counter) const { return mix(key_ ^ mix(counter)); }

    std::uint64_t key_;
};

// Stateful convenience wrapper for call sites that just want a sequence.
class SequentialRng {
public:
    SequentialRng(std::uint64_t seed, std::uint64_t stream) : rng_(seed, stream) {}

    double uniform() { return rng_.uniform(next_++); }
    double normal() { return rng_.normal(next_normal_++); }
    std::uint64_t below(std::uint64_t n) { return rng_.below(next_++, n); }

private:
    CounterRng rng_;
    std::uint64_t next_ = 0;
    std::uint64_t next_normal_ = 1u << 20; // separate counter range from uniform draws
};

} // namespace needlebench
