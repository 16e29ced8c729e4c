/*
 * Counter-based random number generator with hierarchical stream derivation.
 *
 * Every draw is a pure function of (key, counter), so independent streams can
 * be split off deterministically: one stream per (session, query, role). The
 * challenge and basis streams are derived independently of the adversary
 * stream, which keeps honest and attacked sessions under the same seed
 * challenge-for-challenge comparable.
 */
#pragma once

#include <cmath>
#include <cstdint>

#include "cvauth/math.hpp"

namespace cvauth {

// Role tags for per-query stream derivation.
enum class StreamTag : std::uint64_t {
    kChallenge = 1,
    kTheta = 2,
    kAdversary = 3,
    kOutcome = 4,
};

namespace detail {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

// splitmix64 finalizer; bijective 64-bit mix.
inline std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
}

}  // namespace detail

// Derives a child key; v is the child index within the parent's namespace.
inline std::uint64_t derive_key(std::uint64_t parent, std::uint64_t v) {
    return detail::mix64(parent + detail::kGolden * (v + 1));
}

class CounterRng {
public:
    explicit CounterRng(std::uint64_t key) : key_(key) {}

    std::uint64_t next_u64() {
        ++counter_;
        return detail::mix64(key_ + detail::kGolden * counter_);
    }

    // Uniform double in [0, 1) with 53 random bits.
    double next_unit() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, n); multiply-shift map, bias below 2^-53.
    std::uint64_t next_below(std::uint64_t n) {
        using u128 = unsigned __int128;
        return static_cast<std::uint64_t>((static_cast<u128>(next_u64()) * n) >> 64);
    }

    // Standard normal via the Box-Muller cosine branch; always consumes
    // exactly two uniforms, which keeps draw counts reproducible.
    double next_normal() {
        double u1 = next_unit();
        double u2 = next_unit();
        double r = std::sqrt(-2.0 * std::log1p(-u1));
        return r * std::cos(2.0 * kPi * u2);
    }

    std::uint64_t key() const { return key_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

// Stream for one role within one query of one session.
inline CounterRng query_stream(std::uint64_t session_key, std::uint64_t query_idx, StreamTag tag) {
    return CounterRng(derive_key(derive_key(session_key, query_idx), static_cast<std::uint64_t>(tag)));
}

inline std::uint64_t session_key(std::uint64_t master_seed, std::uint64_t session_idx) {
    return derive_key(master_seed, session_idx);
}

}  // namespace cvauth
