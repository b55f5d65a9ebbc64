#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>
#include <vector>

#include "toxcls/error.hpp"

namespace toxcls {

/// Seeded portable PRNG used for every random decision in the workbench.
///
/// The generator is SplitMix64: the state is a 64-bit counter advanced by a
/// fixed odd constant and passed through an avalanching finalizer. The output
/// stream depends only on the seed, never on the platform. Substreams are
/// derived by hashing (seed, stream_id), so adding randomness consumption in
/// one place cannot shift the stream seen by another.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : state_(seed), seed_(seed) {}

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ull;
        return mix(state_);
    }

    /// Independent generator for (seed, stream_id).
    SeededRng split(std::uint64_t stream_id) const {
        return SeededRng(mix(seed_ ^ mix(stream_id + 0x632BE59BD9B4E019ull)));
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    /// Unbiased uniform integer in [0, n). Rejection sampling on the top of
    /// the 64-bit range keeps the distribution exact.
    std::uint64_t next_below(std::uint64_t n) {
        if (n == 0) throw ArgumentError("next_below: bound must be positive");
        const std::uint64_t threshold = (0ull - n) % n;
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

    /// Standard normal deviate (Box-Muller; the spare value is cached).
    double next_gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        do {
            u1 = next_double();
        } while (u1 <= 0.0);
        const double u2 = next_double();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * 3.14159265358979323846 * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

    /// Unbiased Fisher-Yates shuffle.
    template <class T>
    void shuffle(std::vector<T>& items) {
        if (items.size() < 2) return;
        for (std::size_t i = items.size() - 1; i > 0; --i) {
            const std::size_t j = static_cast<std::size_t>(next_below(i + 1));
            using std::swap;
            swap(items[i], items[j]);
        }
    }

    /// SplitMix64 finalizer (Stafford's mix13 variant).
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ull;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBull;
        z ^= z >> 31;
        return z;
    }

private:
    std::uint64_t state_;
    std::uint64_t seed_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

/// FNV-1a over bytes; used to turn stream names into stream ids.
inline std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (const char c : bytes) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ull;
    }
    return h;
}

/// Seed of the substream (seed, stream_id).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream_id) {
    return SeededRng(seed).split(stream_id).seed();
}

} // namespace toxcls
