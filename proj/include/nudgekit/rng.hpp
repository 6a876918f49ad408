#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

// Deterministic, platform-independent random primitives. The standard
// <random> distributions are implementation-defined, so everything that
// must reproduce bit-exactly (mock embeddings, sampling) goes through
// these instead.

namespace nudgekit::rng {

inline constexpr std::uint64_t fnv1a64(std::string_view text) {
    std::uint64_t hash = 14695981039346656037ull;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 1099511628211ull;
    }
    return hash;
}

class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    /// Uniform double in (0, 1].
    double next_unit() {
        return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
    }

private:
    std::uint64_t state_;
};

/// Standard-normal stream via Box-Muller on SplitMix64 uniforms.
class GaussianSource {
public:
    explicit GaussianSource(std::uint64_t seed) : uniforms_(seed) {}

    double next() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = uniforms_.next_unit();
        const double u2 = uniforms_.next_unit();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * 3.14159265358979323846 * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    SplitMix64 uniforms_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

/// Stable 64-bit seed for a (text, seed) pair.
inline std::uint64_t combine_seed(std::string_view text, std::uint64_t seed) {
    std::uint64_t h = fnv1a64(text);
    h ^= seed + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    return h;
}

}  // namespace nudgekit::rng
