#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace coleforge {

// All randomness in the project draws from std::mt19937_64, whose output
// sequence is fixed by the standard. The helpers below avoid the
// implementation-defined standard distributions so seeded runs reproduce
// across toolchains.
using Rng = std::mt19937_64;

// Uniform on [0, 1) from the top 53 bits.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(Rng& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

// SplitMix64 finalizer, used to derive independent child seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Box-Muller standard normal generator. Produces values in pairs; the cached
// second value is consumed before the engine is advanced again.
class NormalSource {
public:
    explicit NormalSource(std::uint64_t seed) : rng_(seed) {}

    double next() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        // 1 - u keeps the log argument in (0, 1].
        const double u1 = 1.0 - uniform01(rng_);
        const double u2 = uniform01(rng_);
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

private:
    Rng rng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace coleforge
