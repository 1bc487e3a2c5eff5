#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace qpow::rng {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

/// Stafford/SplitMix64 output scrambler. Bijective, so distinct inputs
/// yield distinct stream seeds.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
}

/// SplitMix64: a 64-bit counter stepped by the golden-ratio increment with
/// a finalizing mix. Tiny state, full period, and completely portable
/// results — which is the point: simulation outputs must not depend on the
/// standard library's distribution internals.
class SplitMix64 {
  public:
    constexpr explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    constexpr std::uint64_t next() { return mix64(state_ += kGolden); }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  private:
    std::uint64_t state_;
};

/// Independent generator for (seed, index). The index is scrambled before
/// it touches the seed: seeding streams at seed + k*increment would make
/// stream k+1 a one-step shifted copy of stream k, since the generator's
/// own counter advances by the same increment.
inline SplitMix64 substream(std::uint64_t seed, std::uint64_t index) {
    return SplitMix64(mix64(seed + mix64(kGolden * (index + 1))));
}

/// Poisson sample with the given mean. Small means use Knuth's
/// multiplicative inversion; means of 10 and above use Hoermann's PTRD
/// transformed-rejection sampler, which needs only a handful of uniforms
/// per variate regardless of the mean.
inline long long poisson(SplitMix64& gen, double mean) {
    if (!(mean >= 0.0))
        throw std::domain_error("poisson mean must be nonnegative");
    if (mean == 0.0) return 0;

    if (mean < 10.0) {
        const double limit = std::exp(-mean);
        long long k = 0;
        double product = 1.0;
        do {
            ++k;
            product *= gen.uniform();
        } while (product > limit);
        return k - 1;
    }

    // PTRD (Hoermann 1993). Constants are the published fit; the Stirling
    // tail below is accurate to ~1e-12 for k >= 10, and smaller k fall back
    // to an exact lgamma comparison.
    const double mu = mean;
    const double smu = std::sqrt(mu);
    const double b = 0.931 + 2.53 * smu;
    const double a = -0.059 + 0.02483 * b;
    const double alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    const double log_sqrt_2pi = 0.91893853320467267;

    while (true) {
        double u;
        double v = gen.uniform();
        if (v <= 0.86 * v_r) {
            u = v / v_r - 0.43;
            return static_cast<long long>(std::floor(
                (2.0 * a / (0.5 - std::fabs(u)) + b) * u + mu + 0.445));
        }
        if (v >= v_r) {
            u = gen.uniform() - 0.5;
        } else {
            u = v / v_r - 0.93;
            u = (u < 0.0 ? -0.5 : 0.5) - u;
            v = gen.uniform() * v_r;
        }
        const double us = 0.5 - std::fabs(u);
        if (us < 0.013 && v > us) continue;
        const double k =
            std::floor((2.0 * a / us + b) * u + mu + 0.445);
        v = v * alpha / (a / (us * us) + b);
        if (k >= 10.0) {
            const double correction =
                (1.0 / 12.0 - 1.0 / (360.0 * k * k)) / k;
            if (std::log(v * smu) <= (k + 0.5) * std::log(mu / k) - mu -
                                         log_sqrt_2pi + k - correction)
                return static_cast<long long>(k);
        } else if (k >= 0.0) {
            if (std::log(v) <=
                k * std::log(mu) - mu - std::lgamma(k + 1.0))
                return static_cast<long long>(k);
        }
    }
}

}  // namespace qpow::rng
