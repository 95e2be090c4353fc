#pragma once

#include <cmath>
#include <cstdint>

#include "core/errors.hpp"

namespace lagedge {

// SplitMix64 finalizer (Steele, Lea, Flood / Vigna reference code).
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Counter-style stream derivation: the per-replica seed is a pure function of
// (master_seed, replica, attempt), so replicas are reproducible under any
// parallel schedule and retries stay deterministic.
inline std::uint64_t derive_stream_seed(std::uint64_t master_seed,
                                        std::uint64_t replica,
                                        std::uint64_t attempt = 0) {
    std::uint64_t s = master_seed;
    std::uint64_t h = splitmix64_next(s);
    s = h ^ (replica + 0xD1B54A32D192ED03ULL);
    h = splitmix64_next(s);
    s = h ^ (attempt + 0x8BB84B93962EACC9ULL);
    return splitmix64_next(s);
}

// xoshiro256++ (Blackman & Vigna, arXiv:1805.01407), seeded via SplitMix64.
// Self-contained so streams are bit-identical across platforms; the standard
// library distributions are implementation-defined and unusable for that.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t x = seed;
        for (auto& v : s_) v = splitmix64_next(x);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform on (0,1): 53-bit mantissa, offset half an ulp so 0 never occurs.
    double uniform() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

    // Standard normal via the Marsaglia polar method; one spare cached.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        has_spare_ = true;
        return u * f;
    }

    // Gamma(shape, scale) by Marsaglia & Tsang (2000), "A simple method for
    // generating gamma variables"; shapes below one use the boost
    // X ~ Gamma(shape+1), X * U^(1/shape).
    double gamma(double shape, double scale) {
        if (!(shape > 0.0) || !(scale > 0.0))
            throw InvalidArgumentError("gamma: shape and scale must be positive");
        if (shape < 1.0) {
            const double x = gamma(shape + 1.0, scale);
            return x * std::pow(uniform(), 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform();
            if (u < 1.0 - 0.0331 * (x * x) * (x * x)) return d * v * scale;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v * scale;
        }
    }

    // Chi-squared with (possibly fractional) dof, as Gamma(dof/2, 2).
    double chi_squared(double dof) {
        if (!(dof > 0.0)) throw InvalidArgumentError("chi_squared: dof must be positive");
        return gamma(0.5 * dof, 2.0);
    }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t s_[4];
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace lagedge
