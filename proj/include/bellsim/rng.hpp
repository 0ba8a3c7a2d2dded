// Copyright (c) 2026 bellsim contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace bellsim {

// Counter-based generator in the splitmix64 family: the n-th output is a
// finalizer applied to key + n*gamma, so any output can be produced without
// stepping through its predecessors. Substreams are derived by re-keying,
// which makes ensemble results independent of iteration order and thread
// count.

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

inline std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
}

/// Child key for substream `stream` of the generator keyed by `root`.
inline std::uint64_t derive_stream(std::uint64_t root, std::uint64_t stream) {
    return mix64(root ^ mix64(stream * kGolden + 0x1F123BB5159A55E5ull));
}

/// Labeled key derivation (FNV-1a over the label, folded into the root).
/// Used to hand independent seeds to submodules from one config seed.
inline std::uint64_t derive_labeled(std::uint64_t root, std::string_view label) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (char c : label) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ull;
    }
    return mix64(root ^ mix64(h));
}

class CounterRng {
  public:
    explicit CounterRng(std::uint64_t key) : key_(key) {}

    std::uint64_t next_u64() { return mix64(key_ + (counter_++) * kGolden); }

    /// Uniform in [0, 1), 53 mantissa bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi).
    double next_uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    /// Standard normal via Box-Muller (no caching, so the draw count per
    /// sample is fixed and streams stay reproducible).
    double next_gaussian() {
        double u1 = 1.0 - next_double();  // (0, 1]
        double u2 = next_double();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
    }

    /// von Mises on (-pi, pi] with concentration kappa (Best-Fisher rejection).
    double next_von_mises(double kappa) {
        constexpr double pi = 3.14159265358979323846;
        if (kappa < 1e-8) return next_uniform(-pi, pi);
        double tau = 1.0 + std::sqrt(1.0 + 4.0 * kappa * kappa);
        double rho = (tau - std::sqrt(2.0 * tau)) / (2.0 * kappa);
        double r = (1.0 + rho * rho) / (2.0 * rho);
        for (;;) {
            double u1 = next_double();
            double u2 = next_double();
            double u3 = next_double();
            double z = std::cos(pi * u1);
            double f = (1.0 + r * z) / (r + z);
            double c = kappa * (r - f);
            if (c * (2.0 - c) - u2 > 0.0 || std::log(c / u2) + 1.0 - c >= 0.0) {
                double a = std::acos(f);
                return u3 < 0.5 ? -a : a;
            }
        }
    }

    CounterRng substream(std::uint64_t stream) const { return CounterRng(derive_stream(key_, stream)); }

  private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace bellsim
