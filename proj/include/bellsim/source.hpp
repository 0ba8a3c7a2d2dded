// Copyright (c) 2026 bellsim contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "bellsim/gates.hpp"
#include "bellsim/linalg.hpp"
#include "bellsim/rng.hpp"

namespace bellsim {

// Stochastic Jones-vector sources. Each realization is a coherent
// polarization ket; averaging the unitarily transformed realizations gives
// the (generically mixed) ensemble state.

struct FixedJones {
    Ket ket;  // normalized at source construction
};

/// Linear polarization angle uniform on [lo, hi).
struct UniformLinear {
    double lo = 0.0;
    double hi = 3.14159265358979323846;
};

/// Linear polarization concentrated around `mean`. Polarization angles live
/// on a pi-periodic circle, so the von Mises draw acts on the doubled angle:
/// theta = mean + vm(kappa)/2.
struct VonMisesLinear {
    double mean = 0.0;
    double kappa = 1.0;
};

/// With probability fixed_weight emit the fixed ket, otherwise a Haar-random
/// ket (two standard complex Gaussians, normalized).
struct DepolarizedMix {
    double fixed_weight = 1.0;
    Ket ket;
};

class JonesSource {
  public:
    using Distribution = std::variant<FixedJones, UniformLinear, VonMisesLinear, DepolarizedMix>;

    JonesSource(Distribution dist, std::uint64_t seed) : dist_(std::move(dist)), seed_(seed) {
        if (auto* f = std::get_if<FixedJones>(&dist_)) check_jones(f->ket);
        if (auto* d = std::get_if<DepolarizedMix>(&dist_)) {
            check_jones(d->ket);
            if (d->fixed_weight < 0.0 || d->fixed_weight > 1.0)
                throw OutOfRange("depolarized_mix: weight must lie in [0,1]");
        }
    }

    static JonesSource fixed(Ket k, std::uint64_t seed = 0) {
        return JonesSource(FixedJones{normalized(std::move(k))}, seed);
    }

    static JonesSource uniform_linear(double lo, double hi, std::uint64_t seed) {
        return JonesSource(UniformLinear{lo, hi}, seed);
    }

    static JonesSource von_mises_linear(double mean, double kappa, std::uint64_t seed) {
        return JonesSource(VonMisesLinear{mean, kappa}, seed);
    }

    static JonesSource depolarized_mix(double fixed_weight, Ket k, std::uint64_t seed) {
        return JonesSource(DepolarizedMix{fixed_weight, normalized(std::move(k))}, seed);
    }

    /// The i-th realization. Each index gets its own counter substream, so the
    /// sequence is reproducible regardless of evaluation order.
    Ket draw(std::uint64_t index) const {
        CounterRng rng(derive_stream(seed_, index));
        if (const auto* f = std::get_if<FixedJones>(&dist_)) return f->ket;
        if (const auto* u = std::get_if<UniformLinear>(&dist_))
            return Ket::linear(rng.next_uniform(u->lo, u->hi));
        if (const auto* v = std::get_if<VonMisesLinear>(&dist_))
            return Ket::linear(v->mean + 0.5 * rng.next_von_mises(v->kappa));
        const auto& d = std::get<DepolarizedMix>(dist_);
        if (rng.next_double() < d.fixed_weight) return d.ket;
        return haar_ket(rng);
    }

    const Distribution& distribution() const { return dist_; }
    std::uint64_t seed() const { return seed_; }

  private:
    static void check_jones(const Ket& k) {
        if (k.dim() != 2) throw DimensionMismatch("JonesSource: Jones vectors are 2-dimensional");
        for (cplx z : k.amp)
            if (!finite(z)) throw OutOfRange("JonesSource: non-finite amplitude");
    }

    static Ket haar_ket(CounterRng& rng) {
        cplx a(rng.next_gaussian(), rng.next_gaussian());
        cplx b(rng.next_gaussian(), rng.next_gaussian());
        return normalized(Ket({a, b}));
    }

    Distribution dist_;
    std::uint64_t seed_;
};

inline std::vector<Ket> sample_source(const JonesSource& src, std::size_t n) {
    if (n < 1) throw OutOfRange("sample_source: n must be >= 1");
    std::vector<Ket> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(src.draw(i));
    return out;
}

namespace detail {

// Pairwise tree sum of realization projectors over [lo, hi). The topology is
// fixed by the index range alone, so a parallel evaluation of subtrees
// reproduces the sequential result bit for bit.
inline Operator realization_sum(const JonesSource& src, const Operator& network, const Ket& ancilla,
                                std::uint64_t lo, std::uint64_t hi) {
    if (hi - lo == 1) {
        Ket out = apply(network, tensor(src.draw(lo), ancilla));
        return outer(out, out, network.factor_dims);
    }
    std::uint64_t mid = lo + (hi - lo) / 2;
    return realization_sum(src, network, ancilla, lo, mid) +
           realization_sum(src, network, ancilla, mid, hi);
}

}  // namespace detail

/// Ensemble average (1/n) sum_i U(|psi_i>(x)|anc>)(<psi_i|(x)<anc|)U^dag.
inline DensityOperator ensemble_state(const JonesSource& src, const Operator& network,
                                      const Ket& ancilla, std::size_t n) {
    if (n < 1) throw OutOfRange("ensemble_state: n must be >= 1");
    if (network.dim != 2 * ancilla.dim())
        throw DimensionMismatch("ensemble_state: network dim " + std::to_string(network.dim) +
                                " vs source (2) x ancilla (" + std::to_string(ancilla.dim()) + ")");
    if (!all_finite(network.a)) throw NotUnitary("ensemble_state: non-finite network entry");
    double defect = unitarity_defect(network);
    if (defect > tol::gate)
        throw NotUnitary("ensemble_state: network unitarity defect " + std::to_string(defect) + " > 1e-10");
    Operator sum = detail::realization_sum(src, network, ancilla, 0, n);
    return validate_density((1.0 / static_cast<double>(n)) * sum);
}

/// v |Phi+><Phi+| + (1-v) I/4: the single-parameter isotropic-noise family
/// standing in for an imperfect Bell-like preparation.
inline DensityOperator bell_like_with_visibility(double v) {
    if (!(v >= 0.0 && v <= 1.0)) throw OutOfRange("visibility must lie in [0,1]");
    Operator m = v * phi_plus_state().op() + (0.25 * (1.0 - v)) * Operator::identity({2, 2});
    return validate_density(m);
}

}  // namespace bellsim
