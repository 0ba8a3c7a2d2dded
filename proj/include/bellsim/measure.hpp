// Copyright (c) 2026 bellsim contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "bellsim/empirical_model.hpp"
#include "bellsim/gates.hpp"
#include "bellsim/linalg.hpp"
#include "bellsim/rng.hpp"

namespace bellsim {

struct SettingPair {
    double alice = 0.0;  // analyzer angle on beam A, radians
    double bob = 0.0;    // analyzer angle on beam B, radians
};

struct ChshAngles {
    double theta = 0.0;
    double theta_prime = 0.0;
    double phi = 0.0;
    double phi_prime = 0.0;
};

/// Maximal-violation settings (0, pi/4, pi/8, -pi/8): S reaches 2*sqrt(2).
inline ChshAngles tsirelson_angles() {
    constexpr double pi = 3.14159265358979323846;
    return ChshAngles{0.0, pi / 4.0, pi / 8.0, -pi / 8.0};
}

/// Joint outcome table p(o,o') = Tr(rho (P_{o|alice} (x) P_{o'|bob})),
/// rows ordered (++, +-, -+, --).
inline std::array<double, 4> outcome_probs(const DensityOperator& rho_ab, const SettingPair& s) {
    if (rho_ab.dim() != 4 || rho_ab.factor_dims() != std::vector<std::size_t>{2, 2})
        throw DimensionMismatch("outcome_probs: expected a 4x4 state with factors (2,2)");
    std::array<double, 4> p{};
    int idx = 0;
    double sum = 0.0;
    for (int oa : {+1, -1}) {
        Operator pa = projector(s.alice, oa);
        for (int ob : {+1, -1}) {
            Operator effect = tensor(pa, projector(s.bob, ob));
            double v = trace(mul(rho_ab.op(), effect)).real();
            if (v < -tol::algebra)
                throw ConsistencyFailure("outcome_probs: negative probability " + std::to_string(v));
            p[static_cast<std::size_t>(idx++)] = v;
            sum += v;
        }
    }
    if (std::abs(sum - 1.0) > 1e-10)
        throw ConsistencyFailure("outcome_probs: table sums to " + std::to_string(sum));
    return p;
}

/// Malus-law pair (p(+|theta), p(-|theta)) for a single-beam state.
inline std::pair<double, double> local_probs(const DensityOperator& rho, double theta) {
    if (rho.dim() != 2) throw DimensionMismatch("local_probs: expected a single-beam 2x2 state");
    double plus = trace(mul(rho.op(), projector(theta, +1))).real();
    double minus = trace(mul(rho.op(), projector(theta, -1))).real();
    if (std::abs(plus + minus - 1.0) > tol::algebra)
        throw ConsistencyFailure("local_probs: probabilities sum to " + std::to_string(plus + minus));
    return {plus, minus};
}

/// Contrast A_theta = p(+|theta) - p(-|theta); cross-checked against the
/// operator form Tr(rho sigma_theta).
inline double contrast(const DensityOperator& rho, double theta) {
    auto [plus, minus] = local_probs(rho, theta);
    double from_probs = plus - minus;
    double from_operator = trace(mul(rho.op(), sigma_theta(theta))).real();
    if (std::abs(from_probs - from_operator) > tol::algebra)
        throw ConsistencyFailure("contrast: probability and operator routes disagree by " +
                                 std::to_string(std::abs(from_probs - from_operator)));
    return from_operator;
}

/// Correlation E(theta,phi) = Tr(rho (sigma_theta (x) sigma_phi));
/// cross-checked against the average product of outcomes.
inline double correlation(const DensityOperator& rho_ab, const SettingPair& s) {
    if (rho_ab.dim() != 4 || rho_ab.factor_dims() != std::vector<std::size_t>{2, 2})
        throw DimensionMismatch("correlation: expected a 4x4 state with factors (2,2)");
    double from_operator =
        trace(mul(rho_ab.op(), tensor(sigma_theta(s.alice), sigma_theta(s.bob)))).real();
    std::array<double, 4> p = outcome_probs(rho_ab, s);
    double from_probs = p[0] - p[1] - p[2] + p[3];
    if (std::abs(from_operator - from_probs) > tol::algebra)
        throw ConsistencyFailure("correlation: operator and outcome routes disagree by " +
                                 std::to_string(std::abs(from_operator - from_probs)));
    if (std::abs(from_operator) > 1.0 + tol::algebra)
        throw ConsistencyFailure("correlation: |E| = " + std::to_string(std::abs(from_operator)) + " > 1");
    return from_operator;
}

/// The four CHSH setting pairs in context order {a,b},{a,b'},{a',b},{a',b'}.
inline std::array<SettingPair, 4> chsh_setting_pairs(const ChshAngles& a) {
    return {SettingPair{a.theta, a.phi}, SettingPair{a.theta, a.phi_prime},
            SettingPair{a.theta_prime, a.phi}, SettingPair{a.theta_prime, a.phi_prime}};
}

/// S = E(theta,phi) + E(theta,phi') + E(theta',phi) - E(theta',phi').
inline double chsh(const DensityOperator& rho_ab, const ChshAngles& a) {
    std::array<SettingPair, 4> pairs = chsh_setting_pairs(a);
    return correlation(rho_ab, pairs[0]) + correlation(rho_ab, pairs[1]) +
           correlation(rho_ab, pairs[2]) - correlation(rho_ab, pairs[3]);
}

// ---------------------------------------------------------------------------
// Bridges: a conditioned two-beam state plus the four CHSH contexts induce an
// empirical model.
// ---------------------------------------------------------------------------

/// Exact (analytic) empirical model of the CHSH experiment on rho_ab.
inline EmpiricalModel induce_model(const DensityOperator& rho_ab, const ChshAngles& a) {
    Scenario sc = chsh_scenario();
    std::vector<ContextTable> tables;
    tables.reserve(4);
    for (const SettingPair& s : chsh_setting_pairs(a)) {
        std::array<double, 4> p = outcome_probs(rho_ab, s);
        // Clamp the odd -1e-16 so the stored table is a genuine distribution.
        std::vector<double> row(p.begin(), p.end());
        for (double& v : row) v = std::max(v, 0.0);
        tables.push_back(ContextTable::from_doubles(std::move(row)));
    }
    return EmpiricalModel(std::move(sc), std::move(tables), Provenance::analytic);
}

/// Finite-statistics empirical model: per-context seeded sampling of the
/// analytic outcome distribution. Frequencies are exact rationals
/// (counts/shots). Context substreams make the result independent of
/// evaluation order.
inline EmpiricalModel monte_carlo_model(const DensityOperator& rho_ab, const ChshAngles& a,
                                        std::uint64_t shots, std::uint64_t seed) {
    if (shots < 1) throw OutOfRange("monte_carlo_model: shots must be >= 1");
    Scenario sc = chsh_scenario();
    std::array<SettingPair, 4> pairs = chsh_setting_pairs(a);
    std::vector<ContextTable> tables;
    tables.reserve(4);
    for (std::size_t c = 0; c < 4; ++c) {
        std::array<double, 4> p = outcome_probs(rho_ab, pairs[c]);
        double c0 = p[0], c1 = c0 + p[1], c2 = c1 + p[2];
        std::array<std::uint64_t, 4> counts{};
        CounterRng rng(derive_stream(derive_labeled(seed, "mc-context"), c));
        for (std::uint64_t shot = 0; shot < shots; ++shot) {
            double u = rng.next_double();
            std::size_t cell = u < c0 ? 0 : u < c1 ? 1 : u < c2 ? 2 : 3;
            ++counts[cell];
        }
        std::vector<Rational> freq(4);
        for (std::size_t k = 0; k < 4; ++k) freq[k] = Rational(counts[k], shots);
        tables.push_back(ContextTable::from_exact(std::move(freq)));
    }
    return EmpiricalModel(std::move(sc), std::move(tables), Provenance::sampled,
                          SampleInfo{shots, seed});
}

}  // namespace bellsim
