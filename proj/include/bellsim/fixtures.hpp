// Copyright (c) 2026 bellsim contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "bellsim/empirical_model.hpp"
#include "bellsim/measure.hpp"
#include "bellsim/source.hpp"

namespace bellsim {

// Canonical reference models, exact where the numbers are rational.

/// PR box: perfect correlation in three contexts, perfect anticorrelation in
/// {a',b'}; no-signalling with S = 4.
inline EmpiricalModel pr_box_model() {
    Rational h(1, 2), z(0);
    std::vector<ContextTable> tables;
    tables.push_back(ContextTable::from_exact({h, z, z, h}));
    tables.push_back(ContextTable::from_exact({h, z, z, h}));
    tables.push_back(ContextTable::from_exact({h, z, z, h}));
    tables.push_back(ContextTable::from_exact({z, h, h, z}));
    return EmpiricalModel(chsh_scenario(), std::move(tables));
}

/// Point mass on the all-(+1) global assignment. Its own global section.
inline EmpiricalModel deterministic_model() {
    std::vector<ContextTable> tables;
    for (int c = 0; c < 4; ++c)
        tables.push_back(ContextTable::from_exact({Rational(1), Rational(0), Rational(0), Rational(0)}));
    return EmpiricalModel(chsh_scenario(), std::move(tables));
}

/// Product state |0><0| (x) I/2 measured at angles (0, pi/4, 0, pi/4): every
/// cell is rational, every CHSH member is 0.
inline EmpiricalModel product_state_model() {
    Rational h(1, 2), q(1, 4), z(0);
    std::vector<ContextTable> tables;
    tables.push_back(ContextTable::from_exact({h, h, z, z}));  // {a,b}: Alice surely +
    tables.push_back(ContextTable::from_exact({h, h, z, z}));  // {a,b'}
    tables.push_back(ContextTable::from_exact({q, q, q, q}));  // {a',b}: both unbiased
    tables.push_back(ContextTable::from_exact({q, q, q, q}));  // {a',b'}
    return EmpiricalModel(chsh_scenario(), std::move(tables));
}

/// Maximal-violation model: |Phi+> at the angles (0, pi/4, pi/8, -pi/8).
inline EmpiricalModel phi_plus_tsirelson_model() {
    return induce_model(phi_plus_state(), tsirelson_angles());
}

/// Visibility-scaled Bell-like model at the Tsirelson angles; S = 2*sqrt(2)*v.
inline EmpiricalModel visibility_model(double v) {
    return induce_model(bell_like_with_visibility(v), tsirelson_angles());
}

}  // namespace bellsim
