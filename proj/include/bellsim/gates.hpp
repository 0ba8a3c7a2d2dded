// Copyright (c) 2026 bellsim contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>

#include "bellsim/linalg.hpp"

namespace bellsim {

// Angles are radians end-to-end inside the library; the CLI converts once at
// the config boundary.

inline constexpr double kInvSqrt2 = 0.70710678118654752440;

/// 2x2 Hadamard in the fixed {|0>,|1>} basis.
inline Operator hadamard() {
    return Operator::from_rows({{kInvSqrt2, kInvSqrt2}, {kInvSqrt2, -kInvSqrt2}});
}

/// CNOT on A (x) B, control A, target B: |x>|y> -> |x>|y^x>.
inline Operator cnot() {
    Operator m({2, 2});
    m.at(0, 0) = 1.0;
    m.at(1, 1) = 1.0;
    m.at(2, 3) = 1.0;
    m.at(3, 2) = 1.0;
    return m;
}

inline Operator pauli_z() { return Operator::from_rows({{1.0, 0.0}, {0.0, -1.0}}); }

inline Operator pauli_x() { return Operator::from_rows({{0.0, 1.0}, {1.0, 0.0}}); }

/// Analyzer basis at angle theta: |+_t> = cos t |0> + sin t |1>,
/// |-_t> = -sin t |0> + cos t |1>.
inline Ket plus_ket(double theta) { return Ket({cplx(std::cos(theta)), cplx(std::sin(theta))}); }

inline Ket minus_ket(double theta) { return Ket({cplx(-std::sin(theta)), cplx(std::cos(theta))}); }

/// Rank-1 projector onto |{+,-}_theta>.
inline Operator projector(double theta, int sign) {
    if (!std::isfinite(theta)) throw OutOfRange("projector: non-finite angle");
    if (sign != +1 && sign != -1) throw OutOfRange("projector: sign must be +1 or -1");
    return projector_onto(sign > 0 ? plus_ket(theta) : minus_ket(theta));
}

/// Dichotomic analyzer observable sigma_theta = P(+|t) - P(-|t)
/// = cos 2t sigma_z + sin 2t sigma_x.
inline Operator sigma_theta(double theta) {
    if (!std::isfinite(theta)) throw OutOfRange("sigma_theta: non-finite angle");
    double c = std::cos(2.0 * theta);
    double s = std::sin(2.0 * theta);
    return Operator::from_rows({{c, s}, {s, -c}});
}

/// The ideal entangling network U = CNOT . (H (x) I) on A (x) B.
inline Operator bell_network() { return mul(cnot(), tensor(hadamard(), Operator::identity(2))); }

/// Conjugate a two-beam state by the ideal Bell preparation network.
inline DensityOperator prepare_bell(const DensityOperator& rho_in) {
    if (rho_in.dim() != 4 || rho_in.factor_dims() != std::vector<std::size_t>{2, 2})
        throw DimensionMismatch("prepare_bell: expected a 4x4 state with factors (2,2)");
    Operator u = bell_network();
    Operator out = mul(mul(u, rho_in.op()), adjoint(u));
    out.factor_dims = {2, 2};
    return validate_density(out);
}

/// |Phi+> = (|00> + |11>)/sqrt(2).
inline Ket phi_plus() {
    return Ket({cplx(kInvSqrt2), cplx(0.0), cplx(0.0), cplx(kInvSqrt2)});
}

inline DensityOperator phi_plus_state() { return density_from_ket(phi_plus(), {2, 2}); }

}  // namespace bellsim
