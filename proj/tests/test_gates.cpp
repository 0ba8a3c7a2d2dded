// Copyright (c) 2026 bellsim contributors
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch.hpp>
#include <random>

#include "bellsim/gates.hpp"
#include "oracles.hpp"

using namespace bellsim;

TEST_CASE("hadamard maps the computational basis to the diagonal basis") {
    Operator h = hadamard();
    Ket h0 = apply(h, Ket::basis(2, 0));
    CHECK(std::abs(h0.amp[0] - cplx(kInvSqrt2)) < 1e-15);
    CHECK(std::abs(h0.amp[1] - cplx(kInvSqrt2)) < 1e-15);
    Ket h1 = apply(h, Ket::basis(2, 1));
    CHECK(std::abs(h1.amp[0] - cplx(kInvSqrt2)) < 1e-15);
    CHECK(std::abs(h1.amp[1] + cplx(kInvSqrt2)) < 1e-15);
    CHECK(max_abs_diff(mul(h, h), Operator::identity(2)) < 1e-12);
    CHECK(unitarity_defect(h) < 1e-12);
}

TEST_CASE("cnot permutes basis states and is an involution") {
    Operator cx = cnot();
    CHECK(cx.factor_dims == std::vector<std::size_t>{2, 2});
    // |10> -> |11>
    Ket out = apply(cx, tensor(Ket::basis(2, 1), Ket::basis(2, 0)));
    CHECK(std::abs(out.amp[3] - cplx(1.0)) < 1e-15);
    // |00> fixed
    Ket fixed = apply(cx, tensor(Ket::basis(2, 0), Ket::basis(2, 0)));
    CHECK(std::abs(fixed.amp[0] - cplx(1.0)) < 1e-15);
    CHECK(max_abs_diff(mul(cx, cx), Operator::identity({2, 2})) == 0.0);
    CHECK(unitarity_defect(cx) == 0.0);
    CHECK(unitarity_defect(bell_network()) < 1e-12);
}

TEST_CASE("projector: explicit values and completeness") {
    CHECK(max_abs_diff(projector(0.0, +1), Operator::from_rows({{1.0, 0.0}, {0.0, 0.0}})) == 0.0);

    // Direct evaluation at pi/4: cos = sin = 1/sqrt2, so all entries are 1/2.
    Operator p45 = projector(3.14159265358979323846 / 4.0, +1);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) CHECK(std::abs(p45.at(i, j) - cplx(0.5)) < 1e-15);

    for (int k = 0; k < 25; ++k) {
        double theta = -3.0 + 0.25 * k;
        Operator plus = projector(theta, +1);
        Operator minus = projector(theta, -1);
        CHECK(max_abs_diff(plus + minus, Operator::identity(2)) < 1e-12);
        CHECK(max_abs_diff(mul(plus, plus), plus) < 1e-12);   // idempotent
        CHECK(max_abs(mul(plus, minus)) < 1e-12);             // orthogonal
    }
    CHECK_THROWS_AS(projector(0.0, 2), OutOfRange);
}

TEST_CASE("sigma_theta: special angles and dichotomy") {
    constexpr double pi = 3.14159265358979323846;
    CHECK(max_abs_diff(sigma_theta(0.0), pauli_z()) < 1e-15);
    CHECK(max_abs_diff(sigma_theta(pi / 4.0), pauli_x()) < 1e-15);
    // cos(pi/4) = sin(pi/4) = 1/sqrt2 substitution
    CHECK(max_abs_diff(sigma_theta(pi / 8.0), kInvSqrt2 * (pauli_z() + pauli_x())) < 1e-15);

    for (int k = 0; k < 100; ++k) {
        double theta = -pi + 2.0 * pi * k / 100.0;
        Operator s = sigma_theta(theta);
        CHECK(max_abs_diff(s, projector(theta, +1) - projector(theta, -1)) < 1e-12);
        CHECK(std::abs(trace(s)) < 1e-12);
        CHECK(max_abs_diff(mul(s, s), Operator::identity(2)) < 1e-12);
        EigResult eig = eig_hermitian(s);
        CHECK(eig.values[0] == Approx(-1.0).margin(1e-12));
        CHECK(eig.values[1] == Approx(1.0).margin(1e-12));
    }
}

TEST_CASE("prepare_bell: |00> becomes |Phi+>") {
    DensityOperator in = density_from_ket(tensor(Ket::basis(2, 0), Ket::basis(2, 0)), {2, 2});
    DensityOperator out = prepare_bell(in);
    CHECK(max_abs_diff(out.op(), phi_plus_state().op()) < 1e-12);
}

TEST_CASE("prepare_bell: maximally mixed state is invariant") {
    DensityOperator in = validate_density(0.25 * Operator::identity({2, 2}));
    DensityOperator out = prepare_bell(in);
    CHECK(max_abs_diff(out.op(), in.op()) < 1e-12);
}

TEST_CASE("prepare_bell: |10> becomes |Phi->") {
    // By hand: (H(x)I)|10> = (|00>-|10>)/sqrt2, then CNOT maps |10>->|11>,
    // giving (|00>-|11>)/sqrt2 = |Phi->.
    DensityOperator in = density_from_ket(tensor(Ket::basis(2, 1), Ket::basis(2, 0)), {2, 2});
    Ket phi_minus({cplx(kInvSqrt2), cplx(0.0), cplx(0.0), cplx(-kInvSqrt2)});
    DensityOperator out = prepare_bell(in);
    CHECK(max_abs_diff(out.op(), outer(phi_minus, phi_minus, {2, 2})) < 1e-12);
}

TEST_CASE("prepare_bell preserves trace and PSD on random inputs") {
    std::mt19937 gen(21);
    for (int rep = 0; rep < 20; ++rep) {
        DensityOperator in = validate_density(oracle::random_density(gen, 4, {2, 2}));
        DensityOperator out = prepare_bell(in);  // validate_density inside re-checks all gates
        CHECK(std::abs(trace(out.op()) - cplx(1.0)) < 1e-12);
        CHECK(eig_hermitian(out.op()).values.front() > -1e-10);
    }
}

TEST_CASE("prepare_bell rejects wrong shapes") {
    DensityOperator flat = validate_density(0.25 * Operator::identity(4));
    CHECK_THROWS_AS(prepare_bell(flat), DimensionMismatch);
}
