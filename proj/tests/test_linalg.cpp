// Copyright (c) 2026 bellsim contributors
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch.hpp>
#include <limits>
#include <random>

#include "bellsim/gates.hpp"
#include "bellsim/linalg.hpp"
#include "oracles.hpp"

using namespace bellsim;

TEST_CASE("tensor: identity and sigma_z cases") {
    Operator i2 = Operator::identity(2);
    Operator i4 = tensor(i2, i2);
    CHECK(i4.dim == 4);
    CHECK(i4.factor_dims == std::vector<std::size_t>{2, 2});
    CHECK(max_abs_diff(i4, Operator::identity({2, 2})) == 0.0);

    Operator zi = tensor(pauli_z(), i2);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) {
            double expect = i != j ? 0.0 : (i < 2 ? 1.0 : -1.0);
            CHECK(zi.at(i, j) == cplx(expect));
        }
}

TEST_CASE("tensor agrees with the direct Kronecker definition") {
    std::mt19937 gen(11);
    for (int rep = 0; rep < 20; ++rep) {
        Operator a = oracle::random_hermitian(gen, 2);
        Operator b = oracle::random_hermitian(gen, 3);
        Operator viaLib = tensor(a, b);
        Operator viaDef = oracle::kron(a, b);
        CHECK(max_abs_diff(viaLib, viaDef) == 0.0);
    }
}

TEST_CASE("tensor is associative on entries, multiplicative on traces") {
    // Exactness check on dyadic entries, where products carry no rounding.
    std::mt19937 gen(12);
    std::uniform_int_distribution<int> pick(-4, 4);
    auto dyadic = [&](std::size_t dim) {
        Operator m(dim);
        for (std::size_t i = 0; i < dim * dim; ++i) m.a[i] = cplx(pick(gen) * 0.25, pick(gen) * 0.25);
        return m;
    };
    for (int rep = 0; rep < 10; ++rep) {
        Operator a = dyadic(2), b = dyadic(2), c = dyadic(3);
        CHECK(max_abs_diff(tensor(tensor(a, b), c), tensor(a, tensor(b, c))) == 0.0);
    }
    // Generic complex entries: associative up to one rounding of the products.
    for (int rep = 0; rep < 10; ++rep) {
        Operator a = oracle::random_hermitian(gen, 2);
        Operator b = oracle::random_hermitian(gen, 2);
        Operator c = oracle::random_hermitian(gen, 3);
        CHECK(max_abs_diff(tensor(tensor(a, b), c), tensor(a, tensor(b, c))) < 1e-14);
        CHECK(std::abs(trace(tensor(a, b)) - trace(a) * trace(b)) < 1e-12 * 16);
    }
}

TEST_CASE("partial_trace: product-state marginal") {
    std::mt19937 gen(13);
    for (int rep = 0; rep < 20; ++rep) {
        Operator ra = oracle::random_density(gen, 2);
        Operator rb = oracle::random_density(gen, 2);
        Operator joint = tensor(ra, rb);
        DensityOperator rho = validate_density(joint);
        DensityOperator kept_a = partial_trace(rho, {0});
        DensityOperator kept_b = partial_trace(rho, {1});
        CHECK(max_abs_diff(kept_a.op(), ra) < 1e-12);
        CHECK(max_abs_diff(kept_b.op(), rb) < 1e-12);
    }
}

TEST_CASE("partial_trace of |Phi+><Phi+| is maximally mixed on both sides") {
    DensityOperator bell = phi_plus_state();

    // Frozen expectation from the independent 4x4 contraction oracle.
    Operator from_oracle_b = oracle::trace_out_b(bell.op(), 2, 2);
    Operator from_oracle_a = oracle::trace_out_a(bell.op(), 2, 2);
    Operator half = 0.5 * Operator::identity(2);
    REQUIRE(max_abs_diff(from_oracle_b, half) < 1e-15);
    REQUIRE(max_abs_diff(from_oracle_a, half) < 1e-15);

    CHECK(max_abs_diff(partial_trace(bell, {0}).op(), half) < 1e-12);
    CHECK(max_abs_diff(partial_trace(bell, {1}).op(), half) < 1e-12);
}

TEST_CASE("partial_trace matches the loop oracle on random two-qubit states") {
    std::mt19937 gen(14);
    for (int rep = 0; rep < 25; ++rep) {
        Operator m = oracle::random_density(gen, 4, {2, 2});
        DensityOperator rho = validate_density(m);
        CHECK(max_abs_diff(partial_trace(rho, {0}).op(), oracle::trace_out_b(m, 2, 2)) < 1e-13);
        CHECK(max_abs_diff(partial_trace(rho, {1}).op(), oracle::trace_out_a(m, 2, 2)) < 1e-13);
        // trace and Hermiticity preserved
        CHECK(std::abs(trace(partial_trace(rho, {0}).op()) - cplx(1.0)) < 1e-12);
        CHECK(hermiticity_defect(partial_trace(rho, {0}).op()) == 0.0);
    }
}

TEST_CASE("partial_trace keeps relative order on three factors") {
    std::mt19937 gen(15);
    Operator ra = oracle::random_density(gen, 2);
    Operator rb = oracle::random_density(gen, 2);
    Operator rc = oracle::random_density(gen, 2);
    DensityOperator rho = validate_density(tensor(tensor(ra, rb), rc));
    DensityOperator kept = partial_trace(rho, {0, 2});
    CHECK(max_abs_diff(kept.op(), tensor(ra, rc)) < 1e-12);
    CHECK(kept.factor_dims() == std::vector<std::size_t>{2, 2});
}

TEST_CASE("partial_trace rejects bad subsystem sets") {
    DensityOperator rho = phi_plus_state();
    CHECK_THROWS_AS(partial_trace(rho, {}), InvalidSubsystem);
    CHECK_THROWS_AS(partial_trace(rho, {0, 1}), InvalidSubsystem);
    CHECK_THROWS_AS(partial_trace(rho, {2}), InvalidSubsystem);
    CHECK_THROWS_AS(partial_trace(rho, {0, 0}), InvalidSubsystem);
}

TEST_CASE("non-finite entries never pass a validation gate") {
    // NaN compares false against any bound, so the gates test finiteness
    // explicitly; a poisoned operator must not slip through.
    Operator nan_op = 0.5 * Operator::identity(2);
    nan_op.at(0, 1) = cplx(std::numeric_limits<double>::quiet_NaN(), 0.0);
    nan_op.at(1, 0) = nan_op.at(0, 1);
    CHECK_THROWS_AS(validate_density(nan_op), Error);
    CHECK_THROWS_AS(eig_hermitian(nan_op), Error);
    CHECK_THROWS_AS(projector(std::numeric_limits<double>::quiet_NaN(), +1), OutOfRange);
    CHECK_THROWS_AS(sigma_theta(std::numeric_limits<double>::infinity()), OutOfRange);
}

TEST_CASE("validate_density gates each invariant") {
    CHECK_NOTHROW(validate_density(0.5 * Operator::identity(2)));

    Operator notpsd(2);
    notpsd.at(0, 0) = 1.5;
    notpsd.at(1, 1) = -0.5;
    CHECK_THROWS_AS(validate_density(notpsd), NotPsd);

    Operator nottrace(2);
    nottrace.at(0, 0) = 0.6;
    nottrace.at(1, 1) = 0.6;
    CHECK_THROWS_AS(validate_density(nottrace), NotUnitTrace);

    Operator notherm = Operator::from_rows({{0.5, 0.3}, {0.1, 0.5}});
    CHECK_THROWS_AS(validate_density(notherm), NotHermitian);
}

TEST_CASE("eig_hermitian: Pauli matrices") {
    EigResult z = eig_hermitian(pauli_z());
    CHECK(z.values[0] == Approx(-1.0).margin(1e-12));
    CHECK(z.values[1] == Approx(1.0).margin(1e-12));

    EigResult x = eig_hermitian(pauli_x());
    CHECK(x.values[0] == Approx(-1.0).margin(1e-12));
    CHECK(x.values[1] == Approx(1.0).margin(1e-12));
    // eigenvector of +1 is (|0>+|1>)/sqrt2 up to phase
    const Ket& plus = x.vectors[1];
    CHECK(std::abs(std::abs(plus.amp[0]) - kInvSqrt2) < 1e-12);
    CHECK(std::abs(plus.amp[0] - plus.amp[1]) < 1e-12);
    const Ket& minus = x.vectors[0];
    CHECK(std::abs(std::abs(minus.amp[0]) - kInvSqrt2) < 1e-12);
    CHECK(std::abs(minus.amp[0] + minus.amp[1]) < 1e-12);
}

TEST_CASE("eig_hermitian reconstructs random Hermitian matrices") {
    std::mt19937 gen(16);
    for (std::size_t dim : {2u, 4u, 8u}) {
        for (int rep = 0; rep < 10; ++rep) {
            Operator h = oracle::random_hermitian(gen, dim);
            EigResult eig = eig_hermitian(h);
            REQUIRE(eig.values.size() == dim);
            for (std::size_t k = 0; k + 1 < dim; ++k) CHECK(eig.values[k] <= eig.values[k + 1]);
            Operator rebuilt(dim);
            for (std::size_t k = 0; k < dim; ++k)
                rebuilt = rebuilt + eig.values[k] * outer(eig.vectors[k], eig.vectors[k]);
            CHECK(max_abs_diff(rebuilt, h) < 1e-9);
            // orthonormality
            for (std::size_t k = 0; k < dim; ++k) {
                CHECK(std::abs(eig.vectors[k].norm() - 1.0) < 1e-12);
                for (std::size_t l = k + 1; l < dim; ++l)
                    CHECK(std::abs(inner(eig.vectors[k], eig.vectors[l])) < 1e-11);
            }
        }
    }
}

TEST_CASE("eig_hermitian rejects non-Hermitian input") {
    Operator m = Operator::from_rows({{0.0, 1.0}, {0.0, 0.0}});
    CHECK_THROWS_AS(eig_hermitian(m), NotHermitian);
}

TEST_CASE("Ket utilities") {
    Ket k = Ket::basis(4, 2);
    CHECK(k.amp[2] == cplx(1.0));
    CHECK(k.norm() == 1.0);
    CHECK_THROWS_AS(normalized(Ket({cplx(0.0), cplx(0.0)})), OutOfRange);
    Ket t = tensor(Ket::basis(2, 1), Ket::basis(2, 0));
    CHECK(t.amp[2] == cplx(1.0));  // |10> -> index 2
}
