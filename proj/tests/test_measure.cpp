// Copyright (c) 2026 bellsim contributors
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch.hpp>
#include <cmath>
#include <random>

#include "bellsim/measure.hpp"
#include "bellsim/source.hpp"
#include "oracles.hpp"

using namespace bellsim;

namespace {
constexpr double pi = 3.14159265358979323846;
}

TEST_CASE("outcome_probs: Bell state at aligned analyzers") {
    std::array<double, 4> p = outcome_probs(phi_plus_state(), {0.0, 0.0});
    CHECK(p[0] == Approx(0.5).margin(1e-12));  // ++
    CHECK(p[1] == Approx(0.0).margin(1e-12));  // +-
    CHECK(p[2] == Approx(0.0).margin(1e-12));  // -+
    CHECK(p[3] == Approx(0.5).margin(1e-12));  // --
}

TEST_CASE("outcome_probs: maximally mixed and product eigenstate") {
    DensityOperator mixed = validate_density(0.25 * Operator::identity({2, 2}));
    for (double theta : {0.0, 0.3, 1.2})
        for (double phi_b : {0.1, 0.9}) {
            std::array<double, 4> p = outcome_probs(mixed, {theta, phi_b});
            for (double v : p) CHECK(v == Approx(0.25).margin(1e-12));
        }

    DensityOperator zz =
        density_from_ket(tensor(Ket::basis(2, 0), Ket::basis(2, 0)), {2, 2});
    std::array<double, 4> p = outcome_probs(zz, {0.0, 0.0});
    CHECK(p[0] == Approx(1.0).margin(1e-12));
}

TEST_CASE("local_probs implements Malus' law") {
    for (double theta0 : {0.0, 0.35, 1.1}) {
        DensityOperator beam = density_from_ket(Ket::linear(theta0));
        for (double theta : {0.0, 0.25, 0.8, 1.4}) {
            auto [plus, minus] = local_probs(beam, theta);
            double c = std::cos(theta - theta0);
            CHECK(plus == Approx(c * c).margin(1e-12));
            CHECK(plus + minus == Approx(1.0).margin(1e-12));
        }
    }
    auto [p, m] = local_probs(validate_density(0.5 * Operator::identity(2)), 0.7);
    CHECK(p == Approx(0.5).margin(1e-12));
    CHECK(m == Approx(0.5).margin(1e-12));
    auto [p2, m2] = local_probs(density_from_ket(Ket::basis(2, 0)), pi / 2.0);
    CHECK(p2 == Approx(0.0).margin(1e-12));
    CHECK(m2 == Approx(1.0).margin(1e-12));
}

TEST_CASE("contrast: frozen values and the two-route cross-check") {
    CHECK(contrast(density_from_ket(Ket::basis(2, 0)), 0.0) == Approx(1.0).margin(1e-12));
    CHECK(contrast(validate_density(0.5 * Operator::identity(2)), 0.9) == Approx(0.0).margin(1e-12));
    // cos^2(pi/8) - sin^2(pi/8) = cos(pi/4) = 1/sqrt2
    CHECK(contrast(density_from_ket(Ket::basis(2, 0)), pi / 8.0) ==
          Approx(kInvSqrt2).margin(1e-12));

    std::mt19937 gen(41);
    for (int rep = 0; rep < 30; ++rep) {
        DensityOperator rho = validate_density(oracle::random_density(gen, 2));
        double theta = std::uniform_real_distribution<double>(-pi, pi)(gen);
        double a = contrast(rho, theta);  // throws if the two routes disagree
        CHECK(std::abs(a) <= 1.0 + 1e-12);
    }
}

TEST_CASE("correlation: Bell state follows cos(2(theta-phi)) on a 20x20 grid") {
    DensityOperator bell = phi_plus_state();
    for (int i = 0; i < 20; ++i)
        for (int j = 0; j < 20; ++j) {
            double theta = -pi + 2.0 * pi * i / 20.0;
            double phi_b = -pi + 2.0 * pi * j / 20.0;
            CHECK(correlation(bell, {theta, phi_b}) ==
                  Approx(std::cos(2.0 * (theta - phi_b))).margin(1e-12));
        }
}

TEST_CASE("correlation: product of maximally mixed locals vanishes") {
    DensityOperator mixed = validate_density(0.25 * Operator::identity({2, 2}));
    CHECK(correlation(mixed, {0.4, 1.3}) == Approx(0.0).margin(1e-12));
}

TEST_CASE("correlation is linear in visibility") {
    SettingPair s{0.2, 0.9};
    double expect = std::cos(2.0 * (s.alice - s.bob));
    for (double v : {0.0, 0.25, 0.5, 0.75, 1.0})
        CHECK(correlation(bell_like_with_visibility(v), s) == Approx(v * expect).margin(1e-12));
}

TEST_CASE("chsh: Tsirelson point and product bound") {
    CHECK(chsh(phi_plus_state(), tsirelson_angles()) ==
          Approx(2.0 * std::sqrt(2.0)).margin(1e-12));

    std::mt19937 gen(42);
    std::uniform_real_distribution<double> angle(-pi, pi);
    for (int rep = 0; rep < 50; ++rep) {
        Operator pa = oracle::random_density(gen, 2);
        Operator pb = oracle::random_density(gen, 2);
        DensityOperator prod = validate_density(tensor(pa, pb));
        ChshAngles a{angle(gen), angle(gen), angle(gen), angle(gen)};
        CHECK(std::abs(chsh(prod, a)) <= 2.0 + 1e-10);
    }
}

TEST_CASE("chsh at fixed angles is linear in visibility") {
    double s1 = chsh(bell_like_with_visibility(1.0), tsirelson_angles());
    for (double v : {0.1, 0.33, 0.5, 0.77, 0.95})
        CHECK(chsh(bell_like_with_visibility(v), tsirelson_angles()) ==
              Approx(v * s1).margin(1e-10));
}

TEST_CASE("chsh respects the Tsirelson bound on random states and angles") {
    std::mt19937 gen(43);
    std::uniform_real_distribution<double> angle(-pi, pi);
    for (int rep = 0; rep < 200; ++rep) {
        DensityOperator rho = validate_density(oracle::random_density(gen, 4, {2, 2}));
        ChshAngles a{angle(gen), angle(gen), angle(gen), angle(gen)};
        CHECK(std::abs(chsh(rho, a)) <= 2.0 * std::sqrt(2.0) + 1e-9);
    }
}

TEST_CASE("no-signalling of induced tables") {
    std::mt19937 gen(44);
    std::uniform_real_distribution<double> angle(-pi, pi);
    for (int rep = 0; rep < 50; ++rep) {
        DensityOperator rho = validate_density(oracle::random_density(gen, 4, {2, 2}));
        double theta = angle(gen), phi1 = angle(gen), phi2 = angle(gen);
        std::array<double, 4> p1 = outcome_probs(rho, {theta, phi1});
        std::array<double, 4> p2 = outcome_probs(rho, {theta, phi2});
        // Alice's marginal must not depend on Bob's setting.
        CHECK(std::abs((p1[0] + p1[1]) - (p2[0] + p2[1])) < 1e-12);
        CHECK(std::abs((p1[2] + p1[3]) - (p2[2] + p2[3])) < 1e-12);
    }
}

TEST_CASE("induce_model produces compatible CHSH tables") {
    EmpiricalModel m = induce_model(phi_plus_state(), tsirelson_angles());
    CHECK(m.provenance() == Provenance::analytic);
    REQUIRE(m.tables().size() == 4);
    CHECK(check_compatibility(m, 1e-10).pass);
    CHECK(chsh_family_value(m).value == Approx(2.0 * std::sqrt(2.0)).margin(1e-10));

    EmpiricalModel mixed = induce_model(validate_density(0.25 * Operator::identity({2, 2})),
                                        tsirelson_angles());
    for (const auto& t : mixed.tables())
        for (double v : t.p) CHECK(v == Approx(0.25).margin(1e-12));
}

TEST_CASE("monte_carlo_model: determinism and single-shot tables") {
    DensityOperator bell = phi_plus_state();
    EmpiricalModel a = monte_carlo_model(bell, tsirelson_angles(), 1000, 7);
    EmpiricalModel b = monte_carlo_model(bell, tsirelson_angles(), 1000, 7);
    CHECK(a == b);
    CHECK(a.provenance() == Provenance::sampled);
    CHECK(a.sample_info().shots == 1000);

    EmpiricalModel single = monte_carlo_model(bell, tsirelson_angles(), 1, 3);
    for (const auto& t : single.tables()) {
        double sum = 0.0;
        int units = 0;
        for (double v : t.p) {
            sum += v;
            if (v == 1.0) ++units;
        }
        CHECK(sum == Approx(1.0));
        CHECK(units == 1);  // a single unit cell
    }
}

TEST_CASE("monte_carlo_model: empirical S within propagated standard error") {
    const std::uint64_t shots = 1000000;
    EmpiricalModel m = monte_carlo_model(phi_plus_state(), tsirelson_angles(), shots, 2026);
    auto fam = chsh_family_value(m);
    // Binomial propagation: var(E_C) = (1 - E_C^2)/shots, sigma_S in quadrature.
    double var = 0.0;
    for (double e : fam.correlations) var += (1.0 - e * e) / static_cast<double>(shots);
    double sigma = std::sqrt(var);
    double s = fam.correlations[0] + fam.correlations[1] + fam.correlations[2] - fam.correlations[3];
    CHECK(std::abs(s - 2.0 * std::sqrt(2.0)) < 3.0 * sigma);
}
