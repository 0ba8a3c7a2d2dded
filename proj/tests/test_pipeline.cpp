// Copyright (c) 2026 bellsim contributors
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch.hpp>
#include <cmath>
#include <sstream>

#include "bellsim/bellsim.hpp"

using namespace bellsim;

namespace {

nlohmann::json base_config() {
    return nlohmann::json{
        {"version", 1},
        {"seed", 42},
        {"source", {{"kind", "fixed"}, {"jones", {1.0, 0.0}}}},
        {"preparation", {{"network", "hadamard_cnot"}}},
        {"angles",
         {{"unit", "deg"}, {"theta", 0.0}, {"theta_prime", 45.0}, {"phi", 22.5}, {"phi_prime", -22.5}}},
    };
}

nlohmann::json matrix_json(const Operator& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < m.dim; ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t j = 0; j < m.dim; ++j)
            row.push_back(nlohmann::json::array({m.at(i, j).real(), m.at(i, j).imag()}));
        rows.push_back(row);
    }
    return rows;
}

}  // namespace

TEST_CASE("config: degrees convert once at the boundary") {
    ExperimentConfig cfg = parse_config(base_config());
    CHECK(cfg.angles.theta == Approx(0.0));
    CHECK(cfg.angles.theta_prime == Approx(3.14159265358979323846 / 4.0));
    CHECK(cfg.angles.phi == Approx(3.14159265358979323846 / 8.0));
    CHECK(cfg.angles.phi_prime == Approx(-3.14159265358979323846 / 8.0));
}

TEST_CASE("config: unknown keys and missing units are hard errors") {
    nlohmann::json j = base_config();
    j["source"]["typo"] = 3;
    CHECK_THROWS_AS(parse_config(j), ConfigError);

    nlohmann::json no_unit = base_config();
    no_unit["angles"].erase("unit");
    CHECK_THROWS_AS(parse_config(no_unit), ConfigError);

    nlohmann::json bad_unit = base_config();
    bad_unit["angles"]["unit"] = "furlong";
    CHECK_THROWS_AS(parse_config(bad_unit), ConfigError);

    nlohmann::json two_preps = base_config();
    two_preps["preparation"] = {{"network", "visibility"}};  // v missing
    CHECK_THROWS_AS(parse_config(two_preps), ConfigError);

    CHECK_THROWS_AS(parse_config_text("{ not json"), ConfigError);
}

TEST_CASE("run: ideal analytic pipeline hits the Tsirelson point, infeasible") {
    RunReport r = run(parse_config(base_config()));
    CHECK(r.state_chsh == Approx(2.0 * std::sqrt(2.0)).margin(1e-12));
    CHECK(r.chsh_canonical == Approx(2.0 * std::sqrt(2.0)).margin(1e-12));
    CHECK(r.family.value == Approx(2.0 * std::sqrt(2.0)).margin(1e-10));
    CHECK_FALSE(r.section.feasible());
    CHECK(r.compat.pass);
    CHECK(r.success_prob == 1.0);
    CHECK(r.purity == Approx(1.0).margin(1e-12));
}

TEST_CASE("run: explicit identity network on |00> glues") {
    nlohmann::json j = base_config();
    j["preparation"] = {{"network", "explicit"},
                        {"unitary", matrix_json(Operator::identity(4))},
                        {"factors", {2, 2}}};
    RunReport r = run(parse_config(j));
    CHECK(std::abs(r.state_chsh) <= 2.0 + 1e-10);
    CHECK(r.state_chsh == Approx(std::sqrt(2.0)).margin(1e-12));
    CHECK(r.section.feasible());
}

TEST_CASE("run: visibility preset 0.5 gives S = sqrt(2), feasible") {
    nlohmann::json j = base_config();
    j["preparation"] = {{"network", "visibility"}, {"v", 0.5}};
    RunReport r = run(parse_config(j));
    CHECK(r.state_chsh == Approx(std::sqrt(2.0)).margin(1e-12));
    CHECK(r.section.feasible());
}

TEST_CASE("run: flagged explicit network with conditioning reproduces Phi+") {
    // (Bell network (x) I_E) on A(x)B(x)E, then keep flag |0>: deterministic
    // conditioning with the ideal Bell output on AB.
    Operator net = tensor(bell_network(), Operator::identity(2));
    nlohmann::json j = base_config();
    j["preparation"] = {{"network", "explicit"}, {"unitary", matrix_json(net)}, {"factors", {2, 2, 2}}};
    j["flag_prep"] = {{"jones", {1.0, 0.0}}};
    j["conditioning"] = {{"flag", "keep"}, {"index", 0}};
    RunReport r = run(parse_config(j));
    CHECK(r.conditioned);
    CHECK(r.success_prob == Approx(1.0).margin(1e-12));
    CHECK(r.state_chsh == Approx(2.0 * std::sqrt(2.0)).margin(1e-12));
    CHECK_FALSE(r.section.feasible());

    // Conditioning on the never-occurring flag is a zero-probability event.
    j["conditioning"]["index"] = 1;
    CHECK_THROWS_AS(run(parse_config(j)), ZeroProbabilityEvent);
}

TEST_CASE("run: superposed flag splits the ensemble") {
    // Network flips the flag conditioned on A after the Bell preparation:
    // CNOT(A->E) . (U_bell (x) I). Keeping flag |0> then projects A to |0>.
    Operator cnot_ae({2, 2, 2});
    for (std::size_t a = 0; a < 2; ++a)
        for (std::size_t b = 0; b < 2; ++b)
            for (std::size_t e = 0; e < 2; ++e) {
                std::size_t in = 4 * a + 2 * b + e;
                std::size_t out = 4 * a + 2 * b + (e ^ a);
                cnot_ae.at(out, in) = 1.0;
            }
    Operator net = mul(cnot_ae, tensor(bell_network(), Operator::identity(2)));
    nlohmann::json j = base_config();
    j["preparation"] = {{"network", "explicit"}, {"unitary", matrix_json(net)}, {"factors", {2, 2, 2}}};
    j["flag_prep"] = {{"jones", {1.0, 0.0}}};
    j["conditioning"] = {{"flag", "keep"}, {"index", 0}};
    RunReport r = run(parse_config(j));
    CHECK(r.conditioned);
    CHECK(r.success_prob == Approx(0.5).margin(1e-12));
    // Conditioned state is |00><00|: a product state, so it glues.
    CHECK(r.section.feasible());
    CHECK(r.purity == Approx(1.0).margin(1e-10));
}

TEST_CASE("run: missing conditioning on a flagged state is a config error") {
    Operator net = tensor(bell_network(), Operator::identity(2));
    nlohmann::json j = base_config();
    j["preparation"] = {{"network", "explicit"}, {"unitary", matrix_json(net)}, {"factors", {2, 2, 2}}};
    j["flag_prep"] = {{"jones", {1.0, 0.0}}};
    CHECK_THROWS_AS(run(parse_config(j)), ConfigError);
}

TEST_CASE("run: non-unitary explicit network is a config error") {
    nlohmann::json j = base_config();
    j["preparation"] = {{"network", "explicit"},
                        {"unitary", matrix_json(0.9 * Operator::identity(4))},
                        {"factors", {2, 2}}};
    CHECK_THROWS_AS(run(parse_config(j)), ConfigError);
}

TEST_CASE("run: sampled statistics stay close to analytic and are deterministic") {
    nlohmann::json j = base_config();
    j["statistics"] = {{"mode", "shots"}, {"shots", 200000}};
    RunReport r1 = run(parse_config(j));
    RunReport r2 = run(parse_config(j));
    CHECK(r1.model == r2.model);
    CHECK(r1.chsh_canonical == r2.chsh_canonical);
    CHECK(r1.chsh_canonical == Approx(2.0 * std::sqrt(2.0)).margin(0.02));
    CHECK_FALSE(r1.section.feasible());
    CHECK(r1.working_tol == Approx(5.0 / std::sqrt(200000.0)));
    // report S equals the family value of the emitted model
    EmpiricalModel back = parse_model(print_model(r1.model));
    CHECK(chsh_family_value(back).value == Approx(r1.family.value).margin(1e-10));
}

TEST_CASE("run: exact solver over sampled statistics uses the statistical radius") {
    nlohmann::json j = base_config();
    j["statistics"] = {{"mode", "shots"}, {"shots", 10000}};
    j["solver"] = {{"mode", "exact"}};
    RunReport r = run(parse_config(j));
    CHECK(r.section.mode == SolverMode::exact_rational);
    CHECK(r.section.radius == Approx(0.05));  // 5/sqrt(10000)
    CHECK(r.section.rounding_radius == 0.0);  // frequencies are exact rationals
    CHECK_FALSE(r.section.feasible());
    REQUIRE(r.section.chsh_certificate.has_value());
    CHECK(r.section.chsh_certificate->value_exact.has_value());

    // A weak preparation sampled the same way is feasible within the radius.
    nlohmann::json k = base_config();
    k["preparation"] = {{"network", "visibility"}, {"v", 0.3}};
    k["statistics"] = {{"mode", "shots"}, {"shots", 10000}};
    k["solver"] = {{"mode", "exact"}};
    RunReport rk = run(parse_config(k));
    REQUIRE(rk.section.feasible());
    REQUIRE(rk.section.witness.has_value());
    CHECK(rk.section.witness->exact.has_value());
    CHECK(rk.section.stats.max_residual <= 0.05);
}

TEST_CASE("run: stochastic source decoheres the state") {
    nlohmann::json j = base_config();
    j["source"] = {{"kind", "uniform_linear"}, {"range_deg", {0.0, 180.0}}, {"realizations", 5000}};
    RunReport r = run(parse_config(j));
    CHECK(r.purity < 0.9);
    CHECK(std::abs(r.state_chsh) < 2.0 * std::sqrt(2.0));

    nlohmann::json k = base_config();
    k["source"] = {{"kind", "von_mises"}, {"mean_deg", 0.0}, {"kappa", 200.0}, {"realizations", 2000}};
    RunReport rk = run(parse_config(k));
    CHECK(rk.purity > 0.9);  // tight source stays near the ideal preparation
    CHECK_FALSE(rk.section.feasible());
}

TEST_CASE("sweep: visibility grid is linear in S and flips verdict") {
    nlohmann::json j = base_config();
    j["preparation"] = {{"network", "visibility"}, {"v", 1.0}};
    ExperimentConfig cfg = parse_config(j);
    std::vector<double> grid{0.0, 0.25, 0.5, 0.75, 1.0};
    std::string csv = sweep_csv(cfg, "visibility", grid);

    std::istringstream is(csv);
    std::string line;
    std::getline(is, line);
    CHECK(line == "# bellsim-sweep-csv v1");
    std::getline(is, line);  // header
    int rows = 0;
    double s_max = 2.0 * std::sqrt(2.0);
    while (std::getline(is, line)) {
        std::vector<std::string> fields;
        std::stringstream fs(line);
        std::string f;
        while (std::getline(fs, f, ',')) fields.push_back(f);
        REQUIRE(fields.size() == 13);
        double v = std::stod(fields[2]);
        double s = std::stod(fields[8]);
        CHECK(s == Approx(v * s_max).margin(1e-9));
        CHECK(fields[10] == (v <= 1.0 / std::sqrt(2.0) ? "feasible" : "infeasible"));
        ++rows;
    }
    CHECK(rows == 5);
}

TEST_CASE("sweep: shots grid error trend and guards") {
    nlohmann::json j = base_config();
    ExperimentConfig cfg = parse_config(j);
    std::string csv = sweep_csv(cfg, "shots", {100.0, 10000.0, 1000000.0});
    std::istringstream is(csv);
    std::string line;
    std::getline(is, line);
    std::getline(is, line);
    std::vector<double> err;
    while (std::getline(is, line)) {
        std::vector<std::string> fields;
        std::stringstream fs(line);
        std::string f;
        while (std::getline(fs, f, ',')) fields.push_back(f);
        err.push_back(std::abs(std::stod(fields[8]) - 2.0 * std::sqrt(2.0)));
    }
    REQUIRE(err.size() == 3);
    CHECK(err[2] < err[0]);  // 1e6 shots beats 1e2 shots

    CHECK_THROWS_AS(sweep_csv(cfg, "visibility", {0.5}), ConfigError);  // wrong preparation
    CHECK_THROWS_AS(sweep_csv(cfg, "nonsense", {1.0}), UnknownParameter);
    CHECK_THROWS_AS(sweep_csv(cfg, "shots", {}), ConfigError);  // empty grid
}

TEST_CASE("check_model on fixtures") {
    CheckResult pr = check_model(pr_box_model(), {});
    CHECK_FALSE(pr.section.feasible());
    CHECK(pr.compat.pass);

    CheckResult det = check_model(deterministic_model(), {});
    CHECK(det.section.feasible());

    CheckResult sampled =
        check_model(monte_carlo_model(phi_plus_state(), tsirelson_angles(), 50000, 5), {});
    CHECK_FALSE(sampled.section.feasible());
    CHECK(sampled.compat.pass);  // tolerance auto-widened to the statistical radius
}

TEST_CASE("report text is stable and carries the certificate") {
    ExperimentConfig cfg = parse_config(base_config());
    RunReport r = run(cfg);
    std::ostringstream os1, os2;
    print_report(os1, cfg, r, false);
    print_report(os2, cfg, r, false);
    std::string text = os1.str();
    CHECK(text == os2.str());
    CHECK(text.find("INFEASIBLE (contextual)") != std::string::npos);
    CHECK(text.find("certificate:") != std::string::npos);
    CHECK(text.find("bellsim-report v1") == 0);
}
