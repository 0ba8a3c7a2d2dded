// Copyright (c) 2026 bellsim contributors
// SPDX-License-Identifier: Apache-2.0
//
// bellsim: simulate two-beam stochastic-optics CHSH experiments and certify
// contextuality of the induced empirical models.
//
// Exit codes: 0 = ran, global section exists (noncontextual);
//             3 = ran, no global section (contextual);
//             1 = error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bellsim/bellsim.hpp"

namespace {

constexpr int kExitFeasible = 0;
constexpr int kExitInfeasible = 3;
constexpr int kExitError = 1;

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw bellsim::Error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

bellsim::SolverOptions solver_flags(const std::string& mode, double tol, double radius) {
    bellsim::SolverOptions opts;
    if (mode == "float")
        opts.mode = bellsim::SolverMode::floating;
    else if (mode == "exact")
        opts.mode = bellsim::SolverMode::exact_rational;
    else
        throw bellsim::ConfigError("--solver", "expected 'float' or 'exact'");
    opts.tol = tol;
    if (radius >= 0.0) opts.radius = radius;
    return opts;
}

int cmd_run(const std::string& config_path) {
    bellsim::ExperimentConfig cfg = bellsim::parse_config_text(slurp(config_path));
    bellsim::RunReport report = bellsim::run(cfg);
    bellsim::print_report(std::cout, cfg, report, /*include_timing=*/true);
    bellsim::write_outputs(cfg, report);
    return report.section.feasible() ? kExitFeasible : kExitInfeasible;
}

int cmd_sweep(const std::string& config_path, const std::string& parameter,
              const std::vector<double>& grid_in, const std::string& grid_unit,
              const std::string& csv_out) {
    bellsim::ExperimentConfig cfg = bellsim::parse_config_text(slurp(config_path));
    std::vector<double> grid = grid_in;
    bool is_angle = parameter == "theta" || parameter == "theta_prime" || parameter == "phi" ||
                    parameter == "phi_prime";
    if (is_angle && grid_unit == "deg")
        for (double& v : grid) v *= 3.14159265358979323846 / 180.0;
    std::string csv = bellsim::sweep_csv(cfg, parameter, grid);
    if (csv_out.empty() || csv_out == "-") {
        std::cout << csv;
    } else {
        std::ofstream f(csv_out, std::ios::binary);
        if (!f) throw bellsim::Error("cannot open '" + csv_out + "'");
        f << csv;
    }
    return kExitFeasible;
}

int cmd_check_model(const std::string& model_path, const bellsim::SolverOptions& opts) {
    std::ifstream f(model_path, std::ios::binary);
    if (!f) throw bellsim::Error("cannot open '" + model_path + "'");
    bellsim::EmpiricalModel model = bellsim::parse_model(f);
    bellsim::CheckResult res = bellsim::check_model(model, opts);

    std::cout << "model: " << model_path << "\n";
    std::cout << "contexts: " << model.scenario().num_contexts()
              << ", settings: " << model.scenario().num_settings()
              << ", tables: " << (model.all_exact() ? "exact rational" : "floating") << "\n";
    std::cout << "compatibility: max-deviation " << res.compat.max_deviation << " (tol "
              << res.compat.tolerance << ") -> " << (res.compat.pass ? "pass" : "FAIL") << "\n";
    std::cout << "verdict: "
              << (res.section.feasible() ? "FEASIBLE (noncontextual)" : "INFEASIBLE (contextual)")
              << "\n";
    if (res.section.witness)
        std::cout << "witness: joint distribution over " << res.section.witness->p.size()
                  << " global assignments, max marginal residual " << res.section.stats.max_residual
                  << "\n";
    if (res.section.chsh_certificate) {
        const auto& cert = *res.section.chsh_certificate;
        std::cout << "certificate: " << cert.description << " = " << cert.value << " > 2";
        if (cert.value_exact) std::cout << "  (exact " << bellsim::rational_to_string(*cert.value_exact) << ")";
        std::cout << "\n";
    } else if (res.section.farkas) {
        std::cout << "certificate: infeasibility functional over " << res.section.farkas->size()
                  << " constraints\n";
    }
    return res.section.feasible() ? kExitFeasible : kExitInfeasible;
}

int cmd_emit_fixtures(const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    auto write = [&](const std::string& name, const bellsim::EmpiricalModel& m) {
        std::ofstream f(fs::path(dir) / name, std::ios::binary);
        if (!f) throw bellsim::Error("cannot open fixture output '" + name + "'");
        bellsim::print_model(f, m);
        std::cout << "wrote " << (fs::path(dir) / name).string() << "\n";
    };
    write("pr_box.bellmodel", bellsim::pr_box_model());
    write("deterministic.bellmodel", bellsim::deterministic_model());
    write("product_state.bellmodel", bellsim::product_state_model());
    write("phi_plus_tsirelson.bellmodel", bellsim::phi_plus_tsirelson_model());
    return kExitFeasible;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"two-beam stochastic-optics CHSH simulator and global-section certifier"};
    app.require_subcommand(1);

    std::string config_path, model_path, fixtures_dir = ".";
    std::string parameter, grid_unit = "rad", csv_out, solver_mode = "float";
    std::vector<double> grid;
    double tol = 1e-8, radius = -1.0;

    CLI::App* c_run = app.add_subcommand("run", "run one experiment from a config file");
    c_run->add_option("config", config_path, "JSON experiment config")->required();

    CLI::App* c_sweep = app.add_subcommand("sweep", "run a parameter sweep, emit CSV");
    c_sweep->add_option("config", config_path, "JSON experiment config")->required();
    c_sweep->add_option("--parameter", parameter, "one of: visibility, shots, theta, theta_prime, phi, phi_prime, kappa")
        ->required();
    c_sweep->add_option("--grid", grid, "grid values")->required()->expected(-1);
    c_sweep->add_option("--grid-unit", grid_unit, "unit for angle grids: rad|deg (default rad)");
    c_sweep->add_option("--csv", csv_out, "CSV output path ('-' = stdout)");

    CLI::App* c_check = app.add_subcommand("check-model", "certify an empirical-model file");
    c_check->add_option("model", model_path, "model file in the bellsim-model format")->required();
    c_check->add_option("--solver", solver_mode, "float|exact (default float)");
    c_check->add_option("--tol", tol, "float-mode tolerance / compatibility tolerance");
    c_check->add_option("--radius", radius, "per-cell reproduction radius override");

    CLI::App* c_emit = app.add_subcommand("emit-fixtures", "write the canonical model fixtures");
    c_emit->add_option("dir", fixtures_dir, "output directory (default .)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (c_run->parsed()) return cmd_run(config_path);
        if (c_sweep->parsed()) return cmd_sweep(config_path, parameter, grid, grid_unit, csv_out);
        if (c_check->parsed()) return cmd_check_model(model_path, solver_flags(solver_mode, tol, radius));
        if (c_emit->parsed()) return cmd_emit_fixtures(fixtures_dir);
    } catch (const bellsim::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
