// Copyright (c) 2026 bellsim contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "bellsim/config.hpp"
#include "bellsim/fixtures.hpp"
#include "bellsim/global_section.hpp"
#include "bellsim/measure.hpp"
#include "bellsim/model_io.hpp"
#include "bellsim/process.hpp"
#include "bellsim/source.hpp"

namespace bellsim {

// End-to-end orchestration: source -> network -> conditioning -> state ->
// empirical model -> compatibility -> CHSH -> global section.

struct RunReport {
    std::vector<double> state_eigenvalues;
    double purity = 0.0;
    bool conditioned = false;
    double success_prob = 1.0;

    std::array<double, 4> correlations{};  // E at contexts {a,b},{a,b'},{a',b},{a',b'}
    double chsh_canonical = 0.0;           // E1 + E2 + E3 - E4 from the tables
    double state_chsh = 0.0;               // trace-form S of the conditioned state
    ChshFamilyResult family;
    CompatibilityReport compat;
    EmpiricalModel model;
    SectionResult section;
    double working_tol = 0.0;
    double wall_seconds = 0.0;

    RunReport(EmpiricalModel m, SectionResult s) : model(std::move(m)), section(std::move(s)) {}
};

namespace pipe_detail {

inline JonesSource make_source(const SourceConfig& sc, std::uint64_t seed) {
    switch (sc.kind) {
        case SourceConfig::Kind::fixed:
            return JonesSource::fixed(sc.jones, seed);
        case SourceConfig::Kind::uniform_linear:
            return JonesSource::uniform_linear(sc.range_lo, sc.range_hi, seed);
        case SourceConfig::Kind::von_mises:
            return JonesSource::von_mises_linear(sc.mean, sc.kappa, seed);
        case SourceConfig::Kind::depolarized:
            return JonesSource::depolarized_mix(sc.weight, sc.jones, seed);
    }
    throw ConfigError("source.kind", "unreachable");
}

inline DensityOperator build_state(const ExperimentConfig& cfg, bool& conditioned, double& success) {
    conditioned = false;
    success = 1.0;

    DensityOperator state = [&] {
        switch (cfg.preparation.network) {
            case PreparationConfig::Network::visibility: {
                double v = cfg.preparation.visibility;
                if (v < 0.0 || v > 1.0) throw ConfigError("preparation.v", "visibility must lie in [0,1]");
                return bell_like_with_visibility(v);
            }
            case PreparationConfig::Network::hadamard_cnot: {
                if (cfg.ancilla.dim() != 2)
                    throw ConfigError("ancilla.jones", "hadamard_cnot expects a 2-dim ancilla beam");
                if (cfg.flag_prep)
                    throw ConfigError("flag_prep", "only explicit networks carry a flag system");
                JonesSource src = make_source(cfg.source, derive_labeled(cfg.seed, "source"));
                return ensemble_state(src, bell_network(), normalized(cfg.ancilla),
                                      cfg.source.realizations);
            }
            case PreparationConfig::Network::explicit_unitary: {
                Ket anc = normalized(cfg.ancilla);
                if (cfg.flag_prep) anc = tensor(anc, normalized(*cfg.flag_prep));
                JonesSource src = make_source(cfg.source, derive_labeled(cfg.seed, "source"));
                try {
                    return ensemble_state(src, cfg.preparation.unitary, anc, cfg.source.realizations);
                } catch (const NotUnitary& e) {
                    throw ConfigError("preparation.unitary", e.what());
                } catch (const DimensionMismatch& e) {
                    throw ConfigError("preparation.unitary", e.what());
                }
            }
        }
        throw ConfigError("preparation.network", "unreachable");
    }();

    switch (cfg.conditioning.flag) {
        case ConditioningConfig::Flag::none:
            break;
        case ConditioningConfig::Flag::keep: {
            std::size_t flag_dim = state.factor_dims().back();
            if (cfg.conditioning.keep_index >= flag_dim)
                throw ConfigError("conditioning.index", "flag index out of range");
            Conditioned c = condition(state, Effect::basis_projector(flag_dim, cfg.conditioning.keep_index));
            state = c.state;
            success = c.success_prob;
            conditioned = true;
            break;
        }
        case ConditioningConfig::Flag::effect: {
            Conditioned c = condition(state, Effect::validated(cfg.conditioning.effect));
            state = c.state;
            success = c.success_prob;
            conditioned = true;
            break;
        }
    }

    if (state.factor_dims() != std::vector<std::size_t>{2, 2})
        throw ConfigError("conditioning.flag",
                          "pipeline must end on a two-beam (2,2) state; condition away the flag system");
    return state;
}

inline double working_tolerance(const ExperimentConfig& cfg) {
    double wt = cfg.solver.tol;
    if (cfg.statistics.mode == StatisticsConfig::Mode::shots)
        wt = std::max(wt, 5.0 / std::sqrt(static_cast<double>(cfg.statistics.shots)));
    return wt;
}

inline std::string fmt(double v, const char* spec = "%.12g") {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

}  // namespace pipe_detail

inline RunReport run(const ExperimentConfig& cfg) {
    auto t0 = std::chrono::steady_clock::now();

    bool conditioned = false;
    double success = 1.0;
    DensityOperator state = pipe_detail::build_state(cfg, conditioned, success);

    EmpiricalModel model =
        cfg.statistics.mode == StatisticsConfig::Mode::analytic
            ? induce_model(state, cfg.angles)
            : monte_carlo_model(state, cfg.angles, cfg.statistics.shots,
                                derive_labeled(cfg.seed, "shots"));

    double wt = pipe_detail::working_tolerance(cfg);
    SolverOptions so{cfg.solver.mode, wt, cfg.solver.radius};
    if (!so.radius && cfg.statistics.mode == StatisticsConfig::Mode::shots)
        so.radius = wt;  // spend the statistical slack as the per-cell LP radius

    SectionResult section = global_section(model, so);

    RunReport report(std::move(model), std::move(section));
    report.conditioned = conditioned;
    report.success_prob = success;
    report.working_tol = wt;
    report.compat = check_compatibility(report.model, wt);
    report.state_eigenvalues = eig_hermitian(state.op()).values;
    report.purity = state.purity();
    report.state_chsh = chsh(state, cfg.angles);
    report.family = chsh_family_value(report.model);
    report.correlations = report.family.correlations;
    report.chsh_canonical = report.correlations[0] + report.correlations[1] + report.correlations[2] -
                            report.correlations[3];

    auto t1 = std::chrono::steady_clock::now();
    report.wall_seconds = std::chrono::duration<double>(t1 - t0).count();
    return report;
}

// ---------------------------------------------------------------------------
// Report rendering.
// ---------------------------------------------------------------------------

inline void print_report(std::ostream& os, const ExperimentConfig& cfg, const RunReport& r,
                         bool include_timing) {
    using pipe_detail::fmt;
    os << "bellsim-report v1\n";
    os << "angles (rad): theta " << fmt(cfg.angles.theta) << ", theta' " << fmt(cfg.angles.theta_prime)
       << ", phi " << fmt(cfg.angles.phi) << ", phi' " << fmt(cfg.angles.phi_prime) << "\n";
    os << "conditioned-state:\n";
    os << "  eigenvalues:";
    for (double v : r.state_eigenvalues) os << " " << fmt(v);
    os << "\n  purity: " << fmt(r.purity) << "\n";
    os << "  conditioning: " << (r.conditioned ? "applied" : "none") << "\n";
    os << "  success-prob (global): " << fmt(r.success_prob) << "\n";
    // Conditioning precedes the setting choice in this pipeline, so the
    // per-context success probabilities coincide with the global one.
    os << "  success-prob (per context):";
    for (std::size_t c = 0; c < r.model.scenario().num_contexts(); ++c)
        os << " " << fmt(r.conditioned ? r.success_prob : 1.0);
    os << "\n";

    os << "statistics: "
       << (r.model.provenance() == Provenance::analytic
               ? std::string("analytic")
               : "sampled shots=" + std::to_string(r.model.sample_info().shots))
       << "\n";

    const Scenario& sc = r.model.scenario();
    os << "tables:\n";
    for (std::size_t c = 0; c < sc.num_contexts(); ++c) {
        os << "  context";
        for (std::size_t s : sc.contexts()[c]) os << " " << sc.settings()[s];
        os << " :";
        for (double v : r.model.table(c).p) os << " " << fmt(v);
        os << "\n";
    }

    static const char* kCtxName[4] = {"E(a,b)", "E(a,b')", "E(a',b)", "E(a',b')"};
    os << "correlations:\n";
    for (int k = 0; k < 4; ++k) os << "  " << kCtxName[k] << " = " << fmt(r.correlations[k]) << "\n";
    os << "chsh:\n";
    os << "  S (canonical) = " << fmt(r.chsh_canonical) << "\n";
    os << "  S (state trace form) = " << fmt(r.state_chsh) << "\n";
    os << "  S (family max) = " << fmt(r.family.value) << "  [" << r.family.description << "]\n";

    os << "compatibility: max-deviation " << fmt(r.compat.max_deviation) << " (tol "
       << fmt(r.compat.tolerance) << ") -> " << (r.compat.pass ? "pass" : "FAIL") << "\n";

    os << "global-section:\n";
    os << "  mode: " << (r.section.mode == SolverMode::floating ? "float" : "exact-rational") << "\n";
    os << "  radius: " << fmt(r.section.radius) << "\n";
    if (r.section.mode == SolverMode::exact_rational)
        os << "  rounding-radius: " << fmt(r.section.rounding_radius) << "\n";
    os << "  verdict: " << (r.section.feasible() ? "FEASIBLE (noncontextual)" : "INFEASIBLE (contextual)")
       << "\n";
    if (r.section.witness) {
        os << "  witness: joint distribution over " << r.section.witness->p.size()
           << " global assignments, max marginal residual " << fmt(r.section.stats.max_residual) << "\n";
    }
    if (r.section.chsh_certificate) {
        const ChshFamilyResult& cert = *r.section.chsh_certificate;
        os << "  certificate: " << cert.description << " = " << fmt(cert.value) << " > 2";
        if (cert.value_exact) os << "  (exact " << rational_to_string(*cert.value_exact) << ")";
        os << "\n";
    }
    os << "  lp: iterations " << r.section.stats.iterations << ", phase-1 objective "
       << fmt(r.section.stats.objective) << "\n";
    if (include_timing) os << "timing: " << fmt(r.wall_seconds, "%.3f") << " s\n";
}

/// Write the machine outputs named in the config (model file, report file).
/// Machine-readable files never contain timing, so byte-identical runs stay
/// byte-identical.
inline void write_outputs(const ExperimentConfig& cfg, const RunReport& r) {
    if (cfg.output.model) {
        std::ofstream f(*cfg.output.model, std::ios::binary);
        if (!f) throw Error("cannot open model output '" + *cfg.output.model + "'");
        print_model(f, r.model);
    }
    if (cfg.output.report) {
        std::ofstream f(*cfg.output.report, std::ios::binary);
        if (!f) throw Error("cannot open report output '" + *cfg.output.report + "'");
        print_report(f, cfg, r, /*include_timing=*/false);
    }
}

// ---------------------------------------------------------------------------
// Parameter sweeps.
// ---------------------------------------------------------------------------

inline const std::vector<std::string>& sweep_parameters() {
    static const std::vector<std::string> names{"visibility", "shots",       "theta", "theta_prime",
                                                "phi",        "phi_prime",   "kappa"};
    return names;
}

inline ExperimentConfig apply_sweep_value(ExperimentConfig cfg, const std::string& parameter,
                                          double value) {
    if (parameter == "visibility") {
        if (cfg.preparation.network != PreparationConfig::Network::visibility)
            throw ConfigError("preparation.network", "visibility sweep needs the visibility preset");
        cfg.preparation.visibility = value;
    } else if (parameter == "shots") {
        if (value < 1.0) throw ConfigError("statistics.shots", "shots must be >= 1");
        cfg.statistics.mode = StatisticsConfig::Mode::shots;
        cfg.statistics.shots = static_cast<std::uint64_t>(value);
    } else if (parameter == "theta") {
        cfg.angles.theta = value;
    } else if (parameter == "theta_prime") {
        cfg.angles.theta_prime = value;
    } else if (parameter == "phi") {
        cfg.angles.phi = value;
    } else if (parameter == "phi_prime") {
        cfg.angles.phi_prime = value;
    } else if (parameter == "kappa") {
        if (cfg.source.kind != SourceConfig::Kind::von_mises)
            throw ConfigError("source.kind", "kappa sweep needs a von_mises source");
        cfg.source.kappa = value;
    } else {
        throw UnknownParameter("sweep: unknown parameter '" + parameter + "'");
    }
    return cfg;
}

/// One run per grid value; CSV rows ordered by grid index. Angle grids are in
/// radians (the CLI converts units before calling).
inline std::string sweep_csv(const ExperimentConfig& cfg, const std::string& parameter,
                             const std::vector<double>& grid) {
    using pipe_detail::fmt;
    if (grid.empty()) throw ConfigError("sweep.grid", "empty grid");
    std::ostringstream os;
    os << "# bellsim-sweep-csv v1\n";
    os << "index,parameter,value,success_prob,E_ab,E_abp,E_apb,E_apbp,S,S_family,verdict,"
          "compat_max_dev,lp_iterations\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
        ExperimentConfig point = apply_sweep_value(cfg, parameter, grid[i]);
        point.output = {};  // grid points write no files of their own
        RunReport r = run(point);
        os << i << "," << parameter << "," << fmt(grid[i]) << "," << fmt(r.success_prob);
        for (double e : r.correlations) os << "," << fmt(e);
        os << "," << fmt(r.chsh_canonical) << "," << fmt(r.family.value) << ","
           << (r.section.feasible() ? "feasible" : "infeasible") << "," << fmt(r.compat.max_deviation)
           << "," << r.section.stats.iterations << "\n";
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// External model checking.
// ---------------------------------------------------------------------------

struct CheckResult {
    CompatibilityReport compat;
    SectionResult section;
};

inline CheckResult check_model(const EmpiricalModel& model, SolverOptions opts) {
    if (model.provenance() == Provenance::sampled && model.sample_info().shots > 0) {
        double stat = 5.0 / std::sqrt(static_cast<double>(model.sample_info().shots));
        opts.tol = std::max(opts.tol, stat);
        if (!opts.radius) opts.radius = opts.tol;
    }
    CheckResult res{check_compatibility(model, std::max(opts.tol, opts.radius.value_or(0.0))),
                    global_section(model, opts)};
    return res;
}

}  // namespace bellsim
