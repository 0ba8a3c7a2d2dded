// Copyright (c) 2026 bellsim contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bellsim/global_section.hpp"
#include "bellsim/linalg.hpp"
#include "bellsim/measure.hpp"
#include "bellsim/source.hpp"

namespace bellsim {

// Declarative experiment configuration. One root seed; every physical angle
// carries an explicit unit; unknown keys are hard errors so a typo cannot
// silently change the physics.

struct SourceConfig {
    enum class Kind { fixed, uniform_linear, von_mises, depolarized } kind = Kind::fixed;
    Ket jones = Ket::basis(2, 0);
    double range_lo = 0.0, range_hi = 3.14159265358979323846;  // uniform_linear, radians
    double mean = 0.0;                                         // von_mises, radians
    double kappa = 1.0;                                        // von_mises concentration
    double weight = 1.0;                                       // depolarized fixed-ket weight
    std::size_t realizations = 1;
};

struct PreparationConfig {
    enum class Network { hadamard_cnot, visibility, explicit_unitary } network = Network::hadamard_cnot;
    double visibility = 1.0;
    Operator unitary;  // explicit_unitary only
};

struct ConditioningConfig {
    enum class Flag { none, keep, effect } flag = Flag::none;
    std::size_t keep_index = 0;
    Operator effect;  // effect only
};

struct StatisticsConfig {
    enum class Mode { analytic, shots } mode = Mode::analytic;
    std::uint64_t shots = 0;
};

struct SolverConfig {
    SolverMode mode = SolverMode::floating;
    double tol = 1e-8;
    std::optional<double> radius;
};

struct OutputConfig {
    std::optional<std::string> report;
    std::optional<std::string> model;
    std::optional<std::string> csv;
};

struct ExperimentConfig {
    std::uint64_t seed = 0;
    SourceConfig source;
    Ket ancilla = Ket::basis(2, 0);
    std::optional<Ket> flag_prep;  // extra flag-system ket, explicit networks only
    PreparationConfig preparation;
    ConditioningConfig conditioning;
    ChshAngles angles;
    StatisticsConfig statistics;
    SolverConfig solver;
    OutputConfig output;
};

namespace cfg_detail {

using nlohmann::json;

inline void require_keys(const json& j, const std::string& path, std::initializer_list<const char*> keys) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char* k : keys)
            if (it.key() == k) known = true;
        if (!known) throw ConfigError(path + "." + it.key(), "unknown key");
    }
}

inline double get_number(const json& j, const std::string& path) {
    if (!j.is_number()) throw ConfigError(path, "expected a number");
    return j.get<double>();
}

inline std::uint64_t get_uint(const json& j, const std::string& path) {
    if (!(j.is_number_unsigned() || (j.is_number_integer() && j.get<long long>() >= 0)))
        throw ConfigError(path, "expected a nonnegative integer");
    return j.get<std::uint64_t>();
}

inline cplx get_complex(const json& j, const std::string& path) {
    if (j.is_number()) return cplx(j.get<double>(), 0.0);
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return cplx(j[0].get<double>(), j[1].get<double>());
    throw ConfigError(path, "expected a number or [re, im] pair");
}

inline Ket get_ket(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) throw ConfigError(path, "expected an array of amplitudes");
    std::vector<cplx> amp;
    for (std::size_t i = 0; i < j.size(); ++i)
        amp.push_back(get_complex(j[i], path + "[" + std::to_string(i) + "]"));
    return Ket(std::move(amp));
}

inline Operator get_matrix(const json& j, const std::string& path, std::vector<std::size_t> factors) {
    if (!j.is_array() || j.empty()) throw ConfigError(path, "expected an array of rows");
    std::vector<std::vector<cplx>> rows;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const json& row = j[i];
        std::string rpath = path + "[" + std::to_string(i) + "]";
        if (!row.is_array() || row.size() != j.size())
            throw ConfigError(rpath, "expected a square matrix");
        std::vector<cplx> r;
        for (std::size_t k = 0; k < row.size(); ++k)
            r.push_back(get_complex(row[k], rpath + "[" + std::to_string(k) + "]"));
        rows.push_back(std::move(r));
    }
    if (factors.empty()) factors = {rows.size()};
    try {
        return Operator::from_rows(rows, std::move(factors));
    } catch (const Error& e) {
        throw ConfigError(path, e.what());
    }
}

/// Angle with an explicit unit tag: {"unit": "deg"|"rad"} at the section level.
inline double convert_angle(double value, const std::string& unit) {
    if (unit == "rad") return value;
    if (unit == "deg") return value * 3.14159265358979323846 / 180.0;
    throw ConfigError("angles.unit", "expected 'deg' or 'rad', got '" + unit + "'");
}

}  // namespace cfg_detail

inline ExperimentConfig parse_config(const nlohmann::json& j) {
    using namespace cfg_detail;
    using json = nlohmann::json;
    if (!j.is_object()) throw ConfigError("(root)", "config must be a JSON object");
    require_keys(j, "(root)",
                 {"version", "seed", "source", "ancilla", "flag_prep", "preparation", "conditioning",
                  "angles", "statistics", "solver", "output"});

    ExperimentConfig cfg;
    if (j.contains("version") && j["version"].get<int>() != 1)
        throw ConfigError("version", "unsupported config version");
    if (j.contains("seed")) cfg.seed = get_uint(j["seed"], "seed");

    if (j.contains("source")) {
        const json& s = j["source"];
        require_keys(s, "source",
                     {"kind", "jones", "range_deg", "range_rad", "mean_deg", "mean_rad", "kappa",
                      "weight", "realizations"});
        std::string kind = s.value("kind", "fixed");
        if (kind == "fixed")
            cfg.source.kind = SourceConfig::Kind::fixed;
        else if (kind == "uniform_linear")
            cfg.source.kind = SourceConfig::Kind::uniform_linear;
        else if (kind == "von_mises")
            cfg.source.kind = SourceConfig::Kind::von_mises;
        else if (kind == "depolarized")
            cfg.source.kind = SourceConfig::Kind::depolarized;
        else
            throw ConfigError("source.kind", "unknown source kind '" + kind + "'");

        if (s.contains("jones")) cfg.source.jones = get_ket(s["jones"], "source.jones");
        if (s.contains("range_deg") && s.contains("range_rad"))
            throw ConfigError("source.range_deg", "give the range in one unit only");
        for (const char* key : {"range_deg", "range_rad"}) {
            if (!s.contains(key)) continue;
            const json& r = s[key];
            if (!r.is_array() || r.size() != 2)
                throw ConfigError(std::string("source.") + key, "expected [lo, hi]");
            double lo = get_number(r[0], std::string("source.") + key + "[0]");
            double hi = get_number(r[1], std::string("source.") + key + "[1]");
            bool deg = std::string(key) == "range_deg";
            cfg.source.range_lo = deg ? lo * 3.14159265358979323846 / 180.0 : lo;
            cfg.source.range_hi = deg ? hi * 3.14159265358979323846 / 180.0 : hi;
        }
        if (s.contains("mean_deg") && s.contains("mean_rad"))
            throw ConfigError("source.mean_deg", "give the mean in one unit only");
        if (s.contains("mean_deg"))
            cfg.source.mean = get_number(s["mean_deg"], "source.mean_deg") * 3.14159265358979323846 / 180.0;
        if (s.contains("mean_rad")) cfg.source.mean = get_number(s["mean_rad"], "source.mean_rad");
        if (s.contains("kappa")) cfg.source.kappa = get_number(s["kappa"], "source.kappa");
        if (s.contains("weight")) cfg.source.weight = get_number(s["weight"], "source.weight");
        if (s.contains("realizations")) {
            cfg.source.realizations = static_cast<std::size_t>(get_uint(s["realizations"], "source.realizations"));
            if (cfg.source.realizations < 1)
                throw ConfigError("source.realizations", "expected a positive integer");
        }
    }

    if (j.contains("ancilla")) {
        const json& a = j["ancilla"];
        require_keys(a, "ancilla", {"jones"});
        if (!a.contains("jones")) throw ConfigError("ancilla.jones", "missing");
        cfg.ancilla = get_ket(a["jones"], "ancilla.jones");
    }
    if (j.contains("flag_prep")) {
        const json& a = j["flag_prep"];
        require_keys(a, "flag_prep", {"jones"});
        if (!a.contains("jones")) throw ConfigError("flag_prep.jones", "missing");
        cfg.flag_prep = get_ket(a["jones"], "flag_prep.jones");
    }

    if (!j.contains("preparation")) throw ConfigError("preparation", "missing section");
    {
        const json& p = j["preparation"];
        require_keys(p, "preparation", {"network", "v", "unitary", "factors"});
        if (!p.contains("network")) throw ConfigError("preparation.network", "missing");
        std::string network = p["network"].get<std::string>();
        if (network == "hadamard_cnot") {
            cfg.preparation.network = PreparationConfig::Network::hadamard_cnot;
        } else if (network == "visibility") {
            cfg.preparation.network = PreparationConfig::Network::visibility;
            if (!p.contains("v")) throw ConfigError("preparation.v", "visibility preset needs 'v'");
            cfg.preparation.visibility = get_number(p["v"], "preparation.v");
        } else if (network == "explicit") {
            cfg.preparation.network = PreparationConfig::Network::explicit_unitary;
            if (!p.contains("unitary")) throw ConfigError("preparation.unitary", "missing matrix");
            std::vector<std::size_t> factors;
            if (p.contains("factors"))
                for (const auto& f : p["factors"])
                    factors.push_back(static_cast<std::size_t>(get_uint(f, "preparation.factors")));
            cfg.preparation.unitary = get_matrix(p["unitary"], "preparation.unitary", factors);
        } else {
            throw ConfigError("preparation.network", "unknown network '" + network + "'");
        }
    }

    if (j.contains("conditioning")) {
        const json& c = j["conditioning"];
        require_keys(c, "conditioning", {"flag", "index", "matrix"});
        std::string flag = c.value("flag", "none");
        if (flag == "none") {
            cfg.conditioning.flag = ConditioningConfig::Flag::none;
        } else if (flag == "keep") {
            cfg.conditioning.flag = ConditioningConfig::Flag::keep;
            if (!c.contains("index")) throw ConfigError("conditioning.index", "missing flag index");
            cfg.conditioning.keep_index = static_cast<std::size_t>(get_uint(c["index"], "conditioning.index"));
        } else if (flag == "effect") {
            cfg.conditioning.flag = ConditioningConfig::Flag::effect;
            if (!c.contains("matrix")) throw ConfigError("conditioning.matrix", "missing effect matrix");
            cfg.conditioning.effect = get_matrix(c["matrix"], "conditioning.matrix", {});
        } else {
            throw ConfigError("conditioning.flag", "unknown flag mode '" + flag + "'");
        }
    }

    if (!j.contains("angles")) throw ConfigError("angles", "missing section");
    {
        const json& a = j["angles"];
        require_keys(a, "angles", {"unit", "theta", "theta_prime", "phi", "phi_prime"});
        if (!a.contains("unit")) throw ConfigError("angles.unit", "missing unit tag");
        std::string unit = a["unit"].get<std::string>();
        for (const char* key : {"theta", "theta_prime", "phi", "phi_prime"})
            if (!a.contains(key)) throw ConfigError(std::string("angles.") + key, "missing");
        cfg.angles.theta = convert_angle(get_number(a["theta"], "angles.theta"), unit);
        cfg.angles.theta_prime = convert_angle(get_number(a["theta_prime"], "angles.theta_prime"), unit);
        cfg.angles.phi = convert_angle(get_number(a["phi"], "angles.phi"), unit);
        cfg.angles.phi_prime = convert_angle(get_number(a["phi_prime"], "angles.phi_prime"), unit);
    }

    if (j.contains("statistics")) {
        const json& s = j["statistics"];
        require_keys(s, "statistics", {"mode", "shots"});
        std::string mode = s.value("mode", "analytic");
        if (mode == "analytic") {
            cfg.statistics.mode = StatisticsConfig::Mode::analytic;
            if (s.contains("shots")) throw ConfigError("statistics.shots", "not valid in analytic mode");
        } else if (mode == "shots") {
            cfg.statistics.mode = StatisticsConfig::Mode::shots;
            if (!s.contains("shots")) throw ConfigError("statistics.shots", "missing shot count");
            cfg.statistics.shots = get_uint(s["shots"], "statistics.shots");
            if (cfg.statistics.shots < 1) throw ConfigError("statistics.shots", "must be >= 1");
        } else {
            throw ConfigError("statistics.mode", "expected 'analytic' or 'shots'");
        }
    }

    if (j.contains("solver")) {
        const json& s = j["solver"];
        require_keys(s, "solver", {"mode", "tol", "radius"});
        std::string mode = s.value("mode", "float");
        if (mode == "float")
            cfg.solver.mode = SolverMode::floating;
        else if (mode == "exact")
            cfg.solver.mode = SolverMode::exact_rational;
        else
            throw ConfigError("solver.mode", "expected 'float' or 'exact'");
        if (s.contains("tol")) cfg.solver.tol = get_number(s["tol"], "solver.tol");
        if (s.contains("radius")) cfg.solver.radius = get_number(s["radius"], "solver.radius");
    }

    if (j.contains("output")) {
        const json& o = j["output"];
        require_keys(o, "output", {"report", "model", "csv"});
        if (o.contains("report")) cfg.output.report = o["report"].get<std::string>();
        if (o.contains("model")) cfg.output.model = o["model"].get<std::string>();
        if (o.contains("csv")) cfg.output.csv = o["csv"].get<std::string>();
    }

    return cfg;
}

inline ExperimentConfig parse_config_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("(json)", e.what());
    }
    return parse_config(j);
}

}  // namespace bellsim
