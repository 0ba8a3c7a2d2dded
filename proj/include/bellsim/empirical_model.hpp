// Copyright (c) 2026 bellsim contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "bellsim/rational.hpp"
#include "bellsim/scenario.hpp"

namespace bellsim {

// Context-indexed probability tables. Tables carry a double view always and
// an exact rational view when the numbers are exactly known (parsed files,
// finite-sample frequencies, hand-built fixtures); the two views are kept in
// lockstep.

struct ContextTable {
    std::vector<double> p;
    std::optional<std::vector<Rational>> exact;

    static ContextTable from_doubles(std::vector<double> probs) { return ContextTable{std::move(probs), std::nullopt}; }

    static ContextTable from_exact(std::vector<Rational> probs) {
        std::vector<double> d(probs.size());
        for (std::size_t i = 0; i < probs.size(); ++i) d[i] = to_double(probs[i]);
        return ContextTable{std::move(d), std::move(probs)};
    }
};

enum class Provenance { analytic, sampled };

struct SampleInfo {
    std::uint64_t shots = 0;
    std::uint64_t seed = 0;
    bool operator==(const SampleInfo&) const = default;
};

class EmpiricalModel {
  public:
    EmpiricalModel(Scenario scenario, std::vector<ContextTable> tables,
                   Provenance provenance = Provenance::analytic, SampleInfo sample = {})
        : scenario_(std::move(scenario)),
          tables_(std::move(tables)),
          provenance_(provenance),
          sample_(sample) {
        if (tables_.size() != scenario_.num_contexts())
            throw Error("empirical model: table count != context count");
        for (std::size_t c = 0; c < tables_.size(); ++c) {
            const ContextTable& t = tables_[c];
            if (t.p.size() != scenario_.context_table_size(c))
                throw Error("empirical model: table size mismatch in context " + std::to_string(c));
            double sum = 0.0;
            for (double v : t.p) {
                if (v < -1e-12)
                    throw Error("empirical model: negative probability " + std::to_string(v) +
                                " in context " + std::to_string(c));
                sum += v;
            }
            if (std::abs(sum - 1.0) > 1e-9)
                throw Error("empirical model: context " + std::to_string(c) + " sums to " +
                            std::to_string(sum));
            if (t.exact && t.exact->size() != t.p.size())
                throw Error("empirical model: exact/double table size mismatch");
        }
    }

    const Scenario& scenario() const { return scenario_; }
    const std::vector<ContextTable>& tables() const { return tables_; }
    const ContextTable& table(std::size_t c) const { return tables_.at(c); }
    Provenance provenance() const { return provenance_; }
    const SampleInfo& sample_info() const { return sample_; }

    bool all_exact() const {
        for (const ContextTable& t : tables_)
            if (!t.exact) return false;
        return true;
    }

    bool operator==(const EmpiricalModel& other) const {
        if (!(scenario_ == other.scenario_) || provenance_ != other.provenance_) return false;
        if (provenance_ == Provenance::sampled && !(sample_ == other.sample_)) return false;
        for (std::size_t c = 0; c < tables_.size(); ++c) {
            const auto &ta = tables_[c], &tb = other.tables_[c];
            if (ta.exact.has_value() != tb.exact.has_value()) return false;
            if (ta.exact) {
                if (*ta.exact != *tb.exact) return false;
            } else if (ta.p != tb.p) {
                return false;
            }
        }
        return true;
    }

  private:
    Scenario scenario_;
    std::vector<ContextTable> tables_;
    Provenance provenance_;
    SampleInfo sample_;
};

// ---------------------------------------------------------------------------
// Marginalization (pushforward along the restriction map).
// ---------------------------------------------------------------------------

struct MarginalDistribution {
    std::vector<std::size_t> settings;
    std::vector<double> p;
    std::optional<std::vector<Rational>> exact;
};

/// Pushforward of the context table along restriction to `to` (a subset of
/// the context's settings).
inline MarginalDistribution marginalize(const EmpiricalModel& model, std::size_t context,
                                        const std::vector<std::size_t>& to) {
    const Scenario& sc = model.scenario();
    if (context >= sc.num_contexts())
        throw UnknownContext("marginalize: context index " + std::to_string(context) + " out of range");
    const std::vector<std::size_t>& from = sc.contexts()[context];
    for (std::size_t s : to)
        if (std::find(from.begin(), from.end(), s) == from.end())
            throw NotSubset("marginalize: setting " + std::to_string(s) + " not in context");

    const ContextTable& t = model.table(context);
    MarginalDistribution out;
    out.settings = to;
    out.p.assign(sc.assignment_count(to), 0.0);
    if (t.exact) out.exact = std::vector<Rational>(out.p.size(), Rational(0));
    for (std::size_t r = 0; r < t.p.size(); ++r) {
        Assignment a = sc.unrank(from, r);
        std::size_t target = sc.rank(to, restrict_assignment(from, a, to));
        out.p[target] += t.p[r];
        if (out.exact) (*out.exact)[target] += (*t.exact)[r];
    }
    return out;
}

// ---------------------------------------------------------------------------
// Marginal compatibility on overlaps (the no-signalling check).
// ---------------------------------------------------------------------------

struct OverlapReport {
    std::size_t context_a = 0;
    std::size_t context_b = 0;
    std::vector<std::size_t> overlap;
    double deviation = 0.0;
};

struct CompatibilityReport {
    std::vector<OverlapReport> overlaps;
    double max_deviation = 0.0;
    double tolerance = 0.0;
    bool pass = true;
};

inline CompatibilityReport check_compatibility(const EmpiricalModel& model, double tolerance) {
    const Scenario& sc = model.scenario();
    CompatibilityReport report;
    report.tolerance = tolerance;
    for (std::size_t i = 0; i < sc.num_contexts(); ++i) {
        for (std::size_t j = i + 1; j < sc.num_contexts(); ++j) {
            std::vector<std::size_t> common;
            std::set_intersection(sc.contexts()[i].begin(), sc.contexts()[i].end(),
                                  sc.contexts()[j].begin(), sc.contexts()[j].end(),
                                  std::back_inserter(common));
            if (common.empty()) continue;
            MarginalDistribution mi = marginalize(model, i, common);
            MarginalDistribution mj = marginalize(model, j, common);
            double dev = 0.0;
            for (std::size_t k = 0; k < mi.p.size(); ++k) dev = std::max(dev, std::abs(mi.p[k] - mj.p[k]));
            report.overlaps.push_back({i, j, common, dev});
            report.max_deviation = std::max(report.max_deviation, dev);
        }
    }
    report.pass = report.max_deviation <= tolerance;
    return report;
}

// ---------------------------------------------------------------------------
// CHSH-family sweep (certificate support).
// ---------------------------------------------------------------------------

struct ChshShape {
    // Party settings: alice[i], bob[j] are setting indices; context_of[i][j]
    // is the index of the context {alice[i], bob[j]} in the scenario.
    std::array<std::size_t, 2> alice{};
    std::array<std::size_t, 2> bob{};
    std::array<std::array<std::size_t, 2>, 2> context_of{};
    // outcome_value[s][o]: the +/-1 value of outcome o of setting s.
    std::vector<std::array<double, 2>> outcome_value;
};

/// Recognize a 2-party / 2-setting / 2-outcome (+1/-1) scenario and recover
/// its bipartite structure. Returns nullopt when the scenario has a different
/// shape.
inline std::optional<ChshShape> chsh_shape(const Scenario& sc) {
    if (sc.num_settings() != 4 || sc.num_contexts() != 4) return std::nullopt;
    ChshShape shape;
    shape.outcome_value.resize(4);
    for (std::size_t s = 0; s < 4; ++s) {
        if (sc.alphabet_size(s) != 2) return std::nullopt;
        for (std::size_t o = 0; o < 2; ++o) {
            const std::string& label = sc.outcomes()[s][o];
            if (label == "+1" || label == "1")
                shape.outcome_value[s][o] = 1.0;
            else if (label == "-1")
                shape.outcome_value[s][o] = -1.0;
            else
                return std::nullopt;
        }
    }
    for (const auto& c : sc.contexts())
        if (c.size() != 2) return std::nullopt;

    // Try each way to split the four settings into two parties of two.
    static constexpr std::array<std::array<std::size_t, 4>, 3> splits{
        {{0, 1, 2, 3}, {0, 2, 1, 3}, {0, 3, 1, 2}}};
    for (const auto& sp : splits) {
        std::array<std::size_t, 2> alice{sp[0], sp[1]}, bob{sp[2], sp[3]};
        bool ok = true;
        std::array<std::array<std::size_t, 2>, 2> ctx{};
        for (std::size_t i = 0; i < 2 && ok; ++i)
            for (std::size_t j = 0; j < 2 && ok; ++j) {
                std::vector<std::size_t> want{alice[i], bob[j]};
                std::sort(want.begin(), want.end());
                auto it = std::find(sc.contexts().begin(), sc.contexts().end(), want);
                if (it == sc.contexts().end())
                    ok = false;
                else
                    ctx[i][j] = static_cast<std::size_t>(it - sc.contexts().begin());
            }
        if (ok) {
            shape.alice = alice;
            shape.bob = bob;
            shape.context_of = ctx;
            return shape;
        }
    }
    return std::nullopt;
}

struct ChshFamilyResult {
    double value = 0.0;                      // max over the 8-member family
    std::array<int, 4> signs{};              // signs on E(ctx[0][0]..ctx[1][1]), product -1
    std::array<double, 4> correlations{};    // E for contexts (0,0),(0,1),(1,0),(1,1)
    std::optional<Rational> value_exact;     // present when every table is exact
    std::string description;
};

/// Correlation E_C = sum_{o,o'} val(o) val(o') p_C(o,o') for a two-setting
/// context of a +/-1 scenario.
inline double table_correlation(const EmpiricalModel& model, const ChshShape& shape, std::size_t i,
                                std::size_t j) {
    const Scenario& sc = model.scenario();
    std::size_t c = shape.context_of[i][j];
    const std::vector<std::size_t>& ctx = sc.contexts()[c];
    const ContextTable& t = model.table(c);
    double e = 0.0;
    for (std::size_t r = 0; r < t.p.size(); ++r) {
        Assignment a = sc.unrank(ctx, r);
        double v = 1.0;
        for (std::size_t k = 0; k < ctx.size(); ++k) v *= shape.outcome_value[ctx[k]][a[k]];
        e += v * t.p[r];
    }
    return e;
}

/// Max of the 8 CHSH expressions s1 E00 + s2 E01 + s3 E10 + s4 E11 with
/// sign product -1; classical (global-section) bound 2 for each member.
inline ChshFamilyResult chsh_family_value(const EmpiricalModel& model) {
    auto shape = chsh_shape(model.scenario());
    if (!shape) throw WrongScenario("chsh_family_value: scenario is not CHSH-shaped");

    std::array<double, 4> e{};
    std::array<Rational, 4> e_exact{};
    bool exact = model.all_exact();
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) {
            std::size_t flat = 2 * i + j;
            e[flat] = table_correlation(model, *shape, i, j);
            if (exact) {
                const Scenario& sc = model.scenario();
                std::size_t c = shape->context_of[i][j];
                const std::vector<std::size_t>& ctx = sc.contexts()[c];
                const ContextTable& t = model.table(c);
                Rational acc(0);
                for (std::size_t r = 0; r < t.p.size(); ++r) {
                    Assignment a = sc.unrank(ctx, r);
                    int v = 1;
                    for (std::size_t k = 0; k < ctx.size(); ++k)
                        v *= shape->outcome_value[ctx[k]][a[k]] > 0 ? 1 : -1;
                    acc += v * (*t.exact)[r];
                }
                e_exact[flat] = acc;
            }
        }

    ChshFamilyResult best;
    best.value = -std::numeric_limits<double>::infinity();
    for (int mask = 0; mask < 16; ++mask) {
        std::array<int, 4> signs;
        int product = 1;
        for (int k = 0; k < 4; ++k) {
            signs[k] = (mask >> k) & 1 ? -1 : 1;
            product *= signs[k];
        }
        if (product != -1) continue;
        double value = 0.0;
        for (int k = 0; k < 4; ++k) value += signs[k] * e[k];
        if (value > best.value) {
            best.value = value;
            best.signs = signs;
            if (exact) {
                Rational v(0);
                for (int k = 0; k < 4; ++k) v += signs[k] * e_exact[k];
                best.value_exact = v;
            }
        }
    }
    best.correlations = e;

    const Scenario& sc = model.scenario();
    std::string desc;
    for (int k = 0; k < 4; ++k) {
        std::size_t i = static_cast<std::size_t>(k) / 2, j = static_cast<std::size_t>(k) % 2;
        desc += (best.signs[k] > 0 ? (k == 0 ? "" : " + ") : (k == 0 ? "-" : " - "));
        desc += "E(" + sc.settings()[shape->alice[i]] + "," + sc.settings()[shape->bob[j]] + ")";
    }
    best.description = desc;
    return best;
}

}  // namespace bellsim
