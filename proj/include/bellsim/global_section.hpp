// Copyright (c) 2026 bellsim contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "bellsim/empirical_model.hpp"
#include "bellsim/rational.hpp"
#include "bellsim/simplex.hpp"

namespace bellsim {

// Global-section decision: does a joint distribution on O^X exist whose
// marginals reproduce every context table? Realized as a pure feasibility LP
// over the global assignment probabilities, with a per-cell reproduction
// radius:
//   - floating mode: radius = tol (default 1e-8), double arithmetic;
//   - exact mode: radius = the rounding radius of the tables (zero when the
//     tables are exact rationals), cpp_rational arithmetic. An infeasible
//     verdict in exact mode is a certificate that no joint distribution
//     reproduces the (pre-rounding) tables.
// The witness and the infeasibility functional are re-verified against the
// tables after the solve; the solver is not trusted.

enum class SolverMode { floating, exact_rational };

struct SolverOptions {
    SolverMode mode = SolverMode::floating;
    // Floating mode: per-cell reproduction radius and feasibility tolerance.
    // Also the default compatibility-precheck tolerance in both modes.
    double tol = 1e-8;
    // Optional explicit per-cell radius (e.g. a statistical radius for
    // finite-sample tables). Must be >= the rounding radius in exact mode.
    std::optional<double> radius;
};

struct Witness {
    std::vector<double> p;  // over O^X, global mixed-radix rank order
    std::optional<std::vector<Rational>> exact;
};

struct LpStats {
    std::size_t iterations = 0;
    double objective = 0.0;
    double max_residual = 0.0;  // max |witness marginal - table cell| (feasible runs)
};

struct SectionResult {
    enum class Verdict { feasible, infeasible };
    Verdict verdict = Verdict::feasible;
    std::optional<Witness> witness;                      // present iff feasible
    std::optional<ChshFamilyResult> chsh_certificate;    // present iff infeasible and CHSH-shaped
    std::optional<std::vector<double>> farkas;           // present iff infeasible
    LpStats stats;
    SolverMode mode = SolverMode::floating;
    double radius = 0.0;            // per-cell reproduction radius in force
    double rounding_radius = 0.0;   // measured max |table - rounded table| (exact mode)

    bool feasible() const { return verdict == Verdict::feasible; }
};

namespace detail {

struct CellRef {
    std::size_t context;
    std::size_t cell;                      // rank within the context table
    std::vector<std::size_t> global_rows;  // global ranks whose restriction hits this cell
};

/// Enumerate every (context, cell) with the supporting global assignments.
inline std::vector<CellRef> enumerate_cells(const Scenario& sc) {
    std::vector<std::size_t> all = sc.all_settings();
    std::size_t n_global = sc.global_size();
    std::vector<CellRef> cells;
    for (std::size_t c = 0; c < sc.num_contexts(); ++c) {
        const auto& ctx = sc.contexts()[c];
        std::size_t tsize = sc.context_table_size(c);
        std::size_t base = cells.size();
        for (std::size_t t = 0; t < tsize; ++t) cells.push_back(CellRef{c, t, {}});
        for (std::size_t s = 0; s < n_global; ++s) {
            Assignment global = sc.unrank(all, s);
            Assignment local;
            local.reserve(ctx.size());
            for (std::size_t setting : ctx) local.push_back(global[setting]);
            cells[base + sc.rank(ctx, local)].global_rows.push_back(s);
        }
    }
    return cells;
}

template <class T>
struct BuiltLp {
    std::size_t rows = 0, cols = 0;
    std::vector<T> a;
    std::vector<T> b;
};

/// Rows: one normalization equality, then per cell either one equality
/// (radius zero) or an upper/lower slack pair (radius positive).
template <class T>
BuiltLp<T> build_lp(const Scenario& sc, const std::vector<CellRef>& cells,
                    const std::vector<T>& cell_value, const std::vector<T>& cell_radius) {
    std::size_t n_global = sc.global_size();
    std::size_t n_slack = 0;
    for (std::size_t k = 0; k < cells.size(); ++k)
        if (cell_radius[k] != T(0)) n_slack += 2;

    BuiltLp<T> lp;
    lp.cols = n_global + n_slack;
    lp.rows = 1;
    for (std::size_t k = 0; k < cells.size(); ++k) lp.rows += cell_radius[k] != T(0) ? 2 : 1;
    lp.a.assign(lp.rows * lp.cols, T(0));
    lp.b.assign(lp.rows, T(0));

    // Normalization.
    for (std::size_t s = 0; s < n_global; ++s) lp.a[s] = T(1);
    lp.b[0] = T(1);

    std::size_t row = 1, slack = n_global;
    for (std::size_t k = 0; k < cells.size(); ++k) {
        const CellRef& cell = cells[k];
        if (cell_radius[k] == T(0)) {
            for (std::size_t s : cell.global_rows) lp.a[row * lp.cols + s] = T(1);
            lp.b[row] = cell_value[k];
            ++row;
        } else {
            for (std::size_t s : cell.global_rows) lp.a[row * lp.cols + s] = T(1);
            lp.a[row * lp.cols + slack] = T(1);  // marginal + u = q + r
            lp.b[row] = cell_value[k] + cell_radius[k];
            ++row;
            for (std::size_t s : cell.global_rows) lp.a[row * lp.cols + s] = T(1);
            lp.a[row * lp.cols + slack + 1] = T(-1);  // marginal - l = q - r
            lp.b[row] = cell_value[k] - cell_radius[k];
            ++row;
            slack += 2;
        }
    }
    return lp;
}

}  // namespace detail

/// Decide global-section existence for an empirical model.
/// Throws IncompatibleModel when the tables fail marginal compatibility at
/// the working tolerance, and TooLarge when the LP would not fit.
inline SectionResult global_section(const EmpiricalModel& model, const SolverOptions& opts = {}) {
    const Scenario& sc = model.scenario();
    std::size_t n_global = sc.global_size();
    if (n_global > 1000000)
        throw TooLarge("global_section: |O^X| = " + std::to_string(n_global) + " exceeds 1e6 variables");

    std::vector<detail::CellRef> cells = detail::enumerate_cells(sc);
    if ((1 + 2 * cells.size()) * (n_global + 2 * cells.size()) > 50000000)
        throw TooLarge("global_section: LP tableau would exceed the memory guard");

    SectionResult result;
    result.mode = opts.mode;

    if (opts.mode == SolverMode::floating) {
        // Default: one equality per cell, feasible when the phase-1 optimum
        // is <= tol. An explicit radius switches to interval constraints
        // (used for finite-sample tables).
        double radius = opts.radius.value_or(0.0);
        if (radius < 0.0) throw OutOfRange("global_section: negative radius");
        result.radius = radius;

        double pre_tol = std::max(opts.tol, radius);
        CompatibilityReport compat = check_compatibility(model, pre_tol);
        if (!compat.pass)
            throw IncompatibleModel("global_section: marginal deviation " +
                                    std::to_string(compat.max_deviation) + " exceeds tolerance " +
                                    std::to_string(pre_tol));

        std::vector<double> q(cells.size()), r(cells.size(), radius);
        for (std::size_t k = 0; k < cells.size(); ++k)
            q[k] = std::max(model.table(cells[k].context).p[cells[k].cell], 0.0);

        auto lp = detail::build_lp<double>(sc, cells, q, r);
        auto sol = lp::phase_one<double>(lp.rows, lp.cols, lp.a, lp.b, opts.tol);
        result.stats.iterations = sol.iterations;
        result.stats.objective = sol.objective;

        if (sol.feasible) {
            result.verdict = SectionResult::Verdict::feasible;
            Witness w;
            w.p.assign(sol.x.begin(), sol.x.begin() + static_cast<std::ptrdiff_t>(n_global));
            double total = 0.0, max_res = 0.0;
            for (double v : w.p) {
                if (v < -1e-12) throw ConsistencyFailure("global_section: negative witness entry");
                total += v;
            }
            if (std::abs(total - 1.0) > 1e-9)
                throw ConsistencyFailure("global_section: witness mass " + std::to_string(total));
            for (std::size_t k = 0; k < cells.size(); ++k) {
                double marg = 0.0;
                for (std::size_t s : cells[k].global_rows) marg += w.p[s];
                max_res = std::max(max_res, std::abs(marg - q[k]));
            }
            if (max_res > radius + opts.tol)
                throw ConsistencyFailure("global_section: witness residual " + std::to_string(max_res) +
                                         " exceeds radius " + std::to_string(radius + opts.tol));
            result.stats.max_residual = max_res;
            result.witness = std::move(w);
        } else {
            result.verdict = SectionResult::Verdict::infeasible;
            // Independent Farkas verification: y.b > 0 while y.A <= 0.
            double ymax = 0.0;
            for (double y : sol.farkas) ymax = std::max(ymax, std::abs(y));
            double yb = 0.0;
            for (std::size_t i = 0; i < lp.rows; ++i) yb += sol.farkas[i] * lp.b[i];
            if (yb <= 1e-10 * std::max(1.0, ymax))
                throw ConsistencyFailure("global_section: infeasibility functional has y.b <= 0");
            for (std::size_t j = 0; j < lp.cols; ++j) {
                double dot = 0.0;
                for (std::size_t i = 0; i < lp.rows; ++i) dot += sol.farkas[i] * lp.a[i * lp.cols + j];
                if (dot > 1e-8 * std::max(1.0, ymax))
                    throw ConsistencyFailure("global_section: infeasibility functional violates y.A <= 0");
            }
            result.farkas = std::move(sol.farkas);
        }
    } else {
        // Exact mode: use exact tables where available, otherwise round to
        // the 1e-12 grid and widen the reproduction interval accordingly.
        std::vector<Rational> q(cells.size()), r(cells.size(), Rational(0));
        const Rational grid_radius(1, BigInt(2) * BigInt(kRoundingDenominator));
        double measured = 0.0;
        for (std::size_t k = 0; k < cells.size(); ++k) {
            const ContextTable& t = model.table(cells[k].context);
            if (t.exact) {
                q[k] = (*t.exact)[cells[k].cell];
            } else {
                double v = std::max(t.p[cells[k].cell], 0.0);
                q[k] = round_to_grid(v);
                r[k] = grid_radius;
                measured = std::max(measured, std::abs(v - to_double(q[k])));
            }
        }
        result.rounding_radius = measured;
        Rational radius_rational(0);
        for (const Rational& rv : r) radius_rational = std::max(radius_rational, rv);
        if (opts.radius) {
            Rational user = round_to_grid(*opts.radius, 1000000000000000ll);
            if (user < radius_rational)
                throw OutOfRange("global_section: radius override below the rounding radius");
            radius_rational = user;
            for (Rational& rv : r) rv = user;
        }
        result.radius = to_double(radius_rational);

        double pre_tol = std::max(opts.tol, result.radius);
        CompatibilityReport compat = check_compatibility(model, pre_tol);
        if (!compat.pass)
            throw IncompatibleModel("global_section: marginal deviation " +
                                    std::to_string(compat.max_deviation) + " exceeds tolerance " +
                                    std::to_string(pre_tol));

        auto lp = detail::build_lp<Rational>(sc, cells, q, r);
        auto sol = lp::phase_one<Rational>(lp.rows, lp.cols, lp.a, lp.b);
        result.stats.iterations = sol.iterations;
        result.stats.objective = to_double(sol.objective);

        if (sol.feasible) {
            result.verdict = SectionResult::Verdict::feasible;
            Witness w;
            w.exact = std::vector<Rational>(sol.x.begin(), sol.x.begin() + static_cast<std::ptrdiff_t>(n_global));
            w.p.resize(n_global);
            Rational total(0);
            for (std::size_t s = 0; s < n_global; ++s) {
                if ((*w.exact)[s] < 0) throw ConsistencyFailure("global_section: negative witness entry");
                total += (*w.exact)[s];
                w.p[s] = to_double((*w.exact)[s]);
            }
            if (total != 1) throw ConsistencyFailure("global_section: exact witness mass != 1");
            double max_res = 0.0;
            for (std::size_t k = 0; k < cells.size(); ++k) {
                Rational marg(0);
                for (std::size_t s : cells[k].global_rows) marg += (*w.exact)[s];
                Rational dev = marg > q[k] ? marg - q[k] : q[k] - marg;
                if (dev > r[k])
                    throw ConsistencyFailure("global_section: exact witness residual exceeds radius");
                max_res = std::max(max_res, to_double(dev));
            }
            result.stats.max_residual = max_res;
            result.witness = std::move(w);
        } else {
            result.verdict = SectionResult::Verdict::infeasible;
            Rational yb(0);
            for (std::size_t i = 0; i < lp.rows; ++i) yb += sol.farkas[i] * lp.b[i];
            if (yb <= 0) throw ConsistencyFailure("global_section: exact infeasibility functional has y.b <= 0");
            for (std::size_t j = 0; j < lp.cols; ++j) {
                Rational dot(0);
                for (std::size_t i = 0; i < lp.rows; ++i) dot += sol.farkas[i] * lp.a[i * lp.cols + j];
                if (dot > 0)
                    throw ConsistencyFailure("global_section: exact infeasibility functional violates y.A <= 0");
            }
            std::vector<double> yd(lp.rows);
            for (std::size_t i = 0; i < lp.rows; ++i) yd[i] = to_double(sol.farkas[i]);
            result.farkas = std::move(yd);
        }
    }

    if (result.verdict == SectionResult::Verdict::infeasible && chsh_shape(sc))
        result.chsh_certificate = chsh_family_value(model);
    return result;
}

}  // namespace bellsim
