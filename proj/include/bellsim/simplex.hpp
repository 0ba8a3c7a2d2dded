// Copyright (c) 2026 bellsim contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "bellsim/errors.hpp"
#include "bellsim/rational.hpp"

namespace bellsim::lp {

// Phase-1 simplex deciding {x >= 0 : A x = b}. Templated over the scalar so
// the same pivoting code runs in double (with a pivot tolerance) and in exact
// rational arithmetic (tolerance zero). Bland's rule throughout, so the walk
// terminates and is deterministic.

template <class T>
struct ScalarTraits;

template <>
struct ScalarTraits<double> {
    static constexpr double pivot_eps = 1e-11;
    static bool is_neg(double v) { return v < -pivot_eps; }
    static bool is_pos(double v) { return v > pivot_eps; }
};

template <>
struct ScalarTraits<Rational> {
    static bool is_neg(const Rational& v) { return v < 0; }
    static bool is_pos(const Rational& v) { return v > 0; }
};

template <class T>
struct FeasibilityResult {
    bool feasible = false;
    std::vector<T> x;       // structural solution, size n (meaningful when feasible)
    std::vector<T> farkas;  // row functional y with y.b > 0, y.A <= 0 (when infeasible)
    T objective{};          // phase-1 optimum (total artificial mass)
    std::size_t iterations = 0;
};

/// Decide feasibility of {x >= 0 : A x = b}; A is row-major m x n.
/// Feasible means the phase-1 optimum (total constraint violation under the
/// artificial basis) is <= feas_eps; pass 0 for an exact decision.
/// Rows with negative right-hand side are negated internally; the returned
/// Farkas functional refers to the original rows.
template <class T>
FeasibilityResult<T> phase_one(std::size_t m, std::size_t n, std::vector<T> a, std::vector<T> b,
                               const T& feas_eps = T(0)) {
    using Tr = ScalarTraits<T>;
    if (a.size() != m * n || b.size() != m) throw Error("phase_one: shape mismatch");

    std::vector<bool> flipped(m, false);
    for (std::size_t i = 0; i < m; ++i) {
        if (b[i] < T(0)) {
            flipped[i] = true;
            b[i] = -b[i];
            for (std::size_t j = 0; j < n; ++j) a[i * n + j] = -a[i * n + j];
        }
    }

    // Tableau columns: n structural | m artificial | rhs.
    const std::size_t cols = n + m + 1;
    std::vector<T> tab(m * cols, T(0));
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) tab[i * cols + j] = a[i * n + j];
        tab[i * cols + n + i] = T(1);
        tab[i * cols + n + m] = b[i];
    }
    // Reduced-cost row for min(sum of artificials), artificial basis:
    // r_j = -sum_i A_ij for structural j, 0 for artificials; rhs = -sum b.
    std::vector<T> red(cols, T(0));
    for (std::size_t j = 0; j < n; ++j) {
        T s(0);
        for (std::size_t i = 0; i < m; ++i) s += tab[i * cols + j];
        red[j] = -s;
    }
    {
        T s(0);
        for (std::size_t i = 0; i < m; ++i) s += b[i];
        red[n + m] = -s;
    }

    std::vector<std::size_t> basis(m);
    for (std::size_t i = 0; i < m; ++i) basis[i] = n + i;

    FeasibilityResult<T> res;
    const std::size_t max_iter = 1000000;
    for (;;) {
        // Bland: lowest-index improving column.
        std::size_t enter = cols;
        for (std::size_t j = 0; j < n + m; ++j) {
            if (Tr::is_neg(red[j])) {
                enter = j;
                break;
            }
        }
        if (enter == cols) break;  // optimal

        std::size_t leave = m;
        for (std::size_t i = 0; i < m; ++i) {
            const T& aij = tab[i * cols + enter];
            if (!Tr::is_pos(aij)) continue;
            if (leave == m) {
                leave = i;
                continue;
            }
            // ratio comparison: rhs_i / a_i? vs rhs_l / a_l? without division:
            // rhs_i * a_l <=> rhs_l * a_i (both pivots positive).
            const T lhs = tab[i * cols + n + m] * tab[leave * cols + enter];
            const T rhs = tab[leave * cols + n + m] * aij;
            if (lhs < rhs || (lhs == rhs && basis[i] < basis[leave])) leave = i;
        }
        if (leave == m)
            throw Error("phase_one: unbounded pivot column (numerical breakdown)");

        // Pivot on (leave, enter).
        T piv = tab[leave * cols + enter];
        for (std::size_t j = 0; j < cols; ++j) tab[leave * cols + j] /= piv;
        for (std::size_t i = 0; i < m; ++i) {
            if (i == leave) continue;
            T f = tab[i * cols + enter];
            if (f == T(0)) continue;
            for (std::size_t j = 0; j < cols; ++j) tab[i * cols + j] -= f * tab[leave * cols + j];
            tab[i * cols + enter] = T(0);
        }
        {
            T f = red[enter];
            if (f != T(0)) {
                for (std::size_t j = 0; j < cols; ++j) red[j] -= f * tab[leave * cols + j];
                red[enter] = T(0);
            }
        }
        basis[leave] = enter;

        if (++res.iterations > max_iter) throw Error("phase_one: iteration limit exceeded");
    }

    res.objective = -red[n + m];
    res.feasible = res.objective <= feas_eps;

    if (res.feasible) {
        res.x.assign(n, T(0));
        for (std::size_t i = 0; i < m; ++i)
            if (basis[i] < n) res.x[basis[i]] = tab[i * cols + n + m];
    } else {
        // Dual multipliers from artificial reduced costs: r_{art i} = 1 - y_i.
        res.farkas.assign(m, T(0));
        for (std::size_t i = 0; i < m; ++i) {
            T y = T(1) - red[n + i];
            res.farkas[i] = flipped[i] ? -y : y;
        }
    }
    return res;
}

}  // namespace bellsim::lp
