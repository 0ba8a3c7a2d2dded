// Copyright (c) 2026 bellsim contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bellsim/linalg.hpp"

namespace bellsim {

// Concrete Kraus-form shadow of the CP-map process layer: maps, flagged
// instruments, and conditioning on a flag effect.

// ---------------------------------------------------------------------------
// Effect: Hermitian operator with spectrum in [0, 1] (a yes/no test).
// ---------------------------------------------------------------------------

class Effect {
  public:
    static Effect validated(Operator m) {
        if (!all_finite(m.a)) throw OutOfRange("effect: non-finite entry");
        double herm = hermiticity_defect(m);
        if (herm > tol::gate)
            throw NotHermitian("effect: Hermiticity defect " + std::to_string(herm) + " > 1e-10");
        EigResult eig = eig_hermitian(m);
        if (eig.values.front() < -tol::gate)
            throw NotPsd("effect: min eigenvalue " + std::to_string(eig.values.front()) + " < -1e-10");
        if (eig.values.back() > 1.0 + tol::gate)
            throw OutOfRange("effect: max eigenvalue " + std::to_string(eig.values.back()) + " > 1 + 1e-10");
        return Effect(std::move(m));
    }

    /// Projector |i><i| on a dim-dimensional flag space.
    static Effect basis_projector(std::size_t dim, std::size_t i) {
        Operator m(dim);
        m.at(i, i) = 1.0;
        return Effect(std::move(m));
    }

    const Operator& op() const { return op_; }
    std::size_t dim() const { return op_.dim; }

  private:
    explicit Effect(Operator m) : op_(std::move(m)) {}
    Operator op_;
};

// ---------------------------------------------------------------------------
// KrausMap: rho -> sum_k K rho K^dag. Trace-preserving when sum K^dag K = I;
// a trace-non-increasing branch needs only sum K^dag K <= I.
// ---------------------------------------------------------------------------

class KrausMap {
  public:
    explicit KrausMap(std::vector<Operator> kraus_ops) : kraus_(std::move(kraus_ops)) {
        if (kraus_.empty()) throw Error("KrausMap: needs at least one Kraus operator");
        for (const Operator& k : kraus_) {
            if (k.dim != kraus_.front().dim) throw DimensionMismatch("KrausMap: mixed Kraus dims");
            if (!all_finite(k.a)) throw OutOfRange("KrausMap: non-finite entry");
        }
        Operator comp = completeness();
        double defect = max_abs_diff(comp, Operator::identity(comp.factor_dims));
        if (defect <= tol::gate) {
            trace_preserving_ = true;
        } else {
            double top = eig_hermitian(comp).values.back();
            if (top > 1.0 + tol::gate)
                throw Error("KrausMap: sum K^dag K has eigenvalue " + std::to_string(top) +
                            " > 1 + 1e-10 (not a CP branch)");
            trace_preserving_ = false;
        }
    }

    static KrausMap single(Operator k) { return KrausMap(std::vector<Operator>{std::move(k)}); }

    static KrausMap identity(std::size_t dim) { return single(Operator::identity(dim)); }

    /// sum_k K^dag K.
    Operator completeness() const {
        Operator s(kraus_.front().factor_dims);
        for (const Operator& k : kraus_) s = s + mul(adjoint(k), k);
        return s;
    }

    const std::vector<Operator>& ops() const { return kraus_; }
    std::size_t dim() const { return kraus_.front().dim; }
    bool trace_preserving() const { return trace_preserving_; }

  private:
    std::vector<Operator> kraus_;
    bool trace_preserving_ = false;
};

/// Unnormalized branch output sum_k K rho K^dag and its trace (the branch
/// probability p(e) = Tr E_e(rho)).
inline std::pair<Operator, double> apply_kraus(const KrausMap& map, const DensityOperator& rho) {
    if (map.dim() != rho.dim())
        throw DimensionMismatch("apply_kraus: map dim " + std::to_string(map.dim()) + " vs state dim " +
                                std::to_string(rho.dim()));
    Operator out(rho.factor_dims());
    for (const Operator& k : map.ops()) out = out + mul(mul(k, rho.op()), adjoint(k));
    return {out, trace(out).real()};
}

// ---------------------------------------------------------------------------
// Instrument: flag-labelled family of CP branches, total map trace-preserving.
// ---------------------------------------------------------------------------

class Instrument {
  public:
    explicit Instrument(std::map<std::string, KrausMap> branches) : branches_(std::move(branches)) {
        if (branches_.empty()) throw Error("Instrument: needs at least one branch");
        std::size_t d = branches_.begin()->second.dim();
        Operator total(branches_.begin()->second.completeness().factor_dims);
        for (const auto& [label, map] : branches_) {
            if (map.dim() != d) throw DimensionMismatch("Instrument: branch '" + label + "' has mismatched dim");
            total = total + map.completeness();
        }
        double defect = max_abs_diff(total, Operator::identity(total.factor_dims));
        if (defect > tol::gate)
            throw Error("Instrument: total map completeness defect " + std::to_string(defect) + " > 1e-10");
    }

    /// Two-branch projective instrument {P, I-P} from a projector.
    static Instrument projective(const Operator& proj, const std::string& keep_label = "+",
                                 const std::string& drop_label = "-") {
        std::map<std::string, KrausMap> b;
        b.emplace(keep_label, KrausMap::single(proj));
        b.emplace(drop_label, KrausMap::single(Operator::identity(proj.factor_dims) - proj));
        return Instrument(std::move(b));
    }

    const std::map<std::string, KrausMap>& branches() const { return branches_; }
    std::size_t dim() const { return branches_.begin()->second.dim(); }

  private:
    std::map<std::string, KrausMap> branches_;
};

struct BranchOutcome {
    std::string flag;
    double prob = 0.0;
    // Absent when prob < 1e-12: the branch never occurs and has no state.
    std::optional<DensityOperator> state;
};

/// Run every branch of an instrument: flag label, probability, and the
/// renormalized branch state rho^(e) = E_e(rho)/p(e). Branch order follows
/// the (sorted) flag labels.
inline std::vector<BranchOutcome> run_instrument(const Instrument& inst, const DensityOperator& rho) {
    if (inst.dim() != rho.dim())
        throw DimensionMismatch("run_instrument: instrument dim " + std::to_string(inst.dim()) +
                                " vs state dim " + std::to_string(rho.dim()));
    std::vector<BranchOutcome> out;
    double total = 0.0;
    for (const auto& [label, map] : inst.branches()) {
        auto [unnorm, p] = apply_kraus(map, rho);
        BranchOutcome b;
        b.flag = label;
        b.prob = p;
        if (p >= tol::never) b.state = validate_density((1.0 / p) * unnorm);
        total += p;
        out.push_back(std::move(b));
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw ConsistencyFailure("run_instrument: branch probabilities sum to " + std::to_string(total));
    return out;
}

// ---------------------------------------------------------------------------
// Conditioning on a flag effect. The flag system is always the last tensor
// factor.
// ---------------------------------------------------------------------------

struct Conditioned {
    DensityOperator state;
    double success_prob = 0.0;
};

/// rho^(e)_AB = (id_AB (x) e)(rho_ABE) / success_prob, success_prob being the
/// trace of the unnormalized contraction.
inline Conditioned condition(const DensityOperator& rho_abe, const Effect& e) {
    const std::vector<std::size_t>& factors = rho_abe.factor_dims();
    if (factors.size() < 2)
        throw DimensionMismatch("condition: state needs a flag factor (have " +
                                std::to_string(factors.size()) + " factor)");
    std::size_t flag_dim = factors.back();
    if (e.dim() != flag_dim)
        throw DimensionMismatch("condition: effect dim " + std::to_string(e.dim()) +
                                " vs flag factor dim " + std::to_string(flag_dim));

    std::size_t kept_dim = rho_abe.dim() / flag_dim;
    std::vector<std::size_t> kept_factors(factors.begin(), factors.end() - 1);
    Operator contracted(kept_factors);
    const Operator& rho = rho_abe.op();
    const Operator& m = e.op();
    for (std::size_t i = 0; i < kept_dim; ++i)
        for (std::size_t j = 0; j < kept_dim; ++j) {
            cplx s = 0.0;
            for (std::size_t f = 0; f < flag_dim; ++f)
                for (std::size_t fp = 0; fp < flag_dim; ++fp)
                    s += rho.at(i * flag_dim + f, j * flag_dim + fp) * m.at(fp, f);
            contracted.at(i, j) = s;
        }

    double p = trace(contracted).real();
    if (p < tol::never)
        throw ZeroProbabilityEvent("condition: retained event has probability " + std::to_string(p));
    return Conditioned{validate_density((1.0 / p) * contracted), p};
}

}  // namespace bellsim
