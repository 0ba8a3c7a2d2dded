// Copyright (c) 2026 bellsim contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "bellsim/errors.hpp"

namespace bellsim {

using cplx = std::complex<double>;

namespace tol {
// Validity gates (Hermiticity, trace, PSD, unitarity, Kraus completeness).
inline constexpr double gate = 1e-10;
// Algebraic identities between quantities computed two ways.
inline constexpr double algebra = 1e-12;
// Branch probabilities below this count as "never occurs".
inline constexpr double never = 1e-12;
}  // namespace tol

inline bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

// NaN compares false against every tolerance, so validation gates check
// finiteness explicitly before any defect test.
template <class Range>
inline bool all_finite(const Range& values) {
    for (cplx z : values)
        if (!finite(z)) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Ket: normalized column vector of complex amplitudes.
// ---------------------------------------------------------------------------

struct Ket {
    std::vector<cplx> amp;

    Ket() = default;
    explicit Ket(std::vector<cplx> a) : amp(std::move(a)) {}

    std::size_t dim() const { return amp.size(); }

    double norm() const {
        double s = 0.0;
        for (cplx z : amp) s += std::norm(z);
        return std::sqrt(s);
    }

    /// Basis vector |i> in a dim-dimensional space.
    static Ket basis(std::size_t dim, std::size_t i) {
        Ket k(std::vector<cplx>(dim, cplx(0.0)));
        k.amp.at(i) = cplx(1.0);
        return k;
    }

    /// Linear polarization at angle theta: cos t |0> + sin t |1>.
    static Ket linear(double theta) {
        return Ket({cplx(std::cos(theta)), cplx(std::sin(theta))});
    }
};

inline Ket normalized(Ket k) {
    double n = k.norm();
    if (n < 1e-300) throw OutOfRange("cannot normalize a zero vector");
    for (cplx& z : k.amp) z /= n;
    return k;
}

inline Ket tensor(const Ket& a, const Ket& b) {
    Ket out(std::vector<cplx>(a.dim() * b.dim()));
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = 0; j < b.dim(); ++j) out.amp[i * b.dim() + j] = a.amp[i] * b.amp[j];
    return out;
}

inline cplx inner(const Ket& a, const Ket& b) {
    if (a.dim() != b.dim()) throw DimensionMismatch("inner: kets of dim " + std::to_string(a.dim()) + " vs " + std::to_string(b.dim()));
    cplx s = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) s += std::conj(a.amp[i]) * b.amp[i];
    return s;
}

// ---------------------------------------------------------------------------
// Operator: dense complex square matrix with tensor-factor bookkeeping.
//
// factor_dims records the fixed tensor order of the composite space, so that
// partial traces and flag conditioning never have to guess the factorization.
// ---------------------------------------------------------------------------

struct Operator {
    std::size_t dim = 0;
    std::vector<std::size_t> factor_dims;  // product == dim
    std::vector<cplx> a;                   // row-major, dim x dim

    Operator() = default;

    explicit Operator(std::vector<std::size_t> factors)
        : factor_dims(std::move(factors)) {
        dim = 1;
        for (std::size_t d : factor_dims) {
            if (d == 0) throw DimensionMismatch("Operator: zero factor dimension");
            dim *= d;
        }
        a.assign(dim * dim, cplx(0.0));
    }

    explicit Operator(std::size_t d) : Operator(std::vector<std::size_t>{d}) {}

    cplx& at(std::size_t i, std::size_t j) { return a[i * dim + j]; }
    const cplx& at(std::size_t i, std::size_t j) const { return a[i * dim + j]; }

    std::size_t num_factors() const { return factor_dims.size(); }

    static Operator identity(std::vector<std::size_t> factors) {
        Operator m(std::move(factors));
        for (std::size_t i = 0; i < m.dim; ++i) m.at(i, i) = 1.0;
        return m;
    }

    static Operator identity(std::size_t d) { return identity(std::vector<std::size_t>{d}); }

    /// Build from a row-major initializer; factor_dims defaults to {dim}.
    static Operator from_rows(const std::vector<std::vector<cplx>>& rows,
                              std::vector<std::size_t> factors = {}) {
        std::size_t d = rows.size();
        if (factors.empty()) factors = {d};
        Operator m(std::move(factors));
        if (m.dim != d) throw DimensionMismatch("from_rows: factor product != row count");
        for (std::size_t i = 0; i < d; ++i) {
            if (rows[i].size() != d) throw DimensionMismatch("from_rows: ragged rows");
            for (std::size_t j = 0; j < d; ++j) m.at(i, j) = rows[i][j];
        }
        return m;
    }
};

inline Operator operator+(const Operator& x, const Operator& y) {
    if (x.dim != y.dim) throw DimensionMismatch("operator+: dims differ");
    Operator r = x;
    for (std::size_t i = 0; i < r.a.size(); ++i) r.a[i] += y.a[i];
    return r;
}

inline Operator operator-(const Operator& x, const Operator& y) {
    if (x.dim != y.dim) throw DimensionMismatch("operator-: dims differ");
    Operator r = x;
    for (std::size_t i = 0; i < r.a.size(); ++i) r.a[i] -= y.a[i];
    return r;
}

inline Operator operator*(cplx s, const Operator& x) {
    Operator r = x;
    for (cplx& z : r.a) z *= s;
    return r;
}

inline Operator operator*(double s, const Operator& x) { return cplx(s) * x; }

inline Operator mul(const Operator& x, const Operator& y) {
    if (x.dim != y.dim) throw DimensionMismatch("mul: dims differ");
    Operator r(x.factor_dims);
    for (std::size_t i = 0; i < x.dim; ++i)
        for (std::size_t k = 0; k < x.dim; ++k) {
            cplx xik = x.at(i, k);
            if (xik == cplx(0.0)) continue;
            for (std::size_t j = 0; j < x.dim; ++j) r.at(i, j) += xik * y.at(k, j);
        }
    return r;
}

inline Operator adjoint(const Operator& x) {
    Operator r(x.factor_dims);
    for (std::size_t i = 0; i < x.dim; ++i)
        for (std::size_t j = 0; j < x.dim; ++j) r.at(i, j) = std::conj(x.at(j, i));
    return r;
}

inline cplx trace(const Operator& x) {
    cplx s = 0.0;
    for (std::size_t i = 0; i < x.dim; ++i) s += x.at(i, i);
    return s;
}

inline Ket apply(const Operator& x, const Ket& v) {
    if (x.dim != v.dim()) throw DimensionMismatch("apply: operator dim " + std::to_string(x.dim) + " vs ket dim " + std::to_string(v.dim()));
    Ket r(std::vector<cplx>(x.dim, cplx(0.0)));
    for (std::size_t i = 0; i < x.dim; ++i)
        for (std::size_t j = 0; j < x.dim; ++j) r.amp[i] += x.at(i, j) * v.amp[j];
    return r;
}

/// |v><w| with factor bookkeeping taken from `factors` (defaults to {dim}).
inline Operator outer(const Ket& v, const Ket& w, std::vector<std::size_t> factors = {}) {
    if (v.dim() != w.dim()) throw DimensionMismatch("outer: kets of different dim");
    if (factors.empty()) factors = {v.dim()};
    Operator m(std::move(factors));
    if (m.dim != v.dim()) throw DimensionMismatch("outer: factor product != ket dim");
    for (std::size_t i = 0; i < v.dim(); ++i)
        for (std::size_t j = 0; j < v.dim(); ++j) m.at(i, j) = v.amp[i] * std::conj(w.amp[j]);
    return m;
}

inline Operator projector_onto(const Ket& v) { return outer(v, v); }

inline double max_abs_diff(const Operator& x, const Operator& y) {
    if (x.dim != y.dim) throw DimensionMismatch("max_abs_diff: dims differ");
    double m = 0.0;
    for (std::size_t i = 0; i < x.a.size(); ++i) m = std::max(m, std::abs(x.a[i] - y.a[i]));
    return m;
}

inline double max_abs(const Operator& x) {
    double m = 0.0;
    for (cplx z : x.a) m = std::max(m, std::abs(z));
    return m;
}

inline double hermiticity_defect(const Operator& x) {
    double m = 0.0;
    for (std::size_t i = 0; i < x.dim; ++i)
        for (std::size_t j = 0; j < x.dim; ++j)
            m = std::max(m, std::abs(x.at(i, j) - std::conj(x.at(j, i))));
    return m;
}

inline bool is_hermitian(const Operator& x, double tolerance = tol::gate) {
    return hermiticity_defect(x) <= tolerance;
}

inline double unitarity_defect(const Operator& x) {
    return max_abs_diff(mul(adjoint(x), x), Operator::identity(x.factor_dims));
}

inline bool is_unitary(const Operator& x, double tolerance = tol::gate) {
    return unitarity_defect(x) <= tolerance;
}

/// Kronecker product in the fixed order (a first, b second); factor lists concatenate.
inline Operator tensor(const Operator& x, const Operator& y) {
    std::vector<std::size_t> factors = x.factor_dims;
    factors.insert(factors.end(), y.factor_dims.begin(), y.factor_dims.end());
    Operator r(std::move(factors));
    for (std::size_t i = 0; i < x.dim; ++i)
        for (std::size_t j = 0; j < x.dim; ++j) {
            cplx xij = x.at(i, j);
            if (xij == cplx(0.0)) continue;
            for (std::size_t k = 0; k < y.dim; ++k)
                for (std::size_t l = 0; l < y.dim; ++l)
                    r.at(i * y.dim + k, j * y.dim + l) = xij * y.at(k, l);
        }
    return r;
}

// ---------------------------------------------------------------------------
// Hermitian eigendecomposition (cyclic complex Jacobi).
// ---------------------------------------------------------------------------

struct EigResult {
    std::vector<double> values;  // ascending
    std::vector<Ket> vectors;    // vectors[k] pairs with values[k]
};

/// Eigendecomposition of a Hermitian operator via cyclic Jacobi rotations.
/// Eigenvalues come back ascending; within a degenerate cluster the
/// eigenvector order is unspecified.
inline EigResult eig_hermitian(const Operator& m) {
    if (!all_finite(m.a)) throw OutOfRange("eig_hermitian: non-finite entry");
    if (hermiticity_defect(m) > tol::gate)
        throw NotHermitian("eig_hermitian: defect " + std::to_string(hermiticity_defect(m)) +
                           " exceeds " + std::to_string(tol::gate));
    const std::size_t n = m.dim;
    Operator A = m;
    // Symmetrize exactly so rotations act on a true Hermitian matrix.
    for (std::size_t i = 0; i < n; ++i) {
        A.at(i, i) = cplx(A.at(i, i).real(), 0.0);
        for (std::size_t j = i + 1; j < n; ++j) {
            cplx avg = 0.5 * (A.at(i, j) + std::conj(A.at(j, i)));
            A.at(i, j) = avg;
            A.at(j, i) = std::conj(avg);
        }
    }
    Operator V = Operator::identity(n);

    double scale = std::max(1.0, max_abs(A));
    for (int sweep = 0; sweep < 60; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off = std::max(off, std::abs(A.at(p, q)));
        if (off <= 1e-15 * scale) break;

        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                double apq = std::abs(A.at(p, q));
                if (apq <= 1e-300) continue;
                cplx phase = A.at(p, q) / apq;
                double app = A.at(p, p).real();
                double aqq = A.at(q, q).real();
                double tau = (aqq - app) / (2.0 * apq);
                double t = (tau >= 0.0) ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                        : 1.0 / (tau - std::sqrt(1.0 + tau * tau));
                double c = 1.0 / std::sqrt(1.0 + t * t);
                double s = t * c;
                // R differs from the identity only in the (p,q) block:
                //   R_pp = c, R_pq = s, R_qp = -s e^{-i phi}, R_qq = c e^{-i phi},
                // where phi is the phase of A_pq. Then R^dag A R zeroes A_pq.
                cplx rpq = cplx(s);
                cplx rqp = -s * std::conj(phase);
                cplx rqq = c * std::conj(phase);
                // A <- A R (columns p,q)
                for (std::size_t k = 0; k < n; ++k) {
                    cplx akp = A.at(k, p), akq = A.at(k, q);
                    A.at(k, p) = c * akp + rqp * akq;
                    A.at(k, q) = rpq * akp + rqq * akq;
                }
                // A <- R^dag A (rows p,q)
                for (std::size_t k = 0; k < n; ++k) {
                    cplx apk = A.at(p, k), aqk = A.at(q, k);
                    A.at(p, k) = c * apk + std::conj(rqp) * aqk;
                    A.at(q, k) = std::conj(rpq) * apk + std::conj(rqq) * aqk;
                }
                // V <- V R
                for (std::size_t k = 0; k < n; ++k) {
                    cplx vkp = V.at(k, p), vkq = V.at(k, q);
                    V.at(k, p) = c * vkp + rqp * vkq;
                    V.at(k, q) = rpq * vkp + rqq * vkq;
                }
                A.at(p, q) = 0.0;
                A.at(q, p) = 0.0;
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return A.at(i, i).real() < A.at(j, j).real(); });

    EigResult res;
    res.values.reserve(n);
    res.vectors.reserve(n);
    for (std::size_t k : order) {
        res.values.push_back(A.at(k, k).real());
        Ket v{std::vector<cplx>(n)};
        for (std::size_t i = 0; i < n; ++i) v.amp[i] = V.at(i, k);
        res.vectors.push_back(std::move(v));
    }
    return res;
}

inline double min_eigenvalue(const Operator& m) { return eig_hermitian(m).values.front(); }

// ---------------------------------------------------------------------------
// DensityOperator: Hermitian, PSD, unit-trace operator. Construction goes
// through validate_density so the invariants hold wherever one is accepted.
// ---------------------------------------------------------------------------

class DensityOperator {
  public:
    const Operator& op() const { return op_; }
    std::size_t dim() const { return op_.dim; }
    const std::vector<std::size_t>& factor_dims() const { return op_.factor_dims; }

    double purity() const { return trace(mul(op_, op_)).real(); }

    friend DensityOperator validate_density(const Operator& m);

  private:
    explicit DensityOperator(Operator m) : op_(std::move(m)) {}
    Operator op_;
};

/// Gate an arbitrary operator into a DensityOperator, or throw naming the
/// violated bound and the measured value.
inline DensityOperator validate_density(const Operator& m) {
    if (!all_finite(m.a)) throw OutOfRange("density: non-finite entry");
    double herm = hermiticity_defect(m);
    if (herm > tol::gate)
        throw NotHermitian("density: Hermiticity defect " + std::to_string(herm) + " > 1e-10");
    double tr_err = std::abs(trace(m) - cplx(1.0));
    if (tr_err > tol::gate)
        throw NotUnitTrace("density: |trace - 1| = " + std::to_string(tr_err) + " > 1e-10");
    double lam_min = min_eigenvalue(m);
    if (lam_min < -tol::gate)
        throw NotPsd("density: min eigenvalue " + std::to_string(lam_min) + " < -1e-10");
    return DensityOperator(m);
}

inline DensityOperator density_from_ket(const Ket& v, std::vector<std::size_t> factors = {}) {
    return validate_density(outer(v, v, std::move(factors)));
}

// ---------------------------------------------------------------------------
// Partial trace over the complement of `keep`, in original relative order.
// ---------------------------------------------------------------------------

inline Operator partial_trace_op(const Operator& m, const std::vector<std::size_t>& keep) {
    const std::size_t nf = m.num_factors();
    if (keep.empty()) throw InvalidSubsystem("partial_trace: keep set is empty");
    std::vector<bool> kept(nf, false);
    for (std::size_t idx : keep) {
        if (idx >= nf)
            throw InvalidSubsystem("partial_trace: factor index " + std::to_string(idx) +
                                   " out of range (have " + std::to_string(nf) + " factors)");
        if (kept[idx]) throw InvalidSubsystem("partial_trace: duplicate factor index");
        kept[idx] = true;
    }
    if (std::all_of(kept.begin(), kept.end(), [](bool b) { return b; }))
        throw InvalidSubsystem("partial_trace: keep set covers all factors");

    std::vector<std::size_t> keep_dims, trace_dims;
    for (std::size_t f = 0; f < nf; ++f) (kept[f] ? keep_dims : trace_dims).push_back(m.factor_dims[f]);
    std::size_t td = 1;
    for (std::size_t d : trace_dims) td *= d;

    // Row index of m decomposes over factor_dims (big-endian mixed radix).
    // Map (kept multi-index, traced multi-index) back to a full flat index.
    std::vector<std::size_t> stride(nf, 1);
    for (std::size_t f = nf; f-- > 1;) stride[f - 1] = stride[f] * m.factor_dims[f];

    auto full_index = [&](std::size_t kidx, std::size_t tidx) {
        std::size_t full = 0;
        std::size_t kq = kidx, tq = tidx;
        // Walk factors right-to-left so least-significant digits peel off first.
        for (std::size_t f = nf; f-- > 0;) {
            std::size_t digit;
            if (kept[f]) {
                digit = kq % m.factor_dims[f];
                kq /= m.factor_dims[f];
            } else {
                digit = tq % m.factor_dims[f];
                tq /= m.factor_dims[f];
            }
            full += digit * stride[f];
        }
        return full;
    };

    Operator r(keep_dims);
    for (std::size_t i = 0; i < r.dim; ++i)
        for (std::size_t j = 0; j < r.dim; ++j) {
            cplx s = 0.0;
            for (std::size_t t = 0; t < td; ++t) s += m.at(full_index(i, t), full_index(j, t));
            r.at(i, j) = s;
        }
    return r;
}

inline DensityOperator partial_trace(const DensityOperator& rho, const std::vector<std::size_t>& keep) {
    return validate_density(partial_trace_op(rho.op(), keep));
}

}  // namespace bellsim
