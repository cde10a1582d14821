#pragma once

// Torus actions from integer weight matrices: the action map (exact rational
// torus elements and certified e^{y + 2 pi i z} elements), invariant matrices,
// exact orbit-equality decisions, and weight-polytope classification.

#include "torusdist/normal_form.hpp"
#include "torusdist/transcendental.hpp"

namespace torusdist {

struct TorusAction {
    IntMatrix M;  // d x n weight matrix; columns are the weights

    explicit TorusAction(IntMatrix weights) : M(std::move(weights)) {
        if (M.rows == 0 || M.cols == 0) throw ContractError("TorusAction: d, n >= 1 required");
    }

    std::size_t d() const { return M.rows; }
    std::size_t n() const { return M.cols; }

    IntVector weight(std::size_t j) const {
        IntVector w(M.rows);
        for (std::size_t i = 0; i < M.rows; ++i) w[i] = M.at(i, j);
        return w;
    }

    bool weight_column_zero(std::size_t j) const {
        for (std::size_t i = 0; i < M.rows; ++i)
            if (M.at(i, j) != 0) return false;
        return true;
    }

    // rows of M as subspace basis (independent rows only)
    std::vector<IntVector> row_space_basis() const {
        std::vector<IntVector> rows;
        std::vector<RatVector> kept;
        for (std::size_t i = 0; i < M.rows; ++i) {
            IntVector r(M.cols);
            for (std::size_t j = 0; j < M.cols; ++j) r[j] = M.at(i, j);
            RatVector rq = to_rat(r);
            std::vector<RatVector> trial = kept;
            trial.push_back(rq);
            try {
                gram_schmidt(trial);
            } catch (const ContractError&) {
                continue;  // dependent row
            }
            kept.push_back(rq);
            rows.push_back(std::move(r));
        }
        return rows;
    }
};

struct InvariantMatrix {
    IntMatrix H;  // k x n, rows a saturated Z-basis of {alpha : M alpha = 0}
    std::size_t k() const { return H.rows; }
};

// Basis of the lattice of rational invariants; saturation verified via SNF.
inline InvariantMatrix invariant_matrix(const TorusAction& action) {
    IntMatrix H = kernel_lattice_basis(action.M);
    if (!(action.M * H.transpose()).is_zero())
        throw ContractError("invariant_matrix: kernel property violated");
    if (H.rows > 0 && !is_saturated_basis(H))
        throw ContractError("invariant_matrix: basis not saturated");
    return {H};
}

// Exact action of a rational torus element t in (Q(i)^x)^d: w_j = v_j prod t_i^{M_ij}.
inline GaussVector act_exact(const TorusAction& action, const GaussVector& t, const GaussVector& v) {
    if (t.size() != action.d() || v.size() != action.n())
        throw ContractError("act_exact: shape mismatch");
    for (const auto& ti : t)
        if (ti.is_zero()) throw ContractError("act_exact: torus element has zero component");
    GaussVector out(v.size());
    for (std::size_t j = 0; j < v.size(); ++j) {
        GaussianRational acc(1);
        for (std::size_t i = 0; i < t.size(); ++i) acc = acc * gpow(t[i], action.M.at(i, j));
        out[j] = v[j] * acc;
    }
    return out;
}

// Certified action of e^{y + 2 pi i z} (y, z rational in R^d):
// component j is v_j exp(c_j + 2 pi i s_j) with c = M^T y, s = M^T z.
// Relative error <= eps componentwise. Exact when all exponent pairs hit the
// rational fast path (c_j = 0, s_j a quarter turn).
inline std::vector<CertifiedComplex> act(const TorusAction& action, const RatVector& y,
                                         const RatVector& z, const GaussVector& v, const Rat& eps) {
    if (eps <= 0) throw ContractError("act: nonpositive accuracy");
    if (y.size() != action.d() || z.size() != action.d() || v.size() != action.n())
        throw ContractError("act: shape mismatch");
    for (std::size_t j = 0; j < v.size(); ++j)
        if (v[j].is_zero() && !action.weight_column_zero(j))
            throw ContractError("act: zero component with nonzero weight column");
    RatVector c = action.M.transpose().mul_vec(y);
    RatVector s = action.M.transpose().mul_vec(z);
    long bits = 16;
    {
        Rat e = eps;
        while (e < 1) {
            e *= 2;
            ++bits;
        }
    }
    std::vector<CertifiedComplex> out(v.size());
    for (std::size_t j = 0; j < v.size(); ++j) {
        for (long attempt = 0;; ++attempt) {
            CertifiedComplex f = exp_complex(c[j], s[j], bits + 8 * attempt);
            // multiply by the exact Gaussian rational v_j
            Certified re = v[j].re * f.re - v[j].im * f.im;
            Certified im = v[j].re * f.im + v[j].im * f.re;
            CertifiedComplex r{re, im};
            if (v[j].is_zero()) {
                out[j] = r;
                break;
            }
            // relative error on the modulus: |err| <= eps * |value| certified
            Rat err = r.err_bound();
            Rat mod_lo_sq = r.midpoint().norm2();
            Rat mod_lo = sqrt_lower(mod_lo_sq, 16) - err;
            if (mod_lo > 0 && err <= eps * mod_lo) {
                out[j] = r;
                break;
            }
            if (attempt > 64) throw ContractError("act: accuracy escalation failed");
        }
    }
    return out;
}

// Exact test prod v_j^{alpha_j} = prod w_j^{alpha_j} over Gaussian rationals.
// Negative exponents are cross-multiplied so only nonnegative powers occur.
inline bool monomial_equal(const GaussVector& v, const GaussVector& w, const IntVector& alpha) {
    if (v.size() != w.size() || v.size() != alpha.size())
        throw ContractError("monomial_equal: shape mismatch");
    for (std::size_t j = 0; j < v.size(); ++j)
        if (v[j].is_zero() || w[j].is_zero())
            throw ContractError("monomial_equal: zero component");
    GaussianRational lhs(1), rhs(1);
    for (std::size_t j = 0; j < v.size(); ++j) {
        if (alpha[j] > 0) {
            lhs = lhs * gpow(v[j], alpha[j]);
            rhs = rhs * gpow(w[j], alpha[j]);
        } else if (alpha[j] < 0) {
            lhs = lhs * gpow(w[j], -alpha[j]);
            rhs = rhs * gpow(v[j], -alpha[j]);
        }
    }
    return lhs == rhs;
}

// O_v = O_w iff all invariant monomials from the rows of H agree.
inline bool orbit_equal_T(const TorusAction& action, const GaussVector& v, const GaussVector& w) {
    InvariantMatrix inv = invariant_matrix(action);
    for (std::size_t i = 0; i < inv.k(); ++i) {
        IntVector row(action.n());
        for (std::size_t j = 0; j < action.n(); ++j) row[j] = inv.H.at(i, j);
        if (!monomial_equal(v, w, row)) return false;
    }
    return true;
}

// C_v = C_w iff O_v = O_w and |v_i| = |w_i| for all i (exact on |.|^2).
inline bool orbit_equal_K(const TorusAction& action, const GaussVector& v, const GaussVector& w) {
    for (std::size_t j = 0; j < v.size(); ++j)
        if (v[j].norm2() != w[j].norm2()) return false;
    return orbit_equal_T(action, v, w);
}

enum class PolytopePosition { interior, boundary, outside, degenerate };

namespace detail {

// Phase-1 simplex feasibility of {A x = b, x >= 0}, exact rationals,
// Bland's rule. Small instances only.
inline bool lp_feasible(RatMatrix A, RatVector b) {
    std::size_t m = A.rows, k = A.cols;
    for (std::size_t i = 0; i < m; ++i)
        if (b[i] < 0) {
            for (std::size_t j = 0; j < k; ++j) A.at(i, j) = -A.at(i, j);
            b[i] = -b[i];
        }
    // tableau over variables x_0..x_{k-1}, artificials a_0..a_{m-1}
    std::size_t total = k + m;
    RatMatrix T(m + 1, total + 1);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < k; ++j) T.at(i, j) = A.at(i, j);
        T.at(i, k + i) = 1;
        T.at(i, total) = b[i];
    }
    // objective: minimize sum of artificials -> row m holds -(sum of rows)
    for (std::size_t j = 0; j <= total; ++j) {
        Rat s = 0;
        for (std::size_t i = 0; i < m; ++i) s += T.at(i, j);
        T.at(m, j) = -s;
    }
    for (std::size_t i = 0; i < m; ++i) T.at(m, k + i) = 0;
    std::vector<std::size_t> basis(m);
    for (std::size_t i = 0; i < m; ++i) basis[i] = k + i;

    while (true) {
        // Bland: smallest index with negative reduced cost
        std::size_t enter = total;
        for (std::size_t j = 0; j < total; ++j)
            if (T.at(m, j) < 0) {
                enter = j;
                break;
            }
        if (enter == total) break;
        // ratio test, Bland tie-break on basis index
        std::size_t leave = m;
        Rat best_ratio;
        for (std::size_t i = 0; i < m; ++i) {
            if (T.at(i, enter) <= 0) continue;
            Rat ratio = T.at(i, total) / T.at(i, enter);
            if (leave == m || ratio < best_ratio ||
                (ratio == best_ratio && basis[i] < basis[leave])) {
                leave = i;
                best_ratio = ratio;
            }
        }
        if (leave == m) return false;  // unbounded phase-1: cannot happen, treat as infeasible
        Rat piv = T.at(leave, enter);
        for (std::size_t j = 0; j <= total; ++j) T.at(leave, j) /= piv;
        for (std::size_t i = 0; i <= m; ++i) {
            if (i == leave || T.at(i, enter) == 0) continue;
            Rat f = T.at(i, enter);
            for (std::size_t j = 0; j <= total; ++j) T.at(i, j) -= f * T.at(leave, j);
        }
        basis[leave] = enter;
    }
    return T.at(m, total) == 0;  // artificials driven to zero
}

}  // namespace detail

// Exact position of a rational point relative to conv(weight columns of M).
// An all-equal weight set (P a single point) reports `degenerate` rather than
// guessing an interior convention.
inline PolytopePosition polytope_position(const IntMatrix& M, const RatVector& point) {
    std::size_t d = M.rows, n = M.cols;
    if (point.size() != d) throw ContractError("polytope_position: dimension mismatch");
    RatMatrix W(d, n);  // shifted weights omega_j - point
    bool all_zero = true;
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            W.at(i, j) = Rat(M.at(i, j)) - point[i];
            if (W.at(i, j) != 0) all_zero = false;
        }
    if (all_zero) return PolytopePosition::degenerate;
    RatMatrix A(d + 1, n);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < n; ++j) A.at(i, j) = W.at(i, j);
    for (std::size_t j = 0; j < n; ++j) A.at(d, j) = 1;
    RatVector b(d + 1, Rat(0));
    b[d] = 1;
    bool in_hull = detail::lp_feasible(A, b);
    if (!in_hull) return PolytopePosition::outside;
    // interior iff a strictly positive combination exists and the shifted
    // weights span R^d: lambda = 1 + mu, mu >= 0: W mu = -W 1
    RatVector b2(d, Rat(0));
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < n; ++j) b2[i] -= W.at(i, j);
    bool positive_combo = detail::lp_feasible(W, b2);
    if (positive_combo && rank(W) == d) return PolytopePosition::interior;
    return PolytopePosition::boundary;
}

inline PolytopePosition polytope_origin_position(const TorusAction& action) {
    return polytope_position(action.M, RatVector(action.d(), Rat(0)));
}

// Affine span of the weight columns is all of R^d.
inline bool weights_affinely_span(const IntMatrix& M) {
    std::size_t d = M.rows, n = M.cols;
    if (n < d + 1) return false;
    RatMatrix diffs(d, n - 1);
    for (std::size_t j = 1; j < n; ++j)
        for (std::size_t i = 0; i < d; ++i) diffs.at(i, j - 1) = Rat(M.at(i, j) - M.at(i, 0));
    return rank(diffs) == d;
}

}  // namespace torusdist
