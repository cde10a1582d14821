#pragma once

// Lattice lifting: greedy sum of squares, Lagrange congruence diagonalization,
// Waring decomposition of positive definite forms, rational orthogonal
// completion by hyperplane reflections, eutactic-star checking, the full
// lifting pipeline s = m ||G||max + 1, and the CVP -> SLDP reduction.

#include <variant>

#include "torusdist/lattice.hpp"

namespace torusdist {

// Greedy decomposition D = sum a_i^2 with a_i = floor(sqrt(residual)).
// k <= ceil(log2 log2 D) + 4 terms for D >= 2.
inline std::vector<Int> sum_of_squares(const Int& D) {
    if (D < 0) throw ContractError("sum_of_squares: negative input");
    std::vector<Int> out;
    Int rem = D;
    while (rem > 0) {
        Int a = isqrt_floor(rem);
        out.push_back(a);
        rem -= a * a;
    }
    return out;
}

struct LagrangeResult {
    IntMatrix Q;         // det != 0, Q A Q^T diagonal after clearing input denominators
    std::vector<Rat> d;  // positive diagonal entries of Q A Q^T
};

namespace detail {

// Leading-principal-minor positive definiteness test; returns the 1-based index
// of the first violated minor, or 0 when positive definite.
inline std::size_t first_nonpositive_minor(const RatMatrix& A) {
    std::size_t m = A.rows;
    for (std::size_t k = 1; k <= m; ++k) {
        RatMatrix sub(k, k);
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j) sub.at(i, j) = A.at(i, j);
        // determinant by fraction-clearing + Bareiss
        Int N = 1;
        for (const auto& q : sub.a) {
            Int l;
            mpz_lcm(l.get_mpz_t(), N.get_mpz_t(), den(q).get_mpz_t());
            N = l;
        }
        IntMatrix Z(k, k);
        for (std::size_t i = 0; i < k * k; ++i) Z.a[i] = num(sub.a[i]) * (N / den(sub.a[i]));
        if (det(Z) <= 0) return k;
    }
    return 0;
}

inline void require_symmetric_pd(const RatMatrix& A, const char* who) {
    if (A.rows != A.cols) throw ContractError(std::string(who) + ": square matrix required");
    for (std::size_t i = 0; i < A.rows; ++i)
        for (std::size_t j = i + 1; j < A.cols; ++j)
            if (A.at(i, j) != A.at(j, i)) throw ContractError(std::string(who) + ": not symmetric");
    std::size_t bad = first_nonpositive_minor(A);
    if (bad != 0)
        throw ContractError(std::string(who) + ": not positive definite (leading minor " +
                            std::to_string(bad) + ")");
}

}  // namespace detail

// Symmetric congruence diagonalization with integer row scaling:
// row_j <- a_ii row_j - a_ji row_i (and the same on columns).
// Restricted to positive definite input so pivots never vanish.
inline LagrangeResult lagrange_diagonalize(const RatMatrix& A_in) {
    detail::require_symmetric_pd(A_in, "lagrange_diagonalize");
    std::size_t m = A_in.rows;
    // clear denominators: work on the integer matrix c^2 A with c = lcm of denominators
    Int c = 1;
    for (const auto& q : A_in.a) {
        Int l;
        mpz_lcm(l.get_mpz_t(), c.get_mpz_t(), den(q).get_mpz_t());
        c = l;
    }
    IntMatrix W(m, m);
    for (std::size_t i = 0; i < m * m; ++i) W.a[i] = num(A_in.a[i]) * (c / den(A_in.a[i]));
    IntMatrix Q = IntMatrix::identity(m);
    for (std::size_t k = 0; k + 1 < m; ++k) {
        Int piv = W.at(k, k);  // positive: leading minors of a PD matrix
        for (std::size_t i = k + 1; i < m; ++i) {
            Int f = W.at(i, k);
            if (f == 0) continue;
            for (std::size_t j = 0; j < m; ++j) {
                W.at(i, j) = piv * W.at(i, j) - f * W.at(k, j);
                Q.at(i, j) = piv * Q.at(i, j) - f * Q.at(k, j);
            }
            for (std::size_t j = 0; j < m; ++j) W.at(j, i) = piv * W.at(j, i) - f * W.at(j, k);
        }
    }
    LagrangeResult r;
    r.Q = Q;
    r.d.resize(m);
    for (std::size_t i = 0; i < m; ++i) r.d[i] = make_rat(W.at(i, i), c);  // Q A Q^T = diag(W_ii / c)
    return r;
}

struct WaringResult {
    std::vector<RatVector> ls;  // sum l_i l_i^T = A exactly
    Int d_max;                  // largest scaled diagonal entry produced internally
};

// A = sum_i l_i l_i^T over Q, N <= m (ceil(log2 log2 d_max) + 4) vectors.
// Pipeline: scale to integer A' = c^2 A, Lagrange-diagonalize, split each
// diagonal entry into greedy squares, pull back through Q^{-1}, unscale by c.
inline WaringResult waring_decompose(const RatMatrix& A) {
    detail::require_symmetric_pd(A, "waring_decompose");
    std::size_t m = A.rows;
    Int c = 1;
    for (const auto& q : A.a) {
        Int l;
        mpz_lcm(l.get_mpz_t(), c.get_mpz_t(), den(q).get_mpz_t());
        c = l;
    }
    RatMatrix Ascaled(m, m);
    for (std::size_t i = 0; i < m * m; ++i) Ascaled.a[i] = A.a[i] * Rat(c * c);
    LagrangeResult lag = lagrange_diagonalize(Ascaled);
    // A' integral and Q integral force integer diagonal entries
    std::vector<Int> dints(m);
    Int dmax = 0;
    for (std::size_t i = 0; i < m; ++i) {
        if (den(lag.d[i]) != 1) throw ContractError("waring_decompose: non-integer diagonal");
        dints[i] = num(lag.d[i]);
        if (dints[i] > dmax) dmax = dints[i];
    }
    auto Qinv_opt = inverse(RatMatrix(lag.Q));
    if (!Qinv_opt) throw ContractError("waring_decompose: singular transform");
    const RatMatrix& Qinv = *Qinv_opt;
    WaringResult out;
    out.d_max = dmax;
    for (std::size_t i = 0; i < m; ++i) {
        RatVector qcol = Qinv.col(i);
        for (const Int& e : sum_of_squares(dints[i])) {
            RatVector l(m);
            for (std::size_t j = 0; j < m; ++j) l[j] = Rat(e) * qcol[j] / Rat(c);
            out.ls.push_back(std::move(l));
        }
    }
    return out;
}

// Complete X (m x n, X X^T = I_m exactly) to an orthogonal Y whose first m rows
// are the rows of X, as a product of at most m rational reflections.
// The map v -> w uses 2<x,u>u/||u||^2 - x with u = v + w, or the plain
// Householder reflection when w = -v.
inline RatMatrix orthogonal_complete(const RatMatrix& X) {
    std::size_t m = X.rows, n = X.cols;
    if (m > n) throw ContractError("orthogonal_complete: more rows than columns");
    {
        RatMatrix XXt = mul(X, X.transpose());
        if (!is_identity(XXt)) throw ContractError("orthogonal_complete: X X^T != I");
    }
    // integer-scaled row state: row i = Z_i / den_i. The reflection update
    // 2<r,axis>axis/||axis||^2 - r has the axis denominator cancel, so the
    // whole pass stays in mpz with one content reduction per row.
    IntMatrix Wz, Yz;
    IntVector Wden, Yden;
    scale_rows_to_int(X, Wz, Wden);
    Yz = IntMatrix::identity(n);
    Yden.assign(n, Int(1));

    auto reduce_row = [n](IntMatrix& Z, IntVector& dens, std::size_t i) {
        Int g = dens[i];
        for (std::size_t j = 0; j < n && g != 1; ++j)
            if (Z.at(i, j) != 0) {
                Int t;
                mpz_gcd(t.get_mpz_t(), g.get_mpz_t(), Z.at(i, j).get_mpz_t());
                g = t;
            }
        if (g > 1) {
            dens[i] /= g;
            for (std::size_t j = 0; j < n; ++j) Z.at(i, j) /= g;
        }
    };

    for (std::size_t k = 0; k < m; ++k) {
        // move row k of W onto e_k; rows < k already sit at e_i and row k is
        // orthogonal to them, so it is supported on coordinates >= k and the
        // reflection can act as the identity on coordinates < k.
        for (std::size_t j = 0; j < k; ++j)
            if (Wz.at(k, j) != 0) throw ContractError("orthogonal_complete: unexpected leading support");
        // axis alpha = den_k e_k + Z_k (u = e_k + w), or e_k when w = -e_k
        IntVector alpha(n, Int(0));
        bool all_zero = true;
        for (std::size_t j = 0; j < n; ++j) {
            alpha[j] = Wz.at(k, j);
            if (j == k) alpha[j] += Wden[k];
            if (alpha[j] != 0) all_zero = false;
        }
        bool anti = all_zero;  // w == -e_k: plain Householder at e_k
        if (anti) {
            alpha.assign(n, Int(0));
            alpha[k] = 1;
        }
        {
            bool already = Wz.at(k, k) == Wden[k];
            for (std::size_t j = k + 1; j < n && already; ++j)
                if (Wz.at(k, j) != 0) already = false;
            if (already) continue;  // row already at e_k
        }
        Int a2 = 0;
        for (std::size_t j = k; j < n; ++j) a2 += alpha[j] * alpha[j];
        // apply to row i of (Z, dens): identity on coords < k; on coords >= k:
        //   new numerator = 2 dot alpha_j - a2 Z_ij (reflection) or
        //                   a2 Z_ij - 2 dot alpha_j (Householder, anti case);
        //   leading coords scale by a2; new denominator = den_i a2.
        auto apply_rows = [&](IntMatrix& Z, IntVector& dens, std::size_t rows) {
            for (std::size_t i = 0; i < rows; ++i) {
                Int dotv = 0;
                for (std::size_t j = k; j < n; ++j)
                    if (alpha[j] != 0) dotv += Z.at(i, j) * alpha[j];
                Int two_dot = 2 * dotv;
                for (std::size_t j = 0; j < n; ++j) {
                    if (j < k) {
                        Z.at(i, j) *= a2;
                    } else {
                        Int refl = two_dot * alpha[j] - a2 * Z.at(i, j);
                        Z.at(i, j) = anti ? Int(-refl) : refl;
                    }
                }
                dens[i] *= a2;
                reduce_row(Z, dens, i);
            }
        };
        apply_rows(Wz, Wden, m);
        apply_rows(Yz, Yden, n);
    }
    // X (R_1 ... R_m) = [I_m | 0], each R_k symmetric and involutive, so the
    // transpose R_m ... R_1 of the accumulated product has first m rows X.
    RatMatrix out(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) out.at(i, j) = make_rat(Yz.at(j, i), Yden[j]);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (out.at(i, j) != X.at(i, j)) throw ContractError("orthogonal_complete: completion failed");
    return out;
}

// (G L)(G L)^T = s^2 I_m and L right-invertible over Z (SNF invariant factors 1).
inline bool eutactic_check(const IntMatrix& G, const IntMatrix& L, const Int& s) {
    if (G.cols != L.rows) throw ContractError("eutactic_check: shape mismatch");
    IntMatrix GL = G * L;
    IntMatrix P = GL * GL.transpose();
    for (std::size_t i = 0; i < P.rows; ++i)
        for (std::size_t j = 0; j < P.cols; ++j) {
            Int want = i == j ? Int(s * s) : Int(0);
            if (P.at(i, j) != want) return false;
        }
    return is_saturated_basis(L);
}

struct LiftResult {
    std::size_t n;    // ambient dimension of the lift
    Int s_total;      // scaling factor s * f
    RatMatrix Y;      // n x n orthogonal; s_total * P(Y Z^n) = G(Z^m)
    std::size_t m;    // original dimension
    IntMatrix X;      // m x n integer, X = s_total * (first m rows of Y)
    IntMatrix L2;     // padding blocks plus scaled Waring vectors: X = [G | G L2]
};

// Lift G(Z^m) to a projection of a rotated cubic lattice:
// s = m ||G||max + 1; A = s^2 G^{-1} G^{-T} - I_m (positive definite);
// Waring-decompose A, clear denominators with f, pad with b_j I_m blocks for
// f^2 - 1 = sum b_j^2; X = [G | G L2] satisfies X X^T = (s f)^2 I_m; complete
// X/(sf) to the orthogonal Y.
inline LiftResult lift_lattice(const IntMatrix& G) {
    if (G.rows != G.cols) throw ContractError("lift_lattice: square matrix required");
    std::size_t m = G.rows;
    if (det(G) == 0) throw ContractError("lift_lattice: singular generator matrix");
    Int s = Int(m) * G.max_abs() + 1;
    auto Ginv = inverse(RatMatrix(G));
    RatMatrix A = mul(*Ginv, Ginv->transpose());
    for (auto& q : A.a) q *= Rat(s * s);
    for (std::size_t i = 0; i < m; ++i) A.at(i, i) -= 1;
    WaringResult war = waring_decompose(A);
    std::size_t N = war.ls.size();
    // f = lcm of the denominators of the Waring vectors
    Int f = 1;
    for (const auto& l : war.ls)
        for (const auto& q : l) {
            Int g;
            mpz_lcm(g.get_mpz_t(), f.get_mpz_t(), den(q).get_mpz_t());
            f = g;
        }
    std::vector<Int> bs = sum_of_squares(f * f - 1);
    std::size_t p = bs.size();
    std::size_t n = m + p * m + N;
    // L2 = [b_1 I | ... | b_p I | f*L]
    IntMatrix L2(m, p * m + N);
    for (std::size_t blk = 0; blk < p; ++blk)
        for (std::size_t i = 0; i < m; ++i) L2.at(i, blk * m + i) = bs[blk];
    for (std::size_t j = 0; j < N; ++j)
        for (std::size_t i = 0; i < m; ++i) {
            Rat scaled = war.ls[j][i] * Rat(f);
            if (den(scaled) != 1) throw ContractError("lift_lattice: denominator clearing failed");
            L2.at(i, p * m + j) = num(scaled);
        }
    IntMatrix X(m, n);
    IntMatrix GL2 = G * L2;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) X.at(i, j) = G.at(i, j);
        for (std::size_t j = 0; j < p * m + N; ++j) X.at(i, m + j) = GL2.at(i, j);
    }
    Int sf = s * f;
    RatMatrix Xq(m, n);
    for (std::size_t i = 0; i < m * n; ++i) Xq.a[i] = make_rat(X.a[i], sf);
    RatMatrix Y = orthogonal_complete(Xq);
    return {n, sf, Y, m, X, L2};
}

struct CvpToSldp {
    Int s_total;
    SldpInstance instance;
    ComplementHint complement;  // rows = first m rows of Y (orthonormal)
    Rat dist_scale;             // dist(t, L) = dist_scale * dist(t' + U, Z^n); equals s_total
};

struct CvpExactAnswer {
    LatticePoint closest;
    Rat dist2;
};

using CvpToSldpOutcome = std::variant<CvpExactAnswer, CvpToSldp>;

// Reduce CVP on (t, G) to SLDP: dist(t, L) = s_total * dist(t' + U, Z^n) with
// t' = Y^T [t; 0] / s_total and U spanned by the last n - m rows of Y.
// The exact branch fires only when the caller opts in (and m is small).
inline CvpToSldpOutcome cvp_to_sldp(const CvpInstance& inst, bool allow_exact = false,
                                    std::size_t exact_dim_limit = 3) {
    std::size_t m = inst.G.rows;
    if (allow_exact && m <= exact_dim_limit) {
        auto [pt, d2] = cvp_exact(inst, exact_dim_limit);
        return CvpExactAnswer{pt, d2};
    }
    LiftResult lift = lift_lattice(inst.G);
    std::size_t n = lift.n;
    // t' = Y^T [t;0] / s_total = X^T t / s_total^2
    RatVector tprime(n, Rat(0));
    for (std::size_t j = 0; j < n; ++j) {
        Rat acc = 0;
        for (std::size_t i = 0; i < m; ++i) acc += Rat(lift.X.at(i, j)) * inst.t[i];
        tprime[j] = acc / Rat(lift.s_total * lift.s_total);
    }
    // U basis: rows m..n-1 of Y, scaled to integer vectors
    std::vector<IntVector> U;
    for (std::size_t i = m; i < n; ++i) {
        Int l = 1;
        for (std::size_t j = 0; j < n; ++j) {
            Int g;
            mpz_lcm(g.get_mpz_t(), l.get_mpz_t(), den(lift.Y.at(i, j)).get_mpz_t());
            l = g;
        }
        IntVector u(n);
        for (std::size_t j = 0; j < n; ++j)
            u[j] = num(lift.Y.at(i, j)) * (l / den(lift.Y.at(i, j)));
        U.push_back(std::move(u));
    }
    RatMatrix C(m, n);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) C.at(i, j) = lift.Y.at(i, j);
    return CvpToSldp{lift.s_total, SldpInstance(tprime, std::move(U)), ComplementHint{C},
                     Rat(lift.s_total)};
}

}  // namespace torusdist
