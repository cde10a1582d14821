#pragma once

// Lattice data model plus the CVP and SLDP solvers: exact-rational LLL (delta
// = 3/4), Babai nearest plane, Fincke-Pohst exact enumeration, orthogonal
// projection of Z^n, and the three SLDP backends (h-based, LLL, exact).

#include <optional>

#include "torusdist/normal_form.hpp"
#include "torusdist/spectral.hpp"

namespace torusdist {

inline constexpr std::size_t kDefaultEnumGuard = 8;

struct Lattice {
    RatMatrix generators;  // columns generate the lattice
    std::size_t ambient() const { return generators.rows; }
    std::size_t rank() const { return generators.cols; }
};

struct CvpInstance {
    RatVector t;
    IntMatrix G;  // m x m, det != 0

    CvpInstance(RatVector target, IntMatrix gen) : t(std::move(target)), G(std::move(gen)) {
        if (G.rows != G.cols || t.size() != G.rows) throw ContractError("CvpInstance: shape mismatch");
        if (det(G) == 0) throw ContractError("CvpInstance: singular generator matrix");
    }
};

struct SldpInstance {
    RatVector t;
    std::vector<IntVector> U_basis;  // possibly empty (U = {0})

    SldpInstance(RatVector target, std::vector<IntVector> basis)
        : t(std::move(target)), U_basis(std::move(basis)) {
        for (const auto& u : U_basis)
            if (u.size() != t.size()) throw ContractError("SldpInstance: basis/target shape mismatch");
        if (!U_basis.empty()) {
            RatMatrix M(U_basis.size(), t.size());
            for (std::size_t i = 0; i < U_basis.size(); ++i)
                for (std::size_t j = 0; j < t.size(); ++j) M.at(i, j) = Rat(U_basis[i][j]);
            if (rank(M) != U_basis.size()) throw ContractError("SldpInstance: dependent subspace basis");
        }
    }

    std::size_t n() const { return t.size(); }
    std::size_t subspace_dim() const { return U_basis.size(); }
};

// Contract: d <= D <= gamma * d for the true distance d.
struct DistanceEstimate {
    Rat D;
    Rat gamma;
    std::optional<Rat> squared_exact;  // present when the squared distance is exactly rational
};

namespace gso {

// Gram-Schmidt data of column vectors b_0..b_{r-1}.
struct Data {
    std::vector<RatVector> bstar;
    std::vector<Rat> B;                 // ||b*_j||^2
    std::vector<std::vector<Rat>> mu;   // mu[i][j], j < i
};

inline Data compute(const std::vector<RatVector>& b) {
    Data g;
    std::size_t r = b.size();
    g.bstar.resize(r);
    g.B.resize(r);
    g.mu.assign(r, {});
    for (std::size_t i = 0; i < r; ++i) {
        g.mu[i].resize(i);
        RatVector w = b[i];
        for (std::size_t j = 0; j < i; ++j) {
            g.mu[i][j] = dot(b[i], g.bstar[j]) / g.B[j];
            w = sub(w, scale(g.mu[i][j], g.bstar[j]));
        }
        g.bstar[i] = w;
        g.B[i] = norm2(w);
        if (g.B[i] == 0) throw ContractError("gso: dependent columns");
    }
    return g;
}

}  // namespace gso

// LLL reduction (delta = 3/4) of the columns of G, exact rational arithmetic.
inline RatMatrix lll_reduce(const RatMatrix& G) {
    std::size_t r = G.cols;
    if (r == 0) return G;
    std::vector<RatVector> b(r);
    for (std::size_t j = 0; j < r; ++j) b[j] = G.col(j);
    gso::Data g = gso::compute(b);  // throws on dependent columns
    const Rat delta(3, 4);

    auto size_reduce = [&](std::size_t k, std::size_t j) {
        Int c = rat_round(g.mu[k][j]);
        if (c == 0) return;
        b[k] = sub(b[k], scale(Rat(c), b[j]));
        for (std::size_t l = 0; l < j; ++l) g.mu[k][l] -= Rat(c) * g.mu[j][l];
        g.mu[k][j] -= Rat(c);
    };

    std::size_t k = 1;
    while (k < r) {
        size_reduce(k, k - 1);
        if (g.B[k] >= (delta - g.mu[k][k - 1] * g.mu[k][k - 1]) * g.B[k - 1]) {
            for (std::size_t j = k - 1; j-- > 0;) size_reduce(k, j);
            ++k;
        } else {
            std::swap(b[k], b[k - 1]);
            g = gso::compute(b);
            k = k > 1 ? k - 1 : 1;
        }
    }
    RatMatrix out(G.rows, r);
    for (std::size_t j = 0; j < r; ++j)
        for (std::size_t i = 0; i < G.rows; ++i) out.at(i, j) = b[j][i];
    return out;
}

struct LatticePoint {
    IntVector coeffs;   // w.r.t. the basis columns
    RatVector point;    // the lattice vector itself
    Rat dist2;          // exact squared distance to the target
};

// Babai nearest plane on an LLL-reduced column basis.
// Guarantee (delta = 3/4): ||t - point|| <= 2^{r/2} dist(t, L).
inline LatticePoint babai_nearest_plane(const RatMatrix& G_reduced, const RatVector& t) {
    std::size_t r = G_reduced.cols;
    std::vector<RatVector> b(r);
    for (std::size_t j = 0; j < r; ++j) b[j] = G_reduced.col(j);
    gso::Data g = gso::compute(b);
    RatVector w = t;
    IntVector c(r, Int(0));
    for (std::size_t j = r; j-- > 0;) {
        Rat mu = dot(w, g.bstar[j]) / g.B[j];
        c[j] = rat_round(mu);
        w = sub(w, scale(Rat(c[j]), b[j]));
    }
    RatVector point = sub(t, w);
    return {c, point, norm2(w)};
}

// Exact CVP on the columns of basis (independent), Fincke-Pohst zig-zag
// enumeration seeded by the Babai point. Ties on the squared distance are
// broken by lexicographic order of the coefficient vectors. Enumeration
// refuses ranks above `guard` instead of silently approximating.
inline LatticePoint cvp_exact_basis(const RatMatrix& basis, const RatVector& t,
                                    std::size_t guard = kDefaultEnumGuard) {
    std::size_t r = basis.cols;
    if (r > guard)
        throw DimensionGuardError("cvp_exact: rank " + std::to_string(r) + " exceeds enumeration guard " +
                                  std::to_string(guard));
    if (r == 0) return {{}, RatVector(t.size(), Rat(0)), norm2(t)};
    std::vector<RatVector> b(r);
    for (std::size_t j = 0; j < r; ++j) b[j] = basis.col(j);
    gso::Data g = gso::compute(b);
    // GSO coordinates of t and the off-span component
    RatVector tau(r);
    Rat t_perp2 = norm2(t);
    for (std::size_t j = 0; j < r; ++j) {
        tau[j] = dot(t, g.bstar[j]) / g.B[j];
        t_perp2 -= tau[j] * tau[j] * g.B[j];
    }

    LatticePoint best = babai_nearest_plane(basis, t);

    auto lex_less = [](const IntVector& x, const IntVector& y) {
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (x[i] < y[i]) return true;
            if (x[i] > y[i]) return false;
        }
        return false;
    };

    // Depth-first over levels r-1 .. 0; per level, candidates expand outward
    // from round(center) on both sides. Costs grow monotonically per side, so
    // a side is exhausted the first time it exceeds the bound. Equal-cost
    // branches are kept alive for the lexicographic tie-break.
    struct Enumerator {
        const std::vector<RatVector>& b;
        const gso::Data& g;
        const RatVector& tau;
        const Rat& t_perp2;
        std::size_t r;
        std::size_t dim;
        IntVector cur;
        LatticePoint& best;
        const decltype(lex_less)& lex;

        // returns true when the candidate was within the bound (explored)
        bool try_c(std::size_t level, const Rat& center, const Rat& acc, const Int& c) {
            Rat diff = center - Rat(c);
            Rat cost = acc + diff * diff * g.B[level];
            if (cost > best.dist2 - t_perp2) return false;
            cur[level] = c;
            if (level == 0) {
                Rat total = cost + t_perp2;
                if (total < best.dist2 || (total == best.dist2 && lex(cur, best.coeffs))) {
                    RatVector pt(dim, Rat(0));
                    for (std::size_t j = 0; j < r; ++j) pt = add(pt, scale(Rat(cur[j]), b[j]));
                    best = {cur, pt, total};
                }
            } else {
                descend(level - 1, cost);
            }
            return true;
        }

        void descend(std::size_t level, const Rat& acc) {
            Rat center = tau[level];
            for (std::size_t i = level + 1; i < r; ++i) center -= Rat(cur[i]) * g.mu[i][level];
            Int base = rat_round(center);
            if (!try_c(level, center, acc, base)) return;  // nearest integer fails: all fail
            bool plus_done = false, minus_done = false;
            for (Int d = 1; !(plus_done && minus_done); ++d) {
                if (!plus_done && !try_c(level, center, acc, Int(base + d))) plus_done = true;
                if (!minus_done && !try_c(level, center, acc, Int(base - d))) minus_done = true;
            }
        }
    };

    IntVector cur(r, Int(0));
    Enumerator en{b, g, tau, t_perp2, r, t.size(), cur, best, lex_less};
    en.descend(r - 1, Rat(0));
    return best;
}

inline std::pair<LatticePoint, Rat> cvp_exact(const CvpInstance& inst,
                                              std::size_t guard = kDefaultEnumGuard) {
    LatticePoint p = cvp_exact_basis(RatMatrix(inst.G), inst.t, guard);
    return {p, p.dist2};
}

// Orthogonal projection of Z^n onto the complement of span(U_basis), with
// integer preimages of the generators (row i of `preimages` maps to column i).
struct ProjectedLattice {
    Lattice lattice;
    IntMatrix preimages;  // (rank) x n, P(preimage row i) = generator column i
};

namespace detail {

// Extract a lattice basis from generating columns A/denom via column HNF,
// keeping integer preimages in terms of the generating columns.
inline ProjectedLattice basis_from_generators(const IntMatrix& A, const Int& denom) {
    auto h = hnf(A.transpose());  // h.H = h.U * A^T; rows of h.H = combos of columns of A
    std::size_t r = hnf_rank(h.H);
    RatMatrix gens(A.rows, r);
    IntMatrix pre(r, A.cols);
    for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = 0; j < A.rows; ++j) gens.at(j, i) = make_rat(h.H.at(i, j), denom);
        for (std::size_t j = 0; j < A.cols; ++j) pre.at(i, j) = h.U.at(i, j);
    }
    return {{gens}, pre};
}

}  // namespace detail

inline ProjectedLattice projected_lattice_basis(const std::vector<IntVector>& U_basis, std::size_t n) {
    if (U_basis.empty()) {
        IntMatrix I = IntMatrix::identity(n);
        return {{RatMatrix(I)}, I};
    }
    std::vector<RatVector> u;
    for (const auto& v : U_basis) u.push_back(to_rat(v));
    auto ortho = gram_schmidt(u);  // rejects dependent input
    if (U_basis.size() == n) {
        // U = R^n: zero lattice
        return {{RatMatrix(n, 0)}, IntMatrix(0, n)};
    }
    // P(e_j) for all j, over a common denominator
    RatMatrix P(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        RatVector e(n, Rat(0));
        e[j] = 1;
        RatVector p = e;
        for (const auto& gvec : ortho) p = sub(p, scale(dot(e, gvec) / norm2(gvec), gvec));
        for (std::size_t i = 0; i < n; ++i) P.at(i, j) = p[i];
    }
    Int N = 1;
    for (const auto& q : P.a) {
        Int l;
        mpz_lcm(l.get_mpz_t(), N.get_mpz_t(), den(q).get_mpz_t());
        N = l;
    }
    IntMatrix A(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) A.at(i, j) = num(P.at(i, j)) * (N / den(P.at(i, j)));
    auto out = detail::basis_from_generators(A, N);
    if (out.lattice.rank() != n - U_basis.size())
        throw ContractError("projected_lattice_basis: unexpected projected rank");
    return out;
}

// Orthonormal-complement hint: rows of C span span(U)^perp, C C^T = I. Verified.
struct ComplementHint {
    RatMatrix C;  // m x n, orthonormal rows
};

namespace detail {

inline void validate_hint(const ComplementHint& hint, const SldpInstance& inst) {
    const RatMatrix& C = hint.C;
    if (C.cols != inst.n() || C.rows + inst.subspace_dim() != inst.n())
        throw ContractError("ComplementHint: shape mismatch");
    if (!has_orthonormal_rows(C)) throw ContractError("ComplementHint: rows not orthonormal");
    for (const auto& u : inst.U_basis) {
        RatVector cu = C.mul_vec(to_rat(u));
        if (!is_zero(cu)) throw ContractError("ComplementHint: rows not orthogonal to U");
    }
}

// Lattice C(Z^n) with preimages, from the verified hint.
inline ProjectedLattice lattice_from_hint(const ComplementHint& hint) {
    IntMatrix A;
    // single common denominator across all entries
    Int N = 1;
    for (const auto& q : hint.C.a) {
        Int l;
        mpz_lcm(l.get_mpz_t(), N.get_mpz_t(), den(q).get_mpz_t());
        N = l;
    }
    A = IntMatrix(hint.C.rows, hint.C.cols);
    for (std::size_t i = 0; i < hint.C.rows; ++i)
        for (std::size_t j = 0; j < hint.C.cols; ++j)
            A.at(i, j) = num(hint.C.at(i, j)) * (N / den(hint.C.at(i, j)));
    return basis_from_generators(A, N);
}

}  // namespace detail

struct SldpWitness {
    IntVector alpha;   // in Z^n
    RatVector u;       // in U
    Rat residual2;     // ||t + u - alpha||^2, exact
};

struct SldpResult {
    DistanceEstimate estimate;
    SldpWitness witness;
};

namespace detail {

// Projection of x onto span(U_basis) (exact).
inline RatVector project_onto_U(const std::vector<IntVector>& U_basis, const RatVector& x) {
    if (U_basis.empty()) return RatVector(x.size(), Rat(0));
    std::vector<RatVector> u;
    for (const auto& v : U_basis) u.push_back(to_rat(v));
    return project_onto_span(u, x);
}

inline SldpWitness witness_from_alpha(const SldpInstance& inst, const IntVector& alpha,
                                      const ComplementHint* hint = nullptr) {
    RatVector diff = sub(to_rat(alpha), inst.t);
    RatVector u;
    Rat res2;
    if (hint) {
        // P_U = I - C^T C for orthonormal complement rows C
        RatVector y = hint->C.mul_vec(sub(inst.t, to_rat(alpha)));  // C (t - alpha)
        u = add(diff, hint->C.transpose().mul_vec(y));
        res2 = norm2(y);
    } else {
        u = project_onto_U(inst.U_basis, diff);
        RatVector res = sub(add(inst.t, u), to_rat(alpha));
        res2 = norm2(res);
    }
    return {alpha, u, res2};
}

}  // namespace detail

// Exact SLDP: squared distance of t + U to Z^n via projection and exact CVP.
// The enumeration rank is n - dim U; the guard applies to it.
inline SldpResult sldp_exact(const SldpInstance& inst, std::size_t guard = kDefaultEnumGuard,
                             const ComplementHint* hint = nullptr) {
    std::size_t n = inst.n();
    if (inst.subspace_dim() == n) {
        IntVector alpha(n, Int(0));
        auto w = detail::witness_from_alpha(inst, alpha);
        return {{Rat(0), Rat(1), Rat(0)}, w};
    }
    if (inst.U_basis.empty()) {
        IntVector alpha(n);
        for (std::size_t i = 0; i < n; ++i) alpha[i] = rat_round(inst.t[i]);
        auto w = detail::witness_from_alpha(inst, alpha);
        return {{sqrt_upper(w.residual2, 16), Rat(1) + pow2(-15), w.residual2}, w};
    }
    ProjectedLattice pl;
    RatVector target;
    if (hint) {
        detail::validate_hint(*hint, inst);
        pl = detail::lattice_from_hint(*hint);
        target = hint->C.mul_vec(inst.t);
    } else {
        pl = projected_lattice_basis(inst.U_basis, n);
        std::vector<RatVector> u;
        for (const auto& v : inst.U_basis) u.push_back(to_rat(v));
        target = sub(inst.t, project_onto_span(u, inst.t));
    }
    LatticePoint cp = cvp_exact_basis(pl.lattice.generators, target, guard);
    IntVector alpha(n, Int(0));
    for (std::size_t i = 0; i < cp.coeffs.size(); ++i)
        for (std::size_t j = 0; j < n; ++j) alpha[j] += cp.coeffs[i] * pl.preimages.at(i, j);
    auto w = detail::witness_from_alpha(inst, alpha, hint);
    // w.residual2 equals cp.dist2 by construction; keep the exact value
    return {{sqrt_upper(cp.dist2, 16), Rat(1) + pow2(-15), cp.dist2}, w};
}

// H-based SLDP (the sigma_min route): D = rounded 2 dist(Ht, Z^k) / sqrt(b)
// with b the top of a ratio-2 bracket of lambda_min(H H^T).
// Guarantee: d <= D <= gamma * d with gamma <= 2 sigma_max / sigma_min.
inline SldpResult sldp_h_based(const SldpInstance& inst) {
    std::size_t n = inst.n();
    IntMatrix H;
    if (inst.U_basis.empty()) {
        H = IntMatrix::identity(n);
    } else {
        IntMatrix M(inst.subspace_dim(), n);
        for (std::size_t i = 0; i < inst.U_basis.size(); ++i)
            for (std::size_t j = 0; j < n; ++j) M.at(i, j) = inst.U_basis[i][j];
        H = kernel_lattice_basis(M);
    }
    std::size_t k = H.rows;
    if (k == 0) {
        IntVector alpha(n, Int(0));
        auto w = detail::witness_from_alpha(inst, alpha);
        return {{Rat(0), Rat(1), Rat(0)}, w};
    }
    RatVector Ht = H.mul_vec(inst.t);
    IntVector beta(k);
    Rat T2 = 0;
    for (std::size_t i = 0; i < k; ++i) {
        beta[i] = rat_round(Ht[i]);
        Rat f = Ht[i] - Rat(beta[i]);
        T2 += f * f;
    }
    auto alpha_opt = solve_integer(H, beta);  // solvable: H(Z^n) = Z^k
    if (!alpha_opt) throw ContractError("sldp_h_based: saturated system unexpectedly unsolvable");
    auto w = detail::witness_from_alpha(inst, *alpha_opt);
    if (T2 == 0) return {{Rat(0), Rat(1), Rat(0)}, w};

    auto sb = gram_spectrum_brackets(H, Rat(2));
    Rat D = sqrt_lower(4 * T2 / sb.lambda_min.hi, 16);
    Rat gamma_hat = 2 * sqrt_upper(sb.lambda_max.hi / sb.lambda_min.hi, 16);
    if (gamma_hat < 1) gamma_hat = 1;
    return {{D, gamma_hat, std::nullopt}, w};
}

// LLL-backed SLDP: project, LLL-reduce, Babai. gamma <= 2^{n/2 + 1}.
inline SldpResult sldp_lll(const SldpInstance& inst, const ComplementHint* hint = nullptr) {
    std::size_t n = inst.n();
    if (inst.subspace_dim() == n || inst.U_basis.empty()) {
        // exact in both degenerate cases
        return sldp_exact(inst, n + 1, nullptr);
    }
    ProjectedLattice pl;
    RatVector target;
    if (hint) {
        detail::validate_hint(*hint, inst);
        pl = detail::lattice_from_hint(*hint);
        target = hint->C.mul_vec(inst.t);
    } else {
        pl = projected_lattice_basis(inst.U_basis, n);
        std::vector<RatVector> u;
        for (const auto& v : inst.U_basis) u.push_back(to_rat(v));
        target = sub(inst.t, project_onto_span(u, inst.t));
    }
    RatMatrix red = lll_reduce(pl.lattice.generators);
    LatticePoint bp = babai_nearest_plane(red, target);
    // express the Babai point in terms of the original generators for preimages:
    // red columns are integer combos of the original ones; recover via exact solve
    IntVector alpha(n, Int(0));
    {
        // solve generators * x = bp.point for integer x
        std::size_t r = pl.lattice.rank();
        RatMatrix A = pl.lattice.generators;
        auto x = solve_rational(A, bp.point);
        if (!x) throw ContractError("sldp_lll: Babai point not in lattice span");
        for (std::size_t i = 0; i < r; ++i) {
            if (den((*x)[i]) != 1) throw ContractError("sldp_lll: non-integer lattice coordinates");
            Int c = num((*x)[i]);
            for (std::size_t j = 0; j < n; ++j) alpha[j] += c * pl.preimages.at(i, j);
        }
    }
    auto w = detail::witness_from_alpha(inst, alpha, hint);
    std::size_t kk = pl.lattice.rank();
    if (w.residual2 == 0) return {{Rat(0), Rat(1), Rat(0)}, w};
    Rat D = sqrt_upper(w.residual2, 16);
    Rat gamma_hat = sqrt_upper(pow2(static_cast<long>(kk)), 16) * (Rat(1) + pow2(-14));
    if (gamma_hat < 1) gamma_hat = 1;
    return {{D, gamma_hat, std::nullopt}, w};
}

// (t + U) intersects Z^n iff H t is integral, H the saturated kernel basis of U.
inline bool affine_lattice_nonempty(const RatVector& t, const std::vector<IntVector>& U_basis) {
    std::size_t n = t.size();
    if (U_basis.empty()) return is_integral(t);
    if (U_basis.size() == n) return true;
    IntMatrix M(U_basis.size(), n);
    for (std::size_t i = 0; i < U_basis.size(); ++i) {
        if (U_basis[i].size() != n) throw ContractError("affine_lattice_nonempty: shape mismatch");
        for (std::size_t j = 0; j < n; ++j) M.at(i, j) = U_basis[i][j];
    }
    IntMatrix H = kernel_lattice_basis(M);
    return is_integral(H.mul_vec(t));
}

}  // namespace torusdist
