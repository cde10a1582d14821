#pragma once

// Integer-matrix normal forms (row HNF, SNF) with unimodular transforms, and
// the lattice kernels built on them: kernel bases, integer solves, saturation.

#include <optional>

#include "torusdist/linalg.hpp"

namespace torusdist {

struct HnfResult {
    IntMatrix H;  // row Hermite normal form
    IntMatrix U;  // unimodular, H = U * A
};

// Row-style Hermite normal form: pivots positive, entries above a pivot reduced
// into [0, pivot), zero rows at the bottom. H = U * A with det U = +-1.
inline HnfResult hnf(const IntMatrix& A) {
    std::size_t m = A.rows, n = A.cols;
    HnfResult r{A, IntMatrix::identity(m)};
    IntMatrix& H = r.H;
    IntMatrix& U = r.U;

    auto swap_rows = [&](std::size_t i, std::size_t j) {
        if (i == j) return;
        for (std::size_t c = 0; c < n; ++c) std::swap(H.at(i, c), H.at(j, c));
        for (std::size_t c = 0; c < m; ++c) std::swap(U.at(i, c), U.at(j, c));
    };
    auto addmul_row = [&](std::size_t dst, std::size_t src, const Int& f) {
        if (f == 0) return;
        for (std::size_t c = 0; c < n; ++c) H.at(dst, c) += f * H.at(src, c);
        for (std::size_t c = 0; c < m; ++c) U.at(dst, c) += f * U.at(src, c);
    };
    auto negate_row = [&](std::size_t i) {
        for (std::size_t c = 0; c < n; ++c) H.at(i, c) = -H.at(i, c);
        for (std::size_t c = 0; c < m; ++c) U.at(i, c) = -U.at(i, c);
    };

    std::size_t row = 0;
    for (std::size_t col = 0; col < n && row < m; ++col) {
        // clear everything below position (row, col) by gcd chaining
        while (true) {
            std::size_t best = m;
            for (std::size_t i = row; i < m; ++i)
                if (H.at(i, col) != 0 && (best == m || abs(H.at(i, col)) < abs(H.at(best, col))))
                    best = i;
            if (best == m) break;  // column is zero from `row` down
            swap_rows(row, best);
            bool clean = true;
            for (std::size_t i = row + 1; i < m; ++i) {
                if (H.at(i, col) == 0) continue;
                Int q = floor_div(H.at(i, col), H.at(row, col));
                addmul_row(i, row, -q);
                if (H.at(i, col) != 0) clean = false;
            }
            if (clean) break;
        }
        if (H.at(row, col) == 0) continue;
        if (H.at(row, col) < 0) negate_row(row);
        for (std::size_t i = 0; i < row; ++i) {
            Int q = floor_div(H.at(i, col), H.at(row, col));
            addmul_row(i, row, -q);
        }
        ++row;
    }
    return r;
}

inline std::size_t hnf_rank(const IntMatrix& H) {
    std::size_t r = 0;
    for (std::size_t i = 0; i < H.rows; ++i) {
        bool nonzero = false;
        for (std::size_t j = 0; j < H.cols; ++j)
            if (H.at(i, j) != 0) {
                nonzero = true;
                break;
            }
        if (nonzero) ++r;
    }
    return r;
}

struct SnfResult {
    IntMatrix S;  // diagonal, d_i | d_{i+1}, d_i >= 0
    IntMatrix U;  // unimodular row transform
    IntMatrix V;  // unimodular column transform; S = U * A * V
};

inline SnfResult snf(const IntMatrix& A) {
    std::size_t m = A.rows, n = A.cols;
    SnfResult r{A, IntMatrix::identity(m), IntMatrix::identity(n)};
    IntMatrix& S = r.S;
    IntMatrix& U = r.U;
    IntMatrix& V = r.V;

    auto swap_rows = [&](std::size_t i, std::size_t j) {
        if (i == j) return;
        for (std::size_t c = 0; c < n; ++c) std::swap(S.at(i, c), S.at(j, c));
        for (std::size_t c = 0; c < m; ++c) std::swap(U.at(i, c), U.at(j, c));
    };
    auto swap_cols = [&](std::size_t i, std::size_t j) {
        if (i == j) return;
        for (std::size_t rI = 0; rI < m; ++rI) std::swap(S.at(rI, i), S.at(rI, j));
        for (std::size_t rI = 0; rI < n; ++rI) std::swap(V.at(rI, i), V.at(rI, j));
    };
    auto addmul_row = [&](std::size_t dst, std::size_t src, const Int& f) {
        if (f == 0) return;
        for (std::size_t c = 0; c < n; ++c) S.at(dst, c) += f * S.at(src, c);
        for (std::size_t c = 0; c < m; ++c) U.at(dst, c) += f * U.at(src, c);
    };
    auto addmul_col = [&](std::size_t dst, std::size_t src, const Int& f) {
        if (f == 0) return;
        for (std::size_t rI = 0; rI < m; ++rI) S.at(rI, dst) += f * S.at(rI, src);
        for (std::size_t rI = 0; rI < n; ++rI) V.at(rI, dst) += f * V.at(rI, src);
    };
    auto negate_row = [&](std::size_t i) {
        for (std::size_t c = 0; c < n; ++c) S.at(i, c) = -S.at(i, c);
        for (std::size_t c = 0; c < m; ++c) U.at(i, c) = -U.at(i, c);
    };

    std::size_t k = 0;
    std::size_t dim = std::min(m, n);
    while (k < dim) {
        // find a nonzero pivot in the trailing block
        std::size_t pi = m, pj = n;
        for (std::size_t i = k; i < m && pi == m; ++i)
            for (std::size_t j = k; j < n; ++j)
                if (S.at(i, j) != 0) {
                    pi = i;
                    pj = j;
                    break;
                }
        if (pi == m) break;  // trailing block is zero
        swap_rows(k, pi);
        swap_cols(k, pj);

        bool dirty = true;
        while (dirty) {
            dirty = false;
            // smallest nonzero entry in row/col k of the trailing block as pivot
            for (std::size_t i = k + 1; i < m; ++i)
                if (S.at(i, k) != 0 && abs(S.at(i, k)) < abs(S.at(k, k))) swap_rows(k, i);
            for (std::size_t j = k + 1; j < n; ++j)
                if (S.at(k, j) != 0 && abs(S.at(k, j)) < abs(S.at(k, k))) swap_cols(k, j);
            for (std::size_t i = k + 1; i < m; ++i) {
                if (S.at(i, k) == 0) continue;
                addmul_row(i, k, -floor_div(S.at(i, k), S.at(k, k)));
                if (S.at(i, k) != 0) dirty = true;
            }
            for (std::size_t j = k + 1; j < n; ++j) {
                if (S.at(k, j) == 0) continue;
                addmul_col(j, k, -floor_div(S.at(k, j), S.at(k, k)));
                if (S.at(k, j) != 0) dirty = true;
            }
            if (!dirty) {
                // pivot must divide the whole trailing block
                for (std::size_t i = k + 1; i < m && !dirty; ++i)
                    for (std::size_t j = k + 1; j < n; ++j)
                        if (S.at(i, j) % S.at(k, k) != 0) {
                            addmul_row(k, i, Int(1));
                            dirty = true;
                            break;
                        }
            }
        }
        if (S.at(k, k) < 0) negate_row(k);
        ++k;
    }
    return r;
}

inline std::vector<Int> snf_diagonal(const IntMatrix& S) {
    std::vector<Int> d;
    for (std::size_t i = 0; i < std::min(S.rows, S.cols); ++i)
        if (S.at(i, i) != 0) d.push_back(S.at(i, i));
    return d;
}

// True iff the rows of A generate a saturated lattice of full row rank,
// i.e. all SNF invariant factors are 1 (hence A(Z^n) = Z^k).
inline bool is_saturated_basis(const IntMatrix& A) {
    auto s = snf(A);
    auto d = snf_diagonal(s.S);
    if (d.size() != A.rows) return false;
    for (const auto& x : d)
        if (x != 1) return false;
    return true;
}

// Z-basis of {alpha in Z^n : M alpha = 0}, as rows of a (n - rk M) x n matrix,
// HNF-normalized. The output basis is automatically saturated.
inline IntMatrix kernel_lattice_basis(const IntMatrix& M) {
    std::size_t n = M.cols;
    if (M.rows == 0 || M.is_zero()) {
        // kernel is all of Z^n
        return IntMatrix::identity(n);
    }
    auto h = hnf(M.transpose());  // h.H = h.U * M^T, rows of h.U with zero image span the kernel
    std::size_t r = hnf_rank(h.H);
    IntMatrix K(n - r, n);
    for (std::size_t i = r; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) K.at(i - r, j) = h.U.at(i, j);
    return hnf(K).H;
}

// Solve A x = b over Z. Empty optional when no integer solution exists.
inline std::optional<IntVector> solve_integer(const IntMatrix& A, const IntVector& b) {
    if (b.size() != A.rows) throw ContractError("solve_integer: shape mismatch");
    auto s = snf(A);
    IntVector c = s.U.mul_vec(b);
    std::size_t dim = std::min(A.rows, A.cols);
    IntVector y(A.cols, Int(0));
    for (std::size_t i = 0; i < c.size(); ++i) {
        Int d = i < dim ? s.S.at(i, i) : Int(0);
        if (d == 0) {
            if (c[i] != 0) return std::nullopt;
        } else {
            if (c[i] % d != 0) return std::nullopt;
            y[i] = c[i] / d;
        }
    }
    return s.V.mul_vec(y);
}

// Canonical form of the lattice generated by the COLUMNS of A: the nonzero rows
// of the row-HNF of A^T. Two generator matrices span the same lattice iff these
// agree.
inline IntMatrix column_lattice_canonical(const IntMatrix& A) {
    auto h = hnf(A.transpose());
    std::size_t r = hnf_rank(h.H);
    IntMatrix C(r, A.rows);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < A.rows; ++j) C.at(i, j) = h.H.at(i, j);
    return C;
}

inline bool same_column_lattice(const IntMatrix& A, const IntMatrix& B) {
    return column_lattice_canonical(A) == column_lattice_canonical(B);
}

}  // namespace torusdist
