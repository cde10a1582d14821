#pragma once

// Dense exact matrices and vectors over Z and Q, plus the handful of exact
// kernels everything else leans on: Gaussian solves, Gram-Schmidt, projections.

#include <optional>
#include <utility>
#include <vector>

#include "torusdist/numeric.hpp"

namespace torusdist {

using RatVector = std::vector<Rat>;
using IntVector = std::vector<Int>;
using GaussVector = std::vector<GaussianRational>;

struct IntMatrix {
    std::size_t rows = 0, cols = 0;
    std::vector<Int> a;  // row-major

    IntMatrix() = default;
    IntMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, Int(0)) {}

    Int& at(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    const Int& at(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

    static IntMatrix identity(std::size_t n) {
        IntMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
        return m;
    }

    IntMatrix transpose() const {
        IntMatrix t(cols, rows);
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < cols; ++j) t.at(j, i) = at(i, j);
        return t;
    }

    bool is_zero() const {
        for (const auto& x : a)
            if (x != 0) return false;
        return true;
    }

    Int max_abs() const {  // ||.||_max
        Int m = 0;
        for (const auto& x : a)
            if (abs(x) > m) m = abs(x);
        return m;
    }

    std::size_t max_bit_length() const {
        std::size_t b = 1;
        for (const auto& x : a)
            if (x != 0) b = std::max(b, bit_length(x));
        return b;
    }

    friend bool operator==(const IntMatrix& x, const IntMatrix& y) {
        return x.rows == y.rows && x.cols == y.cols && x.a == y.a;
    }

    friend IntMatrix operator*(const IntMatrix& x, const IntMatrix& y) {
        if (x.cols != y.rows) throw ContractError("IntMatrix: shape mismatch in product");
        IntMatrix z(x.rows, y.cols);
        for (std::size_t i = 0; i < x.rows; ++i)
            for (std::size_t k = 0; k < x.cols; ++k) {
                const Int& xik = x.at(i, k);
                if (xik == 0) continue;
                for (std::size_t j = 0; j < y.cols; ++j) z.at(i, j) += xik * y.at(k, j);
            }
        return z;
    }

    IntVector mul_vec(const IntVector& v) const {
        if (v.size() != cols) throw ContractError("IntMatrix: shape mismatch in mat-vec");
        IntVector r(rows, Int(0));
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < cols; ++j) r[i] += at(i, j) * v[j];
        return r;
    }

    RatVector mul_vec(const RatVector& v) const {
        if (v.size() != cols) throw ContractError("IntMatrix: shape mismatch in mat-vec");
        RatVector r(rows, Rat(0));
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < cols; ++j) r[i] += Rat(at(i, j)) * v[j];
        return r;
    }
};

// Determinant by fraction-free (Bareiss) elimination.
inline Int det(const IntMatrix& m) {
    if (m.rows != m.cols) throw ContractError("det: square matrix required");
    std::size_t n = m.rows;
    if (n == 0) return 1;
    IntMatrix w = m;
    Int prev = 1;
    int sign = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (w.at(k, k) == 0) {
            std::size_t p = k + 1;
            while (p < n && w.at(p, k) == 0) ++p;
            if (p == n) return 0;
            for (std::size_t j = 0; j < n; ++j) std::swap(w.at(k, j), w.at(p, j));
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j) {
                Int t = w.at(i, j) * w.at(k, k) - w.at(i, k) * w.at(k, j);
                w.at(i, j) = t / prev;  // exact division
            }
        prev = w.at(k, k);
    }
    return sign > 0 ? w.at(n - 1, n - 1) : Int(-w.at(n - 1, n - 1));
}

struct RatMatrix {
    std::size_t rows = 0, cols = 0;
    std::vector<Rat> a;

    RatMatrix() = default;
    RatMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, Rat(0)) {}

    explicit RatMatrix(const IntMatrix& m) : rows(m.rows), cols(m.cols), a(m.rows * m.cols) {
        for (std::size_t i = 0; i < a.size(); ++i) a[i] = Rat(m.a[i]);
    }

    Rat& at(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    const Rat& at(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

    static RatMatrix identity(std::size_t n) {
        RatMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
        return m;
    }

    RatMatrix transpose() const {
        RatMatrix t(cols, rows);
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < cols; ++j) t.at(j, i) = at(i, j);
        return t;
    }

    RatVector row(std::size_t i) const {
        RatVector r(cols);
        for (std::size_t j = 0; j < cols; ++j) r[j] = at(i, j);
        return r;
    }

    RatVector col(std::size_t j) const {
        RatVector c(rows);
        for (std::size_t i = 0; i < rows; ++i) c[i] = at(i, j);
        return c;
    }

    RatVector mul_vec(const RatVector& v) const {
        if (v.size() != cols) throw ContractError("RatMatrix: shape mismatch in mat-vec");
        RatVector r(rows, Rat(0));
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < cols; ++j) r[i] += at(i, j) * v[j];
        return r;
    }

    friend bool operator==(const RatMatrix& x, const RatMatrix& y) {
        return x.rows == y.rows && x.cols == y.cols && x.a == y.a;
    }
};

// Per-row integer scaling: row i of m equals ints row / dens[i].
inline void scale_rows_to_int(const RatMatrix& m, IntMatrix& ints, IntVector& dens) {
    ints = IntMatrix(m.rows, m.cols);
    dens.assign(m.rows, Int(1));
    for (std::size_t i = 0; i < m.rows; ++i) {
        Int l = 1;
        for (std::size_t j = 0; j < m.cols; ++j) {
            Int g;
            mpz_lcm(g.get_mpz_t(), l.get_mpz_t(), den(m.at(i, j)).get_mpz_t());
            l = g;
        }
        dens[i] = l;
        for (std::size_t j = 0; j < m.cols; ++j)
            ints.at(i, j) = num(m.at(i, j)) * (l / den(m.at(i, j)));
    }
}

// Product through per-row/per-column integer scalings: one canonicalization per
// output entry instead of one per multiply-add. Pays off on fat entries.
inline RatMatrix mul(const RatMatrix& x, const RatMatrix& y) {
    if (x.cols != y.rows) throw ContractError("RatMatrix: shape mismatch in product");
    IntMatrix xi, yti;
    IntVector xd, yd;
    scale_rows_to_int(x, xi, xd);
    scale_rows_to_int(y.transpose(), yti, yd);
    RatMatrix z(x.rows, y.cols);
    Int acc, t;
    for (std::size_t i = 0; i < x.rows; ++i)
        for (std::size_t j = 0; j < y.cols; ++j) {
            acc = 0;
            for (std::size_t k = 0; k < x.cols; ++k) {
                t = xi.at(i, k) * yti.at(j, k);
                acc += t;
            }
            z.at(i, j) = make_rat(acc, xd[i] * yd[j]);
        }
    return z;
}

inline bool is_identity(const RatMatrix& m) {
    if (m.rows != m.cols) return false;
    for (std::size_t i = 0; i < m.rows; ++i)
        for (std::size_t j = 0; j < m.cols; ++j)
            if (m.at(i, j) != (i == j ? Rat(1) : Rat(0))) return false;
    return true;
}

// Exact check that the rows of m are pairwise orthogonal with unit norm,
// via per-row integer scaling (fast on fat rationals).
inline bool has_orthonormal_rows(const RatMatrix& m) {
    IntMatrix zi;
    IntVector dens;
    scale_rows_to_int(m, zi, dens);
    for (std::size_t i = 0; i < m.rows; ++i)
        for (std::size_t j = i; j < m.rows; ++j) {
            Int dot = 0;
            for (std::size_t k = 0; k < m.cols; ++k) dot += zi.at(i, k) * zi.at(j, k);
            if (i == j) {
                if (dot != dens[i] * dens[i]) return false;
            } else if (dot != 0) {
                return false;
            }
        }
    return true;
}

inline Rat dot(const RatVector& x, const RatVector& y) {
    if (x.size() != y.size()) throw ContractError("dot: length mismatch");
    Rat s = 0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

inline Rat norm2(const RatVector& x) { return dot(x, x); }  // squared Euclidean norm

inline RatVector sub(const RatVector& x, const RatVector& y) {
    if (x.size() != y.size()) throw ContractError("sub: length mismatch");
    RatVector r(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) r[i] = x[i] - y[i];
    return r;
}

inline RatVector add(const RatVector& x, const RatVector& y) {
    if (x.size() != y.size()) throw ContractError("add: length mismatch");
    RatVector r(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) r[i] = x[i] + y[i];
    return r;
}

inline RatVector scale(const Rat& c, const RatVector& x) {
    RatVector r(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) r[i] = c * x[i];
    return r;
}

inline bool is_zero(const RatVector& x) {
    for (const auto& v : x)
        if (v != 0) return false;
    return true;
}

inline bool is_integral(const RatVector& x) {
    for (const auto& v : x)
        if (den(v) != 1) return false;
    return true;
}

inline RatVector to_rat(const IntVector& v) {
    RatVector r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) r[i] = Rat(v[i]);
    return r;
}

// Unnormalized Gram-Schmidt. Output spans the same flags, pairwise orthogonal.
// Rejects linearly dependent input.
inline std::vector<RatVector> gram_schmidt(const std::vector<RatVector>& vs) {
    std::vector<RatVector> out;
    std::vector<Rat> norms;
    out.reserve(vs.size());
    for (const auto& v : vs) {
        RatVector w = v;
        for (std::size_t j = 0; j < out.size(); ++j) {
            Rat mu = dot(w, out[j]) / norms[j];
            w = sub(w, scale(mu, out[j]));
        }
        Rat n2 = norm2(w);
        if (n2 == 0) throw ContractError("gram_schmidt: linearly dependent input");
        out.push_back(std::move(w));
        norms.push_back(n2);
    }
    return out;
}

// Orthogonal projection of x onto span(basis); basis need not be orthogonal
// but must be independent.
inline RatVector project_onto_span(const std::vector<RatVector>& basis, const RatVector& x) {
    if (basis.empty()) return RatVector(x.size(), Rat(0));
    auto ortho = gram_schmidt(basis);
    RatVector p(x.size(), Rat(0));
    for (const auto& g : ortho) p = add(p, scale(dot(x, g) / norm2(g), g));
    return p;
}

// Solve A x = b over Q by Gaussian elimination. Returns nullopt when
// inconsistent; free variables are set to zero.
inline std::optional<RatVector> solve_rational(const RatMatrix& A, const RatVector& b) {
    std::size_t m = A.rows, n = A.cols;
    if (b.size() != m) throw ContractError("solve_rational: shape mismatch");
    RatMatrix w(m, n + 1);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) w.at(i, j) = A.at(i, j);
        w.at(i, n) = b[i];
    }
    std::vector<std::size_t> pivot_col;
    std::size_t r = 0;
    for (std::size_t c = 0; c < n && r < m; ++c) {
        std::size_t p = r;
        while (p < m && w.at(p, c) == 0) ++p;
        if (p == m) continue;
        for (std::size_t j = 0; j <= n; ++j) std::swap(w.at(r, j), w.at(p, j));
        Rat inv = Rat(1) / w.at(r, c);
        for (std::size_t j = c; j <= n; ++j) w.at(r, j) *= inv;
        for (std::size_t i = 0; i < m; ++i) {
            if (i == r || w.at(i, c) == 0) continue;
            Rat f = w.at(i, c);
            for (std::size_t j = c; j <= n; ++j) w.at(i, j) -= f * w.at(r, j);
        }
        pivot_col.push_back(c);
        ++r;
    }
    for (std::size_t i = r; i < m; ++i)
        if (w.at(i, n) != 0) return std::nullopt;
    RatVector x(n, Rat(0));
    for (std::size_t i = 0; i < r; ++i) x[pivot_col[i]] = w.at(i, n);
    return x;
}

inline std::optional<RatMatrix> inverse(const RatMatrix& A) {
    if (A.rows != A.cols) throw ContractError("inverse: square matrix required");
    std::size_t n = A.rows;
    RatMatrix w(n, 2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) w.at(i, j) = A.at(i, j);
        w.at(i, n + i) = 1;
    }
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        while (p < n && w.at(p, c) == 0) ++p;
        if (p == n) return std::nullopt;
        if (p != c)
            for (std::size_t j = 0; j < 2 * n; ++j) std::swap(w.at(c, j), w.at(p, j));
        Rat inv = Rat(1) / w.at(c, c);
        for (std::size_t j = c; j < 2 * n; ++j) w.at(c, j) *= inv;
        for (std::size_t i = 0; i < n; ++i) {
            if (i == c || w.at(i, c) == 0) continue;
            Rat f = w.at(i, c);
            for (std::size_t j = c; j < 2 * n; ++j) w.at(i, j) -= f * w.at(c, j);
        }
    }
    RatMatrix inv(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) inv.at(i, j) = w.at(i, n + j);
    return inv;
}

inline std::size_t rank(const RatMatrix& A) {
    RatMatrix w = A;
    std::size_t m = A.rows, n = A.cols, r = 0;
    for (std::size_t c = 0; c < n && r < m; ++c) {
        std::size_t p = r;
        while (p < m && w.at(p, c) == 0) ++p;
        if (p == m) continue;
        for (std::size_t j = 0; j < n; ++j) std::swap(w.at(r, j), w.at(p, j));
        for (std::size_t i = r + 1; i < m; ++i) {
            if (w.at(i, c) == 0) continue;
            Rat f = w.at(i, c) / w.at(r, c);
            for (std::size_t j = c; j < n; ++j) w.at(i, j) -= f * w.at(r, j);
        }
        ++r;
    }
    return r;
}

inline std::size_t rank(const IntMatrix& A) { return rank(RatMatrix(A)); }

}  // namespace torusdist
