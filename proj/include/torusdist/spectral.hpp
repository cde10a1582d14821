#pragma once

// Certified spectral bounds for integer matrices: exact characteristic
// polynomials, Sturm root counting, eigenvalue brackets, and the singular-value
// bounds lo = n^-(n-1) ||H||max^-(n-1), hi = n ||H||max together with a
// 2-approximation of sigma_min.

#include <vector>

#include "torusdist/linalg.hpp"
#include "torusdist/normal_form.hpp"

namespace torusdist {

// Polynomials over Q, coefficient vector by ascending degree.
using RatPoly = std::vector<Rat>;

inline void poly_trim(RatPoly& p) {
    while (!p.empty() && p.back() == 0) p.pop_back();
}

inline int poly_degree(const RatPoly& p) { return static_cast<int>(p.size()) - 1; }

inline Rat poly_eval(const RatPoly& p, const Rat& x) {
    Rat v = 0;
    for (std::size_t i = p.size(); i-- > 0;) v = v * x + p[i];
    return v;
}

inline RatPoly poly_derivative(const RatPoly& p) {
    RatPoly d;
    for (std::size_t i = 1; i < p.size(); ++i) d.push_back(Rat(static_cast<long>(i)) * p[i]);
    return d;
}

// Remainder of polynomial division.
inline RatPoly poly_rem(RatPoly a, const RatPoly& b) {
    poly_trim(a);
    if (b.empty()) throw ContractError("poly_rem: division by zero polynomial");
    while (poly_degree(a) >= poly_degree(b)) {
        Rat f = a.back() / b.back();
        std::size_t shift = a.size() - b.size();
        for (std::size_t i = 0; i < b.size(); ++i) a[i + shift] -= f * b[i];
        poly_trim(a);
        if (a.empty()) break;
    }
    return a;
}

inline RatPoly poly_gcd(RatPoly a, RatPoly b) {
    poly_trim(a);
    poly_trim(b);
    while (!b.empty()) {
        RatPoly r = poly_rem(a, b);
        a = std::move(b);
        b = std::move(r);
    }
    if (!a.empty()) {
        Rat lead = a.back();
        for (auto& c : a) c /= lead;
    }
    return a;
}

inline RatPoly poly_divide_exact(RatPoly a, const RatPoly& b) {
    poly_trim(a);
    RatPoly q(a.size() > b.size() ? a.size() - b.size() + 1 : 1, Rat(0));
    while (poly_degree(a) >= poly_degree(b) && !a.empty()) {
        Rat f = a.back() / b.back();
        std::size_t shift = a.size() - b.size();
        q[shift] = f;
        for (std::size_t i = 0; i < b.size(); ++i) a[i + shift] -= f * b[i];
        poly_trim(a);
    }
    poly_trim(q);
    return q;
}

inline RatPoly squarefree_part(const RatPoly& p) {
    RatPoly g = poly_gcd(p, poly_derivative(p));
    if (poly_degree(g) <= 0) return p;
    return poly_divide_exact(p, g);
}

// Characteristic polynomial det(lambda I - A) by Faddeev-LeVerrier.
// For integer A the coefficients are integers (kept as rationals).
inline RatPoly char_poly(const RatMatrix& A) {
    if (A.rows != A.cols) throw ContractError("char_poly: square matrix required");
    std::size_t n = A.rows;
    RatPoly c(n + 1, Rat(0));
    c[n] = 1;
    RatMatrix Mk(n, n);  // zero
    for (std::size_t k = 1; k <= n; ++k) {
        // M_k = A * M_{k-1} + c_{n-k+1} I
        RatMatrix t = (k == 1) ? RatMatrix::identity(n) : mul(A, Mk);
        if (k > 1)
            for (std::size_t i = 0; i < n; ++i) t.at(i, i) += c[n - k + 1];
        Mk = std::move(t);
        RatMatrix AM = mul(A, Mk);
        Rat tr = 0;
        for (std::size_t i = 0; i < n; ++i) tr += AM.at(i, i);
        c[n - k] = -tr / Rat(static_cast<long>(k));
    }
    return c;
}

inline RatPoly char_poly(const IntMatrix& A) { return char_poly(RatMatrix(A)); }

// Sturm chain of a squarefree polynomial.
inline std::vector<RatPoly> sturm_chain(const RatPoly& p) {
    std::vector<RatPoly> chain;
    RatPoly a = p;
    poly_trim(a);
    if (a.empty()) return chain;
    chain.push_back(a);
    RatPoly b = poly_derivative(a);
    poly_trim(b);
    while (!b.empty()) {
        chain.push_back(b);
        RatPoly r = poly_rem(chain[chain.size() - 2], b);
        for (auto& c : r) c = -c;
        b = std::move(r);
    }
    return chain;
}

inline int sign_of(const Rat& x) { return x > 0 ? 1 : (x < 0 ? -1 : 0); }

inline int sturm_variations(const std::vector<RatPoly>& chain, const Rat& x) {
    int count = 0, prev = 0;
    for (const auto& p : chain) {
        int s = sign_of(poly_eval(p, x));
        if (s == 0) continue;
        if (prev != 0 && s != prev) ++count;
        prev = s;
    }
    return count;
}

// Number of distinct real roots of the squarefree p in (a, b].
inline int count_roots_in(const std::vector<RatPoly>& chain, const Rat& a, const Rat& b) {
    return sturm_variations(chain, a) - sturm_variations(chain, b);
}

struct EigenBracket {
    Rat lo, hi;  // lo <= lambda <= hi
};

// Bracket the smallest (or largest) real root of the squarefree polynomial p in
// (0, bound]; shrinks until hi <= ratio_num/ratio_den * lo or hi - lo <= abs_tol.
// Requires at least one root in (0, bound].
inline EigenBracket bracket_extreme_root(const RatPoly& squarefree, const Rat& bound, bool smallest,
                                         const Rat& ratio, const Rat& abs_tol) {
    auto chain = sturm_chain(squarefree);
    int total = count_roots_in(chain, Rat(0), bound);
    if (total < 1) throw ContractError("bracket_extreme_root: no root in range");
    Rat lo = 0, hi = bound;
    // invariant for smallest: root count in (lo, mid] >= 1 keeps the extreme root;
    // for largest: count in (mid, hi] >= 1.
    while (true) {
        if (lo > 0 && hi <= ratio * lo) break;
        if (hi - lo <= abs_tol) break;
        Rat mid = (lo + hi) / 2;
        if (smallest) {
            if (count_roots_in(chain, lo, mid) >= 1)
                hi = mid;
            else
                lo = mid;
        } else {
            if (count_roots_in(chain, mid, hi) >= 1)
                lo = mid;
            else
                hi = mid;
        }
    }
    return {lo, hi};
}

// Certified brackets of the extreme eigenvalues of the positive definite
// matrix A = H H^T, via exact char poly + Sturm bisection.
struct SpectrumBrackets {
    EigenBracket lambda_min;  // of H H^T
    EigenBracket lambda_max;
    RatPoly char_sf;  // squarefree characteristic polynomial of H H^T
};

inline SpectrumBrackets gram_spectrum_brackets(const IntMatrix& H, const Rat& ratio = Rat(2),
                                               const Rat& abs_tol = Rat(0)) {
    IntMatrix G = H * H.transpose();
    RatPoly p = char_poly(G);
    RatPoly sf = squarefree_part(p);
    // upper bound on lambda_max: (n ||H||max)^2
    Rat ub = Rat(Int(H.cols) * H.max_abs());
    ub = ub * ub;
    if (ub == 0) throw ContractError("gram_spectrum_brackets: zero matrix");
    SpectrumBrackets out;
    out.char_sf = sf;
    out.lambda_min = bracket_extreme_root(sf, ub, true, ratio, abs_tol);
    out.lambda_max = bracket_extreme_root(sf, ub, false, ratio, abs_tol);
    return out;
}

struct SigmaBounds {
    Rat lo;  // lo <= sigma_min(H)
    Rat hi;  // sigma_max(H) <= hi
};

// lo = n^-(n-1) ||H||max^-(n-1), hi = n ||H||max. Requires full row rank.
inline SigmaBounds sigma_bounds(const IntMatrix& H) {
    std::size_t k = H.rows, n = H.cols;
    if (k > n) throw ContractError("sigma_bounds: more rows than columns");
    if (rank(H) != k) throw ContractError("sigma_bounds: rank-deficient input");
    Int hmax = H.max_abs();
    Int base = Int(n) * hmax;
    Int pw;
    mpz_pow_ui(pw.get_mpz_t(), base.get_mpz_t(), static_cast<unsigned long>(n - 1));
    return {make_rat(1, pw), Rat(base)};
}

struct SigmaMinApprox {
    Rat D;              // sigma_min <= D <= 2 sigma_min
    EigenBracket lmin;  // bracket of lambda_min(H H^T) with hi <= 2 lo
};

// 2-approximation of sigma_min(H): bracket lambda_min(H H^T) to ratio <= 2 by
// exact bisection, then D = upward-rounded sqrt of the bracket top b.
// D^2 in [b, b(1 + 2^-15)] subset of [lambda_min, 2.01 lambda_min], hence
// sigma_min <= D <= 2 sigma_min.
inline SigmaMinApprox sigma_min_2approx(const IntMatrix& H) {
    std::size_t k = H.rows, n = H.cols;
    if (k > n) throw ContractError("sigma_min_2approx: more rows than columns");
    if (rank(H) != k) throw ContractError("sigma_min_2approx: rank-deficient input");
    auto br = gram_spectrum_brackets(H, Rat(2)).lambda_min;
    Rat D = sqrt_upper(br.hi, 16);
    return {D, br};
}

}  // namespace torusdist
