#pragma once

// Exact scalar layer: big integers, canonical rationals, Gaussian rationals,
// and certified values (rational midpoint + rational absolute error bound).

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace torusdist {

using Int = mpz_class;
using Rat = mpq_class;

struct ContractError : std::runtime_error {
    explicit ContractError(const std::string& what) : std::runtime_error(what) {}
};

struct DimensionGuardError : std::runtime_error {
    explicit DimensionGuardError(const std::string& what) : std::runtime_error(what) {}
};

// Canonical rational: reduced, positive denominator.
inline Rat make_rat(const Int& num, const Int& den) {
    if (den == 0) throw ContractError("make_rat: zero denominator");
    Rat q(num, den);
    q.canonicalize();
    return q;
}

inline Rat rat_of(long n) { return Rat(n); }

inline const Int& num(const Rat& q) { return q.get_num(); }
inline const Int& den(const Rat& q) { return q.get_den(); }

inline size_t bit_length(const Int& z) { return mpz_sizeinbase(z.get_mpz_t(), 2); }

inline Int floor_div(const Int& a, const Int& b) {
    Int q;
    mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return q;
}

inline Int rat_floor(const Rat& q) { return floor_div(num(q), den(q)); }

inline Int rat_ceil(const Rat& q) {
    Int c;
    mpz_cdiv_q(c.get_mpz_t(), num(q).get_mpz_t(), den(q).get_mpz_t());
    return c;
}

// Nearest integer, ties toward +infinity. Deterministic.
inline Int rat_round(const Rat& q) { return rat_floor(q + Rat(1, 2)); }

inline Rat rat_abs(const Rat& q) { return q < 0 ? Rat(-q) : q; }

// Distance of a rational to the nearest integer, and its square.
inline Rat dist_to_Z(const Rat& q) { return rat_abs(q - Rat(rat_round(q))); }

inline Int isqrt_floor(const Int& z) {
    if (z < 0) throw ContractError("isqrt_floor: negative argument");
    Int r;
    mpz_sqrt(r.get_mpz_t(), z.get_mpz_t());
    return r;
}

inline bool is_perfect_square(const Int& z) {
    return z >= 0 && mpz_perfect_square_p(z.get_mpz_t()) != 0;
}

// Rational bracket of sqrt(x): lo <= sqrt(x) <= hi and hi - lo <= lo * 2^-prec_bits
// (for x > 0). x must be >= 0.
inline void sqrt_bracket(const Rat& x, long prec_bits, Rat& lo, Rat& hi) {
    if (x < 0) throw ContractError("sqrt_bracket: negative argument");
    if (x == 0) { lo = 0; hi = 0; return; }
    Int p = num(x), q = den(x);
    Int pq = p * q;
    long have = static_cast<long>(bit_length(pq));
    long k = 0;
    if (have < 2 * prec_bits + 2) k = (2 * prec_bits + 2 - have + 1) / 2;
    Int scaled = pq << static_cast<unsigned long>(2 * k);
    Int s = isqrt_floor(scaled);
    Int d = q << static_cast<unsigned long>(k);
    lo = make_rat(s, d);
    hi = make_rat(s + 1, d);
}

inline Rat sqrt_upper(const Rat& x, long prec_bits = 32) {
    Rat lo, hi;
    sqrt_bracket(x, prec_bits, lo, hi);
    return hi;
}

inline Rat sqrt_lower(const Rat& x, long prec_bits = 32) {
    Rat lo, hi;
    sqrt_bracket(x, prec_bits, lo, hi);
    return lo;
}

// Round a rational to denominator 2^bits; |result - q| <= 2^-bits.
inline Rat dyadic_round(const Rat& q, long bits) {
    Int scaled = rat_round(q * Rat(Int(1) << static_cast<unsigned long>(bits)));
    return make_rat(scaled, Int(1) << static_cast<unsigned long>(bits));
}

inline Rat pow2(long e) {
    if (e >= 0) return Rat(Int(1) << static_cast<unsigned long>(e));
    return make_rat(1, Int(1) << static_cast<unsigned long>(-e));
}

struct GaussianRational {
    Rat re, im;

    GaussianRational() : re(0), im(0) {}
    GaussianRational(Rat r, Rat i) : re(std::move(r)), im(std::move(i)) {}
    explicit GaussianRational(long r) : re(r), im(0) {}

    bool is_zero() const { return re == 0 && im == 0; }
    bool is_real() const { return im == 0; }

    GaussianRational conj() const { return {re, -im}; }
    Rat norm2() const { return re * re + im * im; }

    friend GaussianRational operator+(const GaussianRational& a, const GaussianRational& b) {
        return {a.re + b.re, a.im + b.im};
    }
    friend GaussianRational operator-(const GaussianRational& a, const GaussianRational& b) {
        return {a.re - b.re, a.im - b.im};
    }
    friend GaussianRational operator-(const GaussianRational& a) { return {-a.re, -a.im}; }
    friend GaussianRational operator*(const GaussianRational& a, const GaussianRational& b) {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
    friend GaussianRational operator/(const GaussianRational& a, const GaussianRational& b) {
        if (b.is_zero()) throw ContractError("GaussianRational: division by zero");
        Rat n2 = b.norm2();
        GaussianRational c = a * b.conj();
        return {c.re / n2, c.im / n2};
    }
    friend bool operator==(const GaussianRational& a, const GaussianRational& b) {
        return a.re == b.re && a.im == b.im;
    }
    friend bool operator!=(const GaussianRational& a, const GaussianRational& b) { return !(a == b); }
};

inline GaussianRational gpow(const GaussianRational& base, const Int& e) {
    if (e == 0) return GaussianRational(1);
    GaussianRational b = base;
    Int k = e;
    if (k < 0) {
        b = GaussianRational(1) / b;
        k = -k;
    }
    GaussianRational acc(1);
    // left-to-right binary powering
    long nbits = static_cast<long>(bit_length(k));
    for (long i = nbits - 1; i >= 0; --i) {
        acc = acc * acc;
        if (mpz_tstbit(k.get_mpz_t(), static_cast<unsigned long>(i))) acc = acc * b;
    }
    return acc;
}

// A rational value with a rational absolute error bound: the represented real x
// satisfies |x - value| <= err.
struct Certified {
    Rat value;
    Rat err;

    Certified() : value(0), err(0) {}
    explicit Certified(Rat v) : value(std::move(v)), err(0) {}
    Certified(Rat v, Rat e) : value(std::move(v)), err(std::move(e)) {
        if (err < 0) throw ContractError("Certified: negative error bound");
    }

    Rat lo() const { return value - err; }
    Rat hi() const { return value + err; }
    bool exact() const { return err == 0; }

    // |x| <= abs_hi(), |x| >= abs_lo()
    Rat abs_hi() const { return rat_abs(value) + err; }
    Rat abs_lo() const {
        Rat a = rat_abs(value) - err;
        return a < 0 ? Rat(0) : a;
    }

    friend Certified operator+(const Certified& a, const Certified& b) {
        return {a.value + b.value, a.err + b.err};
    }
    friend Certified operator-(const Certified& a, const Certified& b) {
        return {a.value - b.value, a.err + b.err};
    }
    friend Certified operator-(const Certified& a) { return {-a.value, a.err}; }
    friend Certified operator*(const Certified& a, const Certified& b) {
        Rat e = rat_abs(a.value) * b.err + rat_abs(b.value) * a.err + a.err * b.err;
        return {a.value * b.value, e};
    }
    friend Certified operator*(const Rat& c, const Certified& a) {
        return {c * a.value, rat_abs(c) * a.err};
    }

    // Requires the interval to be bounded away from zero.
    Certified inverse() const {
        Rat lo_abs = abs_lo();
        if (lo_abs == 0) throw ContractError("Certified::inverse: interval contains zero");
        // |1/x - 1/v| = |x-v| / |xv| <= err / (|v| * lo_abs)
        return {Rat(1) / value, err / (rat_abs(value) * lo_abs)};
    }

    friend Certified operator/(const Certified& a, const Certified& b) { return a * b.inverse(); }

    // Shrink the midpoint's representation; absorbs the rounding into err.
    Certified compressed(long bits) const {
        Rat v = dyadic_round(value, bits);
        return {v, err + rat_abs(v - value) + pow2(-bits)};
    }
};

// Certified sqrt of a certified nonnegative value.
inline Certified sqrt_cert(const Certified& x, long prec_bits = 64) {
    Rat l = x.lo();
    if (l < 0) l = 0;
    Rat h = x.hi();
    if (h < 0) throw ContractError("sqrt_cert: negative value");
    Rat llo, lhi, hlo, hhi;
    sqrt_bracket(l, prec_bits, llo, lhi);
    sqrt_bracket(h, prec_bits, hlo, hhi);
    Rat mid = (llo + hhi) / 2;
    return {mid, hhi - mid};
}

struct CertifiedComplex {
    Certified re, im;

    CertifiedComplex() = default;
    CertifiedComplex(Certified r, Certified i) : re(std::move(r)), im(std::move(i)) {}

    bool exact() const { return re.exact() && im.exact(); }
    GaussianRational midpoint() const { return {re.value, im.value}; }
    // bound on the complex modulus of the error
    Rat err_bound(long prec_bits = 32) const {
        return sqrt_upper(re.err * re.err + im.err * im.err, prec_bits);
    }
};

// Deterministic, seedable RNG for reproducible randomized tests.
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform in [lo, hi]
    long uniform(long lo, long hi) {
        return lo + static_cast<long>(next() % static_cast<std::uint64_t>(hi - lo + 1));
    }

    Rat rat(long num_lo, long num_hi, long den_hi) {
        long d = uniform(1, den_hi);
        return make_rat(Int(uniform(num_lo, num_hi)), Int(d));
    }
};

}  // namespace torusdist
