#pragma once

// Certified evaluation of log, exp, pi and circular functions over exact
// rationals. Everything runs in dyadic fixed point (mantissa * 2^-W) with
// directed rounding; each primitive returns a Certified value whose err field
// is a proven absolute bound (series tail + per-operation rounding, counted in
// units of 2^-W).

#include <map>
#include <mutex>

#include "torusdist/numeric.hpp"

namespace torusdist {
namespace fx {

// Fixed-point helpers at working precision W: value = mant * 2^-W.
inline Int from_rat(const Rat& q, long W) {  // |result*2^-W - q| <= 2^-W
    return rat_round(q * pow2(W));
}

inline Int mul(const Int& a, const Int& b, long W) {  // error <= 1 ulp, rounded toward zero
    Int p = a * b;
    Int q;
    mpz_tdiv_q_2exp(q.get_mpz_t(), p.get_mpz_t(), static_cast<unsigned long>(W));
    return q;
}

inline Int div_int(const Int& a, long d) {  // error <= 1 ulp
    Int q;
    Int dd(d);
    mpz_tdiv_q(q.get_mpz_t(), a.get_mpz_t(), dd.get_mpz_t());
    return q;
}

inline Rat to_rat(const Int& mant, long W) { return make_rat(mant, Int(1) << static_cast<unsigned long>(W)); }

}  // namespace fx

// atanh(1/q) = sum_{j>=0} q^-(2j+1) / (2j+1) for integer q >= 2, with
// truncation tail < q^-(2K+1) / (1 - q^-2) and <= 2 ulps rounding per term.
inline Certified atanh_inv_int(long q, long W) {
    Int qq(q);
    Int q2 = qq * qq;
    Int term = (Int(1) << static_cast<unsigned long>(W)) / qq;  // q^-1
    Int acc = 0;
    long terms = 0;
    long j = 0;
    while (term != 0) {
        acc += fx::div_int(term, 2 * j + 1);
        term /= q2;
        ++j;
        ++terms;
        if (terms > 4 * W) break;  // unreachable; loop is bounded by term underflow
    }
    // rounding: <= 2 ulps per term (power chain + odd division), tail < 2 ulps once term == 0
    Rat err = Rat(2 * terms + 4) * pow2(-W);
    return {fx::to_rat(acc, W), err};
}

// arctan(1/q) for integer q >= 2, alternating series; tail bounded by the
// first omitted term.
inline Certified atan_inv_int(long q, long W) {
    Int qq(q);
    Int q2 = qq * qq;
    Int term = (Int(1) << static_cast<unsigned long>(W)) / qq;
    Int acc = 0;
    long terms = 0;
    long j = 0;
    int sign = 1;
    while (term != 0) {
        Int t = fx::div_int(term, 2 * j + 1);
        acc += sign > 0 ? t : Int(-t);
        sign = -sign;
        term /= q2;
        ++j;
        ++terms;
    }
    Rat err = Rat(2 * terms + 4) * pow2(-W);
    return {fx::to_rat(acc, W), err};
}

namespace detail {

// Memo for per-precision constants; last-writer-wins at higher precision.
struct ConstCache {
    std::mutex mu;
    std::map<long, Certified> pi, log2, atan_half, atan_quarter, atan_eighth;
};

inline ConstCache& const_cache() {
    static ConstCache c;
    return c;
}

template <typename F>
Certified memoized(std::map<long, Certified>& m, long W, F&& compute) {
    auto& cache = const_cache();
    {
        std::lock_guard<std::mutex> lk(cache.mu);
        auto it = m.lower_bound(W);
        if (it != m.end()) return it->second;
    }
    Certified v = compute();
    std::lock_guard<std::mutex> lk(cache.mu);
    m[W] = v;
    return v;
}

}  // namespace detail

// pi with absolute error <= 2^-(W-8), via Machin: pi = 16 atan(1/5) - 4 atan(1/239).
inline Certified pi_const(long prec_bits) {
    long W = prec_bits + 16;
    return detail::memoized(detail::const_cache().pi, W, [&] {
        Certified a = atan_inv_int(5, W);
        Certified b = atan_inv_int(239, W);
        return Rat(16) * a - Rat(4) * b;
    });
}

// log 2 = 2 atanh(1/3), absolute error <= 2^-(W-6).
inline Certified log2_const(long prec_bits) {
    long W = prec_bits + 12;
    return detail::memoized(detail::const_cache().log2, W, [&] { return Rat(2) * atanh_inv_int(3, W); });
}

// log of a positive rational with absolute error <= 2^-prec_bits.
// Reduction: x = 2^e * m with m in [3/4, 3/2), then log m = 2 atanh(z),
// z = (m-1)/(m+1) in [-1/7, 1/5].
inline Certified log_rat(const Rat& x, long prec_bits) {
    if (x <= 0) throw ContractError("log_rat: nonpositive argument");
    if (x == 1) return Certified(Rat(0));
    long W = prec_bits + 32;
    // e = floor(log2 x) from bit lengths, then adjust into [3/4, 3/2)
    long e = static_cast<long>(bit_length(num(x))) - static_cast<long>(bit_length(den(x)));
    Rat m = x * pow2(-e);
    while (m >= Rat(3, 2)) {
        m /= 2;
        ++e;
    }
    while (m < Rat(3, 4)) {
        m *= 2;
        --e;
    }
    Rat z = (m - 1) / (m + 1);  // |z| <= 1/5
    Int zf = fx::from_rat(z, W);
    Int z2 = fx::mul(zf, zf, W);
    Int term = zf;
    Int acc = 0;
    long j = 0;
    long terms = 0;
    while (term != 0) {
        acc += fx::div_int(term, 2 * j + 1);
        term = fx::mul(term, z2, W);
        if (term == 0) break;
        ++j;
        ++terms;
        if (terms > 2 * W) break;
    }
    // d atanh/dz <= 1/(1-z^2) <= 25/24 amplifies the 1-ulp input rounding.
    Certified atanh_z(fx::to_rat(acc, W), Rat(3 * terms + 8) * pow2(-W));
    Certified res = Rat(2) * atanh_z;
    if (e != 0) {
        long ebits = static_cast<long>(bit_length(Int(e < 0 ? -e : e)));
        res = res + Rat(e) * log2_const(prec_bits + 16 + ebits);
    }
    if (res.err > pow2(-prec_bits)) throw ContractError("log_rat: internal error budget exceeded");
    return res;
}

// exp of a rational with absolute error <= 2^-prec_bits * e^x (relative 2^-prec_bits).
// Returned as Certified on the value itself (absolute err field).
inline Certified exp_rat(const Rat& x, long prec_bits) {
    if (x == 0) return Certified(Rat(1));
    long W = prec_bits + 48;
    // k = round(x / log 2); r = x - k log2 in roughly [-0.37, 0.37]
    Certified l2 = log2_const(64);
    Int k = rat_round(x / l2.value);
    Certified l2w = log2_const(W - 8);
    Certified r = Certified(x) - Rat(k) * l2w;  // |r| <= 0.37 + tiny
    if (rat_abs(r.value) > Rat(2, 5)) throw ContractError("exp_rat: range reduction failed");
    Int rf = fx::from_rat(r.value, W);
    Int term = Int(1) << static_cast<unsigned long>(W);
    Int acc = term;
    long j = 1;
    long terms = 0;
    while (term != 0) {
        term = fx::mul(term, rf, W);
        term = fx::div_int(term, j);
        if (term == 0) break;
        acc += term;
        ++j;
        ++terms;
        if (terms > 2 * W) break;
    }
    // |exp(r.value) - acc| <= (2 terms + 4) ulps (ratio-bounded tail + rounding);
    // exp(r) vs exp(r.value): factor e^{r.err} - 1 <= 2 r.err for small err.
    Rat series_err = Rat(2 * terms + 8) * pow2(-W);
    Rat val = fx::to_rat(acc, W);
    Rat rel_in = Rat(2) * r.err;
    Rat err = series_err + (val + series_err) * rel_in;
    Certified er(val, err);
    // scale by 2^k exactly
    long ke = static_cast<long>(k.get_si());
    Certified out(er.value * pow2(ke), er.err * pow2(ke));
    if (out.err > pow2(-prec_bits) * out.abs_hi()) throw ContractError("exp_rat: error budget exceeded");
    return out;
}

namespace detail {

inline Certified atan_table(long which, long prec_bits) {
    long W = prec_bits + 16;
    auto& c = const_cache();
    switch (which) {
        case 2:
            return memoized(c.atan_half, W, [&] { return atan_inv_int(2, W); });
        case 4:
            return memoized(c.atan_quarter, W, [&] { return atan_inv_int(4, W); });
        default:
            return memoized(c.atan_eighth, W, [&] { return atan_inv_int(8, W); });
    }
}

// arctan(t) for rational t in [0, 1], absolute error <= 2^-prec_bits.
inline Certified atan_rat01(Rat t, long prec_bits) {
    if (t < 0 || t > 1) throw ContractError("atan_rat01: argument out of range");
    long W = prec_bits + 40;
    Certified angle(Rat(0));
    // peel table angles with rational tangents until t <= 1/8
    for (int guard = 0; guard < 8 && t > Rat(1, 8); ++guard) {
        long q = t >= Rat(1, 2) ? 2 : (t >= Rat(1, 4) ? 4 : 8);
        Rat u = make_rat(1, q);
        angle = angle + atan_table(q, prec_bits + 8);
        t = (t - u) / (1 + t * u);  // tan subtraction; stays in [0, 1)
    }
    // series on the residual, |t| <= 1/8
    Int tf = fx::from_rat(t, W);
    Int t2 = fx::mul(tf, tf, W);
    Int term = tf;
    Int acc = 0;
    long j = 0;
    long terms = 0;
    int sign = 1;
    while (term != 0) {
        Int c = fx::div_int(term, 2 * j + 1);
        acc += sign > 0 ? c : Int(-c);
        sign = -sign;
        term = fx::mul(term, t2, W);
        ++j;
        ++terms;
        if (terms > 2 * W) break;
    }
    Certified res(fx::to_rat(acc, W), Rat(3 * terms + 8) * pow2(-W));
    return angle + res;
}

}  // namespace detail

// Principal argument of the nonzero Gaussian rational v, in radians,
// with absolute error <= 2^-prec_bits. Exact for axis points (0, pi/2, pi, -pi/2
// are returned as exact multiples of the certified pi).
struct CertifiedAngle {
    // angle = quarter_turns * (pi/2) + residual, residual certified in radians.
    long quarter_turns;  // in {-2,-1,0,1,2}
    Certified residual;
    bool axis_exact;  // true when the angle is exactly quarter_turns * pi/2
};

inline CertifiedAngle arg_gauss(const GaussianRational& v, long prec_bits) {
    if (v.is_zero()) throw ContractError("arg_gauss: zero has no argument");
    const Rat &a = v.re, &b = v.im;
    if (b == 0) return {a > 0 ? 0 : 2, Certified(Rat(0)), true};
    if (a == 0) return {b > 0 ? 1 : -1, Certified(Rat(0)), true};
    // first octant reduction: theta = s * (atan(t) + shift), t in (0, 1]
    Rat aa = rat_abs(a), ab = rat_abs(b);
    Rat t = aa >= ab ? ab / aa : aa / ab;
    Certified base = detail::atan_rat01(t, prec_bits + 4);
    long quarters = 0;
    Certified residual;
    bool swapped = aa < ab;
    // in the first quadrant: angle = atan(b/a) if |a| >= |b| else pi/2 - atan(a/b)
    if (!swapped)
        residual = base;
    else {
        quarters = 1;
        residual = -base;
    }
    // reflect into the correct quadrant
    if (a > 0 && b > 0) {
        // as computed
    } else if (a < 0 && b > 0) {
        quarters = 2 - quarters;
        residual = -residual;
    } else if (a < 0 && b < 0) {
        quarters = -2 + quarters;  // angle in (-pi, -pi/2)
    } else {  // a > 0, b < 0
        quarters = -quarters;
        residual = -residual;
    }
    return {quarters, residual, false};
}

// Angle of v as a fraction of a full turn in [0, 1), certified.
// Exact (err = 0) for v on the axes.
inline Certified arg_turns(const GaussianRational& v, long prec_bits) {
    CertifiedAngle ca = arg_gauss(v, prec_bits + 8);
    if (ca.axis_exact) {
        long q = ((ca.quarter_turns % 4) + 4) % 4;
        return Certified(make_rat(q, 4));
    }
    Certified pi = pi_const(prec_bits + static_cast<long>(bit_length(Int(8))) + 8);
    Certified turns = Certified(make_rat(ca.quarter_turns, 4)) + ca.residual * (Rat(1, 2) * pi.inverse());
    // normalize into [0,1): midpoint-based shift; err must be < 1/4 for this to be safe
    Rat shift = Rat(rat_floor(turns.value));
    Certified out(turns.value - shift, turns.err);
    if (out.value < 0) out.value += 1;
    if (out.value >= 1) out.value -= 1;
    return out;
}

// cos(2 pi theta) and sin(2 pi theta) for rational theta (in turns), certified
// to absolute error <= 2^-prec_bits. Exact on quarter turns.
inline CertifiedComplex expi_turns(const Rat& theta_in, long prec_bits) {
    Rat theta = theta_in - Rat(rat_floor(theta_in));  // [0,1)
    // exact quarter turns
    if (den(theta) <= 4) {
        Rat q4 = theta * 4;
        if (den(q4) == 1) {
            long k = static_cast<long>(num(q4).get_si());
            static const long cs[4] = {1, 0, -1, 0};
            static const long ss[4] = {0, 1, 0, -1};
            return {Certified(Rat(cs[k])), Certified(Rat(ss[k]))};
        }
    }
    long W = prec_bits + 48;
    // reduce to |phi| <= 1/8 turn around the nearest quarter
    Rat q4 = theta * 4;
    Int k = rat_round(q4);
    Rat phi_turns = theta - make_rat(k, 4);  // |phi_turns| <= 1/8
    long kq = static_cast<long>(((k.get_si() % 4) + 4) % 4);
    Certified pi = pi_const(W - 8);
    Certified x = (Rat(2) * phi_turns) * pi;  // radians, |x| <= pi/4
    Int xf = fx::from_rat(x.value, W);
    Int x2 = fx::mul(xf, xf, W);
    // cos series
    Int term = Int(1) << static_cast<unsigned long>(W);
    Int cacc = term;
    long terms = 0;
    for (long j = 1; term != 0 && terms < 2 * W; ++j, ++terms) {
        term = fx::mul(term, x2, W);
        term = fx::div_int(term, (2 * j - 1) * (2 * j));
        if (term == 0) break;
        cacc += (j % 2 == 1) ? Int(-term) : term;
    }
    // sin series
    term = xf;
    Int sacc = term;
    for (long j = 1; term != 0 && terms < 4 * W; ++j, ++terms) {
        term = fx::mul(term, x2, W);
        term = fx::div_int(term, (2 * j) * (2 * j + 1));
        if (term == 0) break;
        sacc += (j % 2 == 1) ? Int(-term) : term;
    }
    Rat rnd = Rat(4 * terms + 16) * pow2(-W);
    // |d cos| , |d sin| <= 1 amplification of the argument error
    Rat aerr = x.err + pow2(-W);
    Certified c(fx::to_rat(cacc, W), rnd + aerr);
    Certified s(fx::to_rat(sacc, W), rnd + aerr);
    // rotate by kq quarter turns: (c + i s) * i^kq
    switch (kq) {
        case 0: return {c, s};
        case 1: return {-s, c};
        case 2: return {-c, -s};
        default: return {s, -c};
    }
}

// e^{rho + 2 pi i theta} for rational rho, theta: certified complex with
// relative error <= 2^-prec_bits on each part's modulus bound.
inline CertifiedComplex exp_complex(const Rat& rho, const Rat& theta, long prec_bits) {
    CertifiedComplex circle = expi_turns(theta, prec_bits + 8);
    if (rho == 0) return circle;
    Certified radius = exp_rat(rho, prec_bits + 8);
    return {radius * circle.re, radius * circle.im};
}

// Exact |v|^2 and certified log|v| for a nonzero Gaussian rational.
inline Certified log_abs(const GaussianRational& v, long prec_bits) {
    if (v.is_zero()) throw ContractError("log_abs: zero argument");
    Rat n2 = v.norm2();
    if (n2 == 1) return Certified(Rat(0));
    return Rat(1, 2) * log_rat(n2, prec_bits + 2);
}

}  // namespace torusdist
