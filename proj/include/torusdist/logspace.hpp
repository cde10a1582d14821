#pragma once

// The quotient metric Delta on C^n / 2 pi i Z^n, certified componentwise
// Log / Exp on Gaussian rational vectors, orbit distances through the SLDP
// backends, and linear forms in logarithms.

#include "torusdist/lattice.hpp"
#include "torusdist/torus.hpp"

namespace torusdist {

using PiApprox = Certified;

inline PiApprox pi_approx(long prec_bits) { return pi_const(prec_bits); }

// Element of C^n / 2 pi i Z^n stored as rho + 2 pi i theta with theta in [0,1)^n.
// err bounds the Euclidean distance between the stored point and the real it
// approximates (0 when exact).
struct QuotientPoint {
    RatVector rho;
    RatVector theta;
    Rat err;

    QuotientPoint() : err(0) {}
    QuotientPoint(RatVector r, RatVector th, Rat e = Rat(0))
        : rho(std::move(r)), theta(std::move(th)), err(std::move(e)) {
        if (rho.size() != theta.size()) throw ContractError("QuotientPoint: shape mismatch");
        if (err < 0) throw ContractError("QuotientPoint: negative error bound");
        for (auto& t : theta) {
            t -= Rat(rat_floor(t));
            if (t < 0) t += 1;
        }
    }

    std::size_t n() const { return rho.size(); }

    static QuotientPoint zero(std::size_t n) {
        return QuotientPoint(RatVector(n, Rat(0)), RatVector(n, Rat(0)));
    }
};

// Per-component certified log data; thetas in turns.
struct LogComponents {
    std::vector<Certified> rho;
    std::vector<Certified> theta;
    bool all_exact;
};

inline LogComponents log_components(const GaussVector& v, long prec_bits) {
    LogComponents out;
    out.all_exact = true;
    for (const auto& c : v) {
        if (c.is_zero()) throw ContractError("log: zero component");
        Certified r = log_abs(c, prec_bits);
        Certified t = arg_turns(c, prec_bits);
        out.all_exact = out.all_exact && r.exact() && t.exact();
        out.rho.push_back(std::move(r));
        out.theta.push_back(std::move(t));
    }
    return out;
}

// Componentwise principal Log with ||(rho + 2 pi i theta) - Log v|| < eps.
inline QuotientPoint log_approx(const GaussVector& v, const Rat& eps) {
    if (eps <= 0) throw ContractError("log_approx: nonpositive accuracy");
    std::size_t n = v.size();
    long bits = 16;
    {
        Rat e = eps;
        while (e < 1) {
            e *= 2;
            ++bits;
        }
        long nn = static_cast<long>(n);
        while (nn > 0) {  // headroom for the 2 pi scaling and the n-fold sum
            nn >>= 1;
            bits += 2;
        }
    }
    for (int attempt = 0;; ++attempt) {
        LogComponents lc = log_components(v, bits);
        RatVector rho(n), theta(n);
        Rat err2 = 0;
        const Rat seven(7);  // |2 pi| < 7
        for (std::size_t i = 0; i < n; ++i) {
            rho[i] = lc.rho[i].value;
            theta[i] = lc.theta[i].value;
            Rat comp = lc.rho[i].err + seven * lc.theta[i].err;
            err2 += comp * comp;
        }
        Rat err = lc.all_exact ? Rat(0) : sqrt_upper(err2, 16);
        if (err < eps) return QuotientPoint(std::move(rho), std::move(theta), err);
        bits *= 2;
        if (attempt > 32) throw ContractError("log_approx: accuracy escalation failed");
    }
}

// Componentwise Exp of the stored point, relative error < eps on the vector norm.
inline GaussVector exp_approx(const QuotientPoint& p, const Rat& eps) {
    if (eps <= 0) throw ContractError("exp_approx: nonpositive accuracy");
    long bits = 8;
    {
        Rat e = eps;
        while (e < 1) {
            e *= 2;
            ++bits;
        }
        bits += 8;
    }
    GaussVector out(p.n());
    for (std::size_t j = 0; j < p.n(); ++j) {
        for (int attempt = 0;; ++attempt) {
            CertifiedComplex c = exp_complex(p.rho[j], p.theta[j], bits + 8 * attempt);
            Rat err = c.err_bound();
            Rat mod_lo = sqrt_lower(c.midpoint().norm2(), 16) - err;
            if (mod_lo > 0 && err * 2 <= eps * mod_lo) {
                out[j] = c.midpoint();
                break;
            }
            if (attempt > 64) throw ContractError("exp_approx: accuracy escalation failed");
        }
    }
    return out;
}

// Exact squared pieces of Delta^2 = a + 4 pi^2 s for rational quotient points.
struct DeltaParts {
    Rat a;  // ||rho - tau||^2
    Rat s;  // dist^2(theta - phi, Z^n)
};

inline DeltaParts delta_metric_parts(const QuotientPoint& p, const QuotientPoint& q) {
    if (p.n() != q.n()) throw ContractError("delta_metric: dimension mismatch");
    DeltaParts out{Rat(0), Rat(0)};
    for (std::size_t i = 0; i < p.n(); ++i) {
        Rat dr = p.rho[i] - q.rho[i];
        out.a += dr * dr;
        Rat dt = dist_to_Z(p.theta[i] - q.theta[i]);
        out.s += dt * dt;
    }
    return out;
}

namespace detail {

// Certified sqrt(a + 4 pi^2 s) + widening for input errors.
inline Certified delta_from_parts(const Rat& a, const Rat& s, const Rat& input_err, long prec_bits) {
    if (s == 0) {
        if (a == 0) return Certified(Rat(0), input_err);
        if (is_perfect_square(num(a)) && is_perfect_square(den(a)))
            return Certified(make_rat(isqrt_floor(num(a)), isqrt_floor(den(a))), input_err);
        Rat lo, hi;
        sqrt_bracket(a, prec_bits, lo, hi);
        Rat mid = (lo + hi) / 2;
        return Certified(mid, hi - mid + input_err);
    }
    Certified pi = pi_const(prec_bits + 8);
    Rat pi2_lo = pi.lo() * pi.lo(), pi2_hi = pi.hi() * pi.hi();
    Rat Slo = a + 4 * pi2_lo * s, Shi = a + 4 * pi2_hi * s;
    Rat lo = sqrt_lower(Slo, prec_bits), hi = sqrt_upper(Shi, prec_bits);
    Rat mid = (lo + hi) / 2;
    return Certified(mid, hi - mid + input_err);
}

}  // namespace detail

// Quotient metric Delta(p, q) = dist(p - q, 2 pi i Z^n), certified.
inline Certified delta_metric(const QuotientPoint& p, const QuotientPoint& q, long prec_bits = 96) {
    DeltaParts parts = delta_metric_parts(p, q);
    return detail::delta_from_parts(parts.a, parts.s, p.err + q.err, prec_bits);
}

enum class Group { T, K };
enum class SldpBackend { exact, h_based, lll };

// Orbit distance in the quotient metric, all bookkeeping exposed:
// Delta^2(G * p, G * q) = first + 4 pi^2 dist^2(theta-phi + U, Z^n), with
// first = dist^2(rho-tau, U) for G = T and ||rho-tau||^2 for G = K.
struct OrbitDistance {
    DistanceEstimate estimate;          // D and its certified factor (exact inputs)
    Certified delta;                    // two-sided interval around the true distance
    Rat real_part_sq;                   // exact
    DistanceEstimate imag_estimate;     // the SLDP backend's estimate on the theta part
    std::optional<Rat> imag_sq_exact;   // present with the exact backend
    SldpWitness imag_witness;           // witness for the theta part (h/exact backends)
};

inline OrbitDistance delta_orbit(const TorusAction& action, const QuotientPoint& p,
                                 const QuotientPoint& q, Group group,
                                 SldpBackend backend = SldpBackend::exact, long prec_bits = 96,
                                 std::size_t enum_guard = kDefaultEnumGuard) {
    if (p.n() != action.n() || q.n() != action.n())
        throw ContractError("delta_orbit: dimension mismatch");
    std::vector<IntVector> U = action.row_space_basis();
    RatVector drho = sub(p.rho, q.rho);
    Rat first;
    if (group == Group::T) {
        std::vector<RatVector> uq;
        for (const auto& u : U) uq.push_back(to_rat(u));
        RatVector proj = uq.empty() ? RatVector(drho.size(), Rat(0)) : project_onto_span(uq, drho);
        first = norm2(sub(drho, proj));
    } else {
        first = norm2(drho);
    }
    RatVector dtheta(p.n());
    for (std::size_t i = 0; i < p.n(); ++i) dtheta[i] = p.theta[i] - q.theta[i];
    SldpInstance inst(dtheta, U);
    SldpResult sr;
    switch (backend) {
        case SldpBackend::exact: sr = sldp_exact(inst, enum_guard); break;
        case SldpBackend::h_based: sr = sldp_h_based(inst); break;
        case SldpBackend::lll: sr = sldp_lll(inst); break;
    }
    OrbitDistance out;
    out.real_part_sq = first;
    out.imag_estimate = sr.estimate;
    out.imag_sq_exact = sr.estimate.squared_exact;
    out.imag_witness = sr.witness;

    Rat input_err = p.err + q.err;
    if (sr.estimate.squared_exact) {
        out.delta = detail::delta_from_parts(first, *sr.estimate.squared_exact, input_err, prec_bits);
        Rat D = out.delta.value + out.delta.err;  // upper end of the certified interval
        Rat gamma = Rat(1) + pow2(-14);
        if (out.delta.value - out.delta.err > 0) {
            // honest multiplicative factor of the rounding
            gamma = D / (out.delta.value - out.delta.err);
            if (gamma < 1) gamma = 1;
        }
        std::optional<Rat> sq;
        if (*sr.estimate.squared_exact == 0) sq = first;  // rational squared distance
        out.estimate = {D, gamma, sq};
    } else {
        // upper value from the backend's D, lower interval from d >= D / gamma
        Rat Dsq_hi = sr.estimate.D * sr.estimate.D;
        Certified hi_c = detail::delta_from_parts(first, Dsq_hi, Rat(0), prec_bits);
        Rat hi = hi_c.hi() + input_err;
        Rat dlo_sq = Dsq_hi / (sr.estimate.gamma * sr.estimate.gamma);
        Certified lo_c = detail::delta_from_parts(first, dlo_sq, Rat(0), prec_bits);
        Rat lo = lo_c.lo() - input_err;
        if (lo < 0) lo = 0;
        Rat mid = (lo + hi) / 2;
        out.delta = Certified(mid, hi - mid);
        // D' = sqrt(first + 4 pi^2 D_sldp^2) rounded up: factor (1 + eps) gamma_b
        out.estimate = {hi, sr.estimate.gamma * (Rat(1) + pow2(-12)), std::nullopt};
    }
    return out;
}

// Delta(H eta, H zeta) in the k-dimensional quotient, certified; exact inputs
// give exact squared parts.
inline Certified h_distance(const InvariantMatrix& inv, const QuotientPoint& p,
                            const QuotientPoint& q, long prec_bits = 96) {
    const IntMatrix& H = inv.H;
    if (H.cols != p.n() || p.n() != q.n()) throw ContractError("h_distance: dimension mismatch");
    RatVector hr = H.mul_vec(sub(p.rho, q.rho));
    RatVector dth(p.n());
    for (std::size_t i = 0; i < p.n(); ++i) dth[i] = p.theta[i] - q.theta[i];
    RatVector ht = H.mul_vec(dth);
    Rat a = norm2(hr), s = 0;
    for (const auto& x : ht) {
        Rat d = dist_to_Z(x);
        s += d * d;
    }
    // input errors amplified by at most sigma_max <= n ||H||max
    Rat amp = Rat(Int(H.cols) * H.max_abs());
    return detail::delta_from_parts(a, s, amp * (p.err + q.err), prec_bits);
}

inline DeltaParts h_distance_parts(const InvariantMatrix& inv, const QuotientPoint& p,
                                   const QuotientPoint& q) {
    const IntMatrix& H = inv.H;
    RatVector hr = H.mul_vec(sub(p.rho, q.rho));
    RatVector dth(p.n());
    for (std::size_t i = 0; i < p.n(); ++i) dth[i] = p.theta[i] - q.theta[i];
    RatVector ht = H.mul_vec(dth);
    Rat a = norm2(hr), s = 0;
    for (const auto& x : ht) {
        Rat d = dist_to_Z(x);
        s += d * d;
    }
    return {a, s};
}

// Certified lower/upper bounds on the Euclidean distance dist(C_v, C_w) via
// (2r/pi) Delta <= dist <= R Delta on D_{r,R}.
struct KOrbitBounds {
    Certified lower;  // the value IS the bound; err = 0
    Certified upper;
    Certified delta;  // the Delta-distance interval used
};

inline KOrbitBounds k_orbit_dist_bounds(const TorusAction& action, const GaussVector& v,
                                        const GaussVector& w,
                                        SldpBackend backend = SldpBackend::exact,
                                        long prec_bits = 96) {
    if (v.size() != action.n() || w.size() != action.n())
        throw ContractError("k_orbit_dist_bounds: dimension mismatch");
    Rat r2(-1), R2(-1);
    for (const auto& c : v) {
        if (c.is_zero()) throw ContractError("k_orbit_dist_bounds: zero component");
        Rat m = c.norm2();
        if (r2 < 0 || m < r2) r2 = m;
        if (m > R2) R2 = m;
    }
    for (const auto& c : w) {
        if (c.is_zero()) throw ContractError("k_orbit_dist_bounds: zero component");
        Rat m = c.norm2();
        if (m < r2) r2 = m;
        if (m > R2) R2 = m;
    }
    Rat r_lo = sqrt_lower(r2, prec_bits);
    Rat R_hi = sqrt_upper(R2, prec_bits);
    Rat eps_log = pow2(-prec_bits);
    QuotientPoint pv = log_approx(v, eps_log);
    QuotientPoint pw = log_approx(w, eps_log);
    OrbitDistance od = delta_orbit(action, pv, pw, Group::K, backend, prec_bits);
    Certified pi = pi_const(prec_bits);
    Rat dlo = od.delta.lo();
    if (dlo < 0) dlo = 0;
    Rat lower = 2 * r_lo * dlo / pi.hi();
    Rat upper = R_hi * od.delta.hi();
    return {Certified(lower), Certified(upper), od.delta};
}

// Lambda(v, e) = sum e_j Log v_j, principal branch, absolute error < eps.
inline CertifiedComplex linear_form_in_logs(const GaussVector& v, const IntVector& e,
                                            const Rat& eps) {
    if (v.size() != e.size()) throw ContractError("linear_form_in_logs: shape mismatch");
    if (eps <= 0) throw ContractError("linear_form_in_logs: nonpositive accuracy");
    for (const auto& c : v)
        if (c.is_zero()) throw ContractError("linear_form_in_logs: zero component");
    long bits = 32;
    {
        Rat ee = eps;
        while (ee < 1) {
            ee *= 2;
            ++bits;
        }
    }
    for (int attempt = 0;; ++attempt) {
        Certified re(Rat(0)), im(Rat(0));
        Certified pi = pi_const(bits + 16);
        for (std::size_t j = 0; j < v.size(); ++j) {
            if (e[j] == 0) continue;
            Certified lr = log_abs(v[j], bits);
            CertifiedAngle an = arg_gauss(v[j], bits);
            Certified angle = Certified(make_rat(an.quarter_turns, 2)) * pi + an.residual;
            re = re + Rat(e[j]) * lr;
            im = im + Rat(e[j]) * angle;
        }
        if (re.err + im.err < eps) return {re, im};
        bits *= 2;
        if (attempt > 32) throw ContractError("linear_form_in_logs: accuracy escalation failed");
    }
}

}  // namespace torusdist
