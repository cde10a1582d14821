#pragma once

// Robust orbit-distance approximation: the four (group, metric) solvers, the
// proximity witness, and the reduction chain SLDP -> ROP and CVP -> SLDP -> ROP
// with explicitly computed back-map factors.

#include <variant>

#include "torusdist/lifting.hpp"
#include "torusdist/logspace.hpp"

namespace torusdist {

// Caller-asserted lower bound on the separation parameter for the instance class.
struct SepBound {
    Rat eps;

    explicit SepBound(Rat e) : eps(std::move(e)) {
        if (eps <= 0) throw ContractError("SepBound: eps must be positive");
    }
};

// Concrete default (flagged as heuristic by the CLI): eps = 2^(-64 (d+n+B+b)).
inline SepBound default_sep_bound(std::size_t d, std::size_t n, std::size_t B, std::size_t b) {
    long e = -64L * static_cast<long>(d + n + B + b);
    if (e > -64) e = -64;
    return SepBound(pow2(e));
}

// The group element is e^{y + 2 pi i z}.
struct Witness {
    RatVector y;
    RatVector z;
};

// Residual data of a witness: Delta(e^x * eta, zeta)^2 <= first + 4 pi^2 theta_res2.
struct WitnessResidual {
    Rat first;       // || rho + M^T y - tau ||^2, exact
    Rat theta_res2;  // SLDP witness residual on the theta part, exact
    Certified delta; // certified upper interval of the residual distance
};

// ROP in the Delta settings (T, Delta) and (K, Delta): exact rational quotient
// points required; D <= 2 gamma_backend * Delta(G * p, G * q).
inline OrbitDistance rop_delta(const TorusAction& action, const QuotientPoint& p,
                               const QuotientPoint& q, Group group,
                               SldpBackend backend = SldpBackend::exact, long prec_bits = 96) {
    if (p.err != 0 || q.err != 0)
        throw ContractError("rop_delta: inexact input; route through rop_logdist/rop_dist");
    return delta_orbit(action, p, q, group, backend, prec_bits);
}

namespace detail {

inline QuotientPoint as_exact(QuotientPoint p) {
    p.err = 0;
    return p;
}

inline long bits_for(const Rat& eps) {
    long bits = 8;
    Rat e = eps;
    while (e < 1) {
        e *= 2;
        ++bits;
    }
    return bits;
}

}  // namespace detail

// ROP(T, delta_log): exact-equality short circuit, then the approximation chain at
// log accuracy kappa = sep.eps / 2 with composed factor 3 gamma_backend.
inline DistanceEstimate rop_logdist_T(const TorusAction& action, const GaussVector& v,
                                      const GaussVector& w, const SepBound& sep,
                                      SldpBackend backend = SldpBackend::h_based,
                                      long prec_bits = 96) {
    if (orbit_equal_T(action, v, w)) return {Rat(0), Rat(1), Rat(0)};
    Rat kappa = sep.eps / 2;
    QuotientPoint eta = detail::as_exact(log_approx(v, kappa / 2));
    QuotientPoint zeta = detail::as_exact(log_approx(w, kappa / 2));
    OrbitDistance od = delta_orbit(action, eta, zeta, Group::T, backend, prec_bits);
    return {2 * od.estimate.D, 3 * od.estimate.gamma, std::nullopt};
}

// ROP(K, dist) on D_{r,R} data: factor gamma_1 = 2 (R/r) gamma_backend,
// reported D = (9/8) R D_tilde per the proof's construction.
inline DistanceEstimate rop_dist_K(const TorusAction& action, const GaussVector& v,
                                   const GaussVector& w, const SepBound& sep,
                                   SldpBackend backend = SldpBackend::h_based,
                                   long prec_bits = 96) {
    if (orbit_equal_K(action, v, w)) return {Rat(0), Rat(1), Rat(0)};
    Rat r2(-1), R2(-1);
    for (const auto& c : v) {
        if (c.is_zero()) throw ContractError("rop_dist_K: zero component");
        Rat m = c.norm2();
        if (r2 < 0 || m < r2) r2 = m;
        if (m > R2) R2 = m;
    }
    for (const auto& c : w) {
        if (c.is_zero()) throw ContractError("rop_dist_K: zero component");
        Rat m = c.norm2();
        if (m < r2) r2 = m;
        if (m > R2) R2 = m;
    }
    Rat r_lo = sqrt_lower(r2, 24);
    Rat R_hi = sqrt_upper(R2, 24);
    Rat kappa = sep.eps / (9 * R_hi);
    QuotientPoint eta = detail::as_exact(log_approx(v, kappa / 2));
    QuotientPoint zeta = detail::as_exact(log_approx(w, kappa / 2));
    OrbitDistance od = delta_orbit(action, eta, zeta, Group::K, backend, prec_bits);
    Rat D = Rat(9, 8) * R_hi * od.estimate.D;
    Rat gamma = 2 * R_hi * od.estimate.gamma / r_lo;
    return {D, gamma, std::nullopt};
}

struct WitnessResult {
    bool orbit_equal;
    Witness witness;            // valid when !orbit_equal
    DistanceEstimate estimate;  // distance estimate produced alongside
    WitnessResidual residual;   // certified residual of the witness
};

// ROP(T, delta_log) search version: on distinct orbits returns x = y + 2 pi i z
// with certified Delta(e^x * Log v, Log w) <= 2 gamma_backend * delta_log(O_v, O_w).
inline WitnessResult rop_witness_T(const TorusAction& action, const GaussVector& v,
                                   const GaussVector& w, const SepBound& sep,
                                   SldpBackend backend = SldpBackend::h_based,
                                   long prec_bits = 96) {
    WitnessResult out{};
    if (orbit_equal_T(action, v, w)) {
        out.orbit_equal = true;
        out.estimate = {Rat(0), Rat(1), Rat(0)};
        return out;
    }
    out.orbit_equal = false;
    Rat kappa = sep.eps / 2;
    QuotientPoint eta = detail::as_exact(log_approx(v, kappa / 2));
    QuotientPoint zeta = detail::as_exact(log_approx(w, kappa / 2));

    std::vector<IntVector> U = action.row_space_basis();
    RatVector drho = sub(eta.rho, zeta.rho);
    std::vector<RatVector> uq;
    for (const auto& u : U) uq.push_back(to_rat(u));
    // real part: y solves M^T y = u1 with u1 = -P_U(rho~ - tau~)
    RatVector u1 = uq.empty() ? RatVector(drho.size(), Rat(0))
                              : scale(Rat(-1), project_onto_span(uq, drho));
    RatMatrix Mt(action.n(), action.d());
    for (std::size_t i = 0; i < action.d(); ++i)
        for (std::size_t j = 0; j < action.n(); ++j) Mt.at(j, i) = Rat(action.M.at(i, j));
    auto y = solve_rational(Mt, u1);
    if (!y) throw ContractError("rop_witness_T: projection not in the row space");
    // theta part: SLDP witness on t = theta~ - phi~
    RatVector dtheta(action.n());
    for (std::size_t i = 0; i < action.n(); ++i) dtheta[i] = eta.theta[i] - zeta.theta[i];
    SldpInstance inst(dtheta, U);
    SldpResult sr;
    switch (backend) {
        case SldpBackend::exact: sr = sldp_exact(inst); break;
        case SldpBackend::h_based: sr = sldp_h_based(inst); break;
        case SldpBackend::lll: sr = sldp_lll(inst); break;
    }
    auto z = solve_rational(Mt, sr.witness.u);
    if (!z) throw ContractError("rop_witness_T: SLDP witness not in the row space");
    out.witness = {*y, *z};

    // residual of the witness in the quotient metric
    RatVector shifted = add(drho, u1);  // rho~ + M^T y - tau~
    out.residual.first = norm2(shifted);
    out.residual.theta_res2 = sr.witness.residual2;
    out.residual.delta =
        detail::delta_from_parts(out.residual.first, out.residual.theta_res2, Rat(0), prec_bits);

    OrbitDistance od = delta_orbit(action, eta, zeta, Group::T, backend, prec_bits);
    out.estimate = {2 * od.estimate.D, 3 * od.estimate.gamma, std::nullopt};
    return out;
}

enum class RopMetric { delta, logdist, euclid };

// Emitted ROP instance of the SLDP -> ROP reduction, with the back-map factor:
// D_sldp := back_factor * D_rop certifies dist(t + U, Z^n) within the composed
// gamma (a factor <= 2 over the solver's own gamma).
struct SldpToRop {
    TorusAction action;
    Group group;
    RopMetric metric;
    // Delta settings: quotient points; log/euclid settings: vectors
    QuotientPoint p, q;
    GaussVector v, w;
    Rat back_factor;
    Rat sep_hint;       // computed unconditional separation for the emitted pair
    bool equal_orbits;  // the SLDP distance was zero; emitted pair has equal orbits
};

inline SldpToRop reduce_sldp_to_rop(const SldpInstance& inst, Group group, RopMetric metric,
                                    long prec_bits = 96) {
    if (metric == RopMetric::logdist && group != Group::T)
        throw ContractError("reduce_sldp_to_rop: delta_log is a T-orbit metric");
    if (metric == RopMetric::euclid && group != Group::K)
        throw ContractError("reduce_sldp_to_rop: dist is a K-orbit metric");
    std::size_t n = inst.n();
    // action rows span U (a zero row when U = {0})
    IntMatrix M(inst.U_basis.empty() ? 1 : inst.U_basis.size(), n);
    for (std::size_t i = 0; i < inst.U_basis.size(); ++i)
        for (std::size_t j = 0; j < n; ++j) M.at(i, j) = inst.U_basis[i][j];
    TorusAction action(std::move(M));
    SldpToRop out{action, group, metric, QuotientPoint::zero(n), QuotientPoint::zero(n),
                  {},     {},    Rat(0), Rat(0),               false};

    Certified pi = pi_const(prec_bits + 16);
    Rat inv2pi_up = Rat(1) / (2 * pi.lo());  // >= 1/(2 pi)

    if (metric == RopMetric::delta) {
        out.p = QuotientPoint(RatVector(n, Rat(0)), inst.t);
        out.q = QuotientPoint::zero(n);
        out.back_factor = inv2pi_up;
        out.equal_orbits = affine_lattice_nonempty(inst.t, inst.U_basis);
        out.sep_hint = Rat(1);  // Delta settings need no separation input
        return out;
    }

    // dist / delta_log settings: exponentiate the target
    bool zero_dist = affine_lattice_nonempty(inst.t, inst.U_basis);
    if (zero_dist) {
        out.equal_orbits = true;
        out.v = GaussVector(n, GaussianRational(1));
        out.w = GaussVector(n, GaussianRational(1));
        out.back_factor = metric == RopMetric::euclid ? Rat(9, 32) : Rat(17, 16) * inv2pi_up;
        out.sep_hint = Rat(1);
        return out;
    }
    // unconditional separation of the emitted instance:
    // dist(t + U, Z^n) >= dist(Ht, Z^k) / sigma_max(H) >= 1/(q_max sigma_hi)
    IntMatrix H = inst.U_basis.empty() ? IntMatrix::identity(n) : kernel_lattice_basis([&] {
        IntMatrix MM(inst.U_basis.size(), n);
        for (std::size_t i = 0; i < inst.U_basis.size(); ++i)
            for (std::size_t j = 0; j < n; ++j) MM.at(i, j) = inst.U_basis[i][j];
        return MM;
    }());
    RatVector Ht = H.mul_vec(inst.t);
    Int qmax = 1;
    for (const auto& x : Ht)
        if (den(x) > qmax) qmax = den(x);
    if (qmax == 1) throw ContractError("reduce_sldp_to_rop: inconsistent zero-distance detection");
    Rat sigma_hi = Rat(Int(n) * H.max_abs());
    Rat eps_dist = Rat(1) / (Rat(qmax) * sigma_hi);
    Rat eps_delta = 2 * pi.lo() * eps_dist;
    if (eps_delta > 1) eps_delta = 1;
    // separation of the perturbed pair: Delta_1 >= 16 kappa = (8/9) eps_delta in
    // the log metric; dist(C_v, C_w) >= (2 r / pi) Delta_1 >= eps_delta / 2
    out.sep_hint = metric == RopMetric::euclid ? Rat(eps_delta / 2) : Rat(Rat(8, 9) * eps_delta);
    Rat kappa = eps_delta / 18;
    // v ~ Exp(2 pi i t) with || v - Exp(2 pi i t) || < kappa
    Rat n_up = sqrt_upper(Rat(static_cast<long>(n)), 16);
    QuotientPoint target(RatVector(n, Rat(0)), inst.t);
    out.v = exp_approx(target, kappa / (4 * n_up));
    out.w = GaussVector(n, GaussianRational(1));
    out.back_factor = metric == RopMetric::euclid ? Rat(9, 32) : Rat(17, 16) * inv2pi_up;
    return out;
}

// Solve the emitted ROP instance with the chosen backend and map back:
// returns a D with dist(t + U, Z^n) <= D <= (composed factor) * dist.
struct RopAnswer {
    Rat D_rop;
    Rat D_backmapped;
    Rat gamma_rop;
};

inline RopAnswer solve_reduced_rop(const SldpToRop& red, SldpBackend backend,
                                   long prec_bits = 96) {
    RopAnswer ans{Rat(0), Rat(0), Rat(1)};
    if (red.metric == RopMetric::delta) {
        OrbitDistance od = rop_delta(red.action, red.p, red.q, red.group, backend, prec_bits);
        ans.D_rop = od.estimate.D;
        ans.gamma_rop = od.estimate.gamma;
    } else if (red.metric == RopMetric::logdist) {
        DistanceEstimate e = rop_logdist_T(red.action, red.v, red.w, SepBound(red.sep_hint),
                                           backend, prec_bits);
        ans.D_rop = e.D;
        ans.gamma_rop = e.gamma;
    } else {
        DistanceEstimate e = rop_dist_K(red.action, red.v, red.w, SepBound(red.sep_hint), backend,
                                        prec_bits);
        ans.D_rop = e.D;
        ans.gamma_rop = e.gamma;
    }
    ans.D_backmapped = red.back_factor * ans.D_rop;
    return ans;
}

// CVP -> SLDP -> ROP composition; the back map certifies dist(t, L) within the
// composed factor s_total * back_factor.
struct CvpToRop {
    Int s_total;
    SldpToRop rop;
    SldpInstance sldp;
    ComplementHint complement;
};

using CvpToRopOutcome = std::variant<CvpExactAnswer, CvpToRop>;

inline CvpToRopOutcome cvp_to_rop_pipeline(const CvpInstance& inst, Group group, RopMetric metric,
                                           bool allow_exact = false, long prec_bits = 96) {
    CvpToSldpOutcome first = cvp_to_sldp(inst, allow_exact);
    if (std::holds_alternative<CvpExactAnswer>(first))
        return std::get<CvpExactAnswer>(first);
    auto& red = std::get<CvpToSldp>(first);
    SldpToRop rop = reduce_sldp_to_rop(red.instance, group, metric, prec_bits);
    return CvpToRop{red.s_total, std::move(rop), std::move(red.instance), std::move(red.complement)};
}

}  // namespace torusdist
