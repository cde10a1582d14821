#pragma once

// Kempf-Ness log-sum-exp machinery: certified value/gradient/Hessian, a damped
// Newton minimizer with precision escalation, the orbit-equality decision loop,
// and the stress-example family with weights (1,0), (-2,0), (-N,1), (-N,-1).

#include "torusdist/rop.hpp"

namespace torusdist {

struct KnProblem {
    IntMatrix M;  // weights as columns, d x n
    RatVector q;  // q_i = |v_i|^2 > 0

    KnProblem(IntMatrix weights, RatVector qs) : M(std::move(weights)), q(std::move(qs)) {
        if (q.size() != M.cols) throw ContractError("KnProblem: weight/coefficient mismatch");
        for (const auto& x : q)
            if (x <= 0) throw ContractError("KnProblem: q_i must be positive");
        if (!weights_affinely_span(M))
            throw ContractError("KnProblem: affine span of the weights must be R^d");
    }

    static KnProblem from_vector(const IntMatrix& weights, const GaussVector& v) {
        RatVector qs(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (v[i].is_zero()) throw ContractError("KnProblem: zero component");
            qs[i] = v[i].norm2();
        }
        return KnProblem(weights, qs);
    }

    std::size_t d() const { return M.rows; }
    std::size_t n() const { return M.cols; }
};

namespace kn_detail {

// log of a certified positive value
inline Certified log_certified(const Certified& z, long bits) {
    Rat lo = z.abs_lo();
    if (lo <= 0 || z.value <= 0) throw ContractError("log_certified: value not certified positive");
    Certified base = log_rat(z.value, bits);
    // |log a - log b| <= |a - b| / min(a, b)
    return {base.value, base.err + z.err / lo};
}

struct SoftmaxData {
    std::vector<Certified> p;  // softmax weights, certified
    Certified f;               // function value
};

// f(x) = m* + log(sum q_i e^{w_i - m*}) with m* = max w_i.
inline SoftmaxData evaluate(const KnProblem& prob, const RatVector& x, long bits) {
    std::size_t n = prob.n();
    RatVector w = prob.M.transpose().mul_vec(x);
    Rat mstar = w[0];
    for (const auto& wi : w)
        if (wi > mstar) mstar = wi;
    std::vector<Certified> terms(n);
    Certified Z(Rat(0));
    for (std::size_t i = 0; i < n; ++i) {
        Rat arg = w[i] - mstar;  // <= 0
        Certified e = arg == 0 ? Certified(Rat(1)) : exp_rat(arg, bits);
        terms[i] = prob.q[i] * e;
        Z = Z + terms[i];
    }
    SoftmaxData out;
    out.f = Certified(mstar) + log_certified(Z, bits);
    Certified zinv = Z.inverse();
    out.p.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.p[i] = (terms[i] * zinv).compressed(bits + 16);
    return out;
}

inline long bits_for_eps(const Rat& eps) {
    long bits = 16;
    Rat e = eps;
    while (e < 1) {
        e *= 2;
        ++bits;
    }
    return bits;
}

}  // namespace kn_detail

// f(x) within absolute error eps.
inline Certified kn_value(const KnProblem& prob, const RatVector& x, const Rat& eps) {
    if (eps <= 0) throw ContractError("kn_value: nonpositive accuracy");
    long bits = kn_detail::bits_for_eps(eps) + 16;
    for (int attempt = 0;; ++attempt) {
        Certified f = kn_detail::evaluate(prob, x, bits).f;
        if (f.err <= eps) return f;
        bits *= 2;
        if (attempt > 32) throw ContractError("kn_value: accuracy escalation failed");
    }
}

// Softmax-weighted mean of the weights, componentwise error <= eps.
inline std::vector<Certified> kn_gradient(const KnProblem& prob, const RatVector& x, const Rat& eps) {
    if (eps <= 0) throw ContractError("kn_gradient: nonpositive accuracy");
    long bits = kn_detail::bits_for_eps(eps) + 24;
    for (int attempt = 0;; ++attempt) {
        auto sm = kn_detail::evaluate(prob, x, bits);
        std::vector<Certified> g(prob.d(), Certified(Rat(0)));
        for (std::size_t i = 0; i < prob.n(); ++i)
            for (std::size_t k = 0; k < prob.d(); ++k)
                g[k] = g[k] + Rat(prob.M.at(k, i)) * sm.p[i];
        Rat worst = 0;
        for (const auto& c : g)
            if (c.err > worst) worst = c.err;
        if (worst <= eps) return g;
        bits *= 2;
        if (attempt > 32) throw ContractError("kn_gradient: accuracy escalation failed");
    }
}

// Hessian = weighted second moment minus grad grad^T, componentwise error <= eps.
inline std::vector<std::vector<Certified>> kn_hessian(const KnProblem& prob, const RatVector& x,
                                                      const Rat& eps) {
    if (eps <= 0) throw ContractError("kn_hessian: nonpositive accuracy");
    long bits = kn_detail::bits_for_eps(eps) + 32;
    for (int attempt = 0;; ++attempt) {
        auto sm = kn_detail::evaluate(prob, x, bits);
        std::size_t d = prob.d();
        std::vector<Certified> g(d, Certified(Rat(0)));
        for (std::size_t i = 0; i < prob.n(); ++i)
            for (std::size_t k = 0; k < d; ++k) g[k] = g[k] + Rat(prob.M.at(k, i)) * sm.p[i];
        std::vector<std::vector<Certified>> H(d, std::vector<Certified>(d, Certified(Rat(0))));
        for (std::size_t i = 0; i < prob.n(); ++i)
            for (std::size_t k = 0; k < d; ++k)
                for (std::size_t l = 0; l < d; ++l)
                    H[k][l] = H[k][l] + Rat(prob.M.at(k, i) * prob.M.at(l, i)) * sm.p[i];
        Rat worst = 0;
        for (std::size_t k = 0; k < d; ++k)
            for (std::size_t l = 0; l < d; ++l) {
                H[k][l] = H[k][l] - g[k] * g[l];
                if (H[k][l].err > worst) worst = H[k][l].err;
            }
        if (worst <= eps) return H;
        bits *= 2;
        if (attempt > 32) throw ContractError("kn_hessian: accuracy escalation failed");
    }
}

struct KnSolution {
    RatVector x;
    Rat grad_norm;    // certified upper bound on ||grad f(x)||
    Certified f_value;
    long iterations;
};

// Damped Newton with backtracking from x0 = 0; deterministic; working
// precision doubles until every comparison is certified and the gradient
// bound drops below tol. The minimum is attained iff 0 lies in the interior
// of the weight polytope.
inline KnSolution kn_minimize(const KnProblem& prob, const Rat& tol) {
    if (tol <= 0) throw ContractError("kn_minimize: nonpositive tolerance");
    if (polytope_position(prob.M, RatVector(prob.d(), Rat(0))) != PolytopePosition::interior)
        throw ContractError("kn_minimize: 0 not in the interior of the weight polytope");
    std::size_t d = prob.d();
    RatVector x(d, Rat(0));
    long bits = std::max<long>(96, kn_detail::bits_for_eps(tol) + 32);
    long iters = 0;
    for (;; ++iters) {
        if (iters > 500) throw ContractError("kn_minimize: iteration limit");
        auto sm = kn_detail::evaluate(prob, x, bits);
        std::vector<Certified> g(d, Certified(Rat(0)));
        for (std::size_t i = 0; i < prob.n(); ++i)
            for (std::size_t k = 0; k < d; ++k) g[k] = g[k] + Rat(prob.M.at(k, i)) * sm.p[i];
        Rat gn2_hi = 0, gn2_lo = 0;
        for (const auto& c : g) {
            gn2_hi += c.abs_hi() * c.abs_hi();
            gn2_lo += c.abs_lo() * c.abs_lo();
        }
        Rat gn_hi = sqrt_upper(gn2_hi, 24);
        if (gn_hi <= tol) {
            return {x, gn_hi, sm.f, iters};
        }
        if (gn2_lo == 0 || gn2_hi > 4 * gn2_lo) {
            // gradient interval too fat to trust a step
            bits *= 2;
            continue;
        }
        // Newton direction on the midpoint Hessian (exact rational solve)
        auto Hc = kn_hessian(prob, x, pow2(-bits / 2));
        RatMatrix Hm(d, d);
        RatVector gm(d);
        for (std::size_t k = 0; k < d; ++k) {
            gm[k] = -g[k].value;
            for (std::size_t l = 0; l < d; ++l) Hm.at(k, l) = Hc[k][l].value;
        }
        RatVector dir;
        auto sol = solve_rational(Hm, gm);
        if (sol && !is_zero(*sol))
            dir = *sol;
        else
            dir = gm;  // singular midpoint Hessian: fall back to steepest descent
        // keep iterate bit-lengths bounded
        for (auto& c : dir) c = dyadic_round(c, bits);
        // backtracking on certified decrease
        Rat lambda(1);
        bool stepped = false;
        for (int bt = 0; bt < 80; ++bt) {
            RatVector xn = add(x, scale(lambda, dir));
            Certified fn = kn_detail::evaluate(prob, xn, bits).f;
            if (fn.hi() < sm.f.lo()) {
                x = std::move(xn);
                stepped = true;
                break;
            }
            lambda /= 2;
        }
        if (!stepped) bits *= 2;  // comparisons not certifiable at this precision
    }
}

// The section-6.3 decision procedure: minimize both Kempf-Ness functions,
// shift in log space exactly, compare the certified orbit distance against
// gamma * eps. Correctness is conditional on the caller's SepBound plus a
// local strong-convexity radius estimate (flagged in the result).
struct KnOrbitEqualResult {
    bool equal;
    Rat D;          // certified distance estimate of the shifted pair
    Rat threshold;  // gamma * eps
    bool heuristic_x_accuracy;  // the minimizer accuracy relies on the local Hessian
};

inline KnOrbitEqualResult kn_orbit_equal(const TorusAction& action, const GaussVector& v,
                                         const GaussVector& w, const SepBound& sep,
                                         SldpBackend backend = SldpBackend::h_based,
                                         long prec_bits = 96) {
    for (const auto& c : v)
        if (c.is_zero()) throw ContractError("kn_orbit_equal: zero component");
    for (const auto& c : w)
        if (c.is_zero()) throw ContractError("kn_orbit_equal: zero component");
    if (polytope_origin_position(action) != PolytopePosition::interior)
        throw ContractError("kn_orbit_equal: 0 not in the interior of the weight polytope");

    // a-priori bound on the backend's approximation factor
    InvariantMatrix inv = invariant_matrix(action);
    Rat gamma_b;
    if (inv.k() == 0) {
        gamma_b = Rat(2);
    } else {
        switch (backend) {
            case SldpBackend::exact: gamma_b = Rat(2); break;
            case SldpBackend::h_based: {
                auto sb = sigma_bounds(inv.H);
                gamma_b = 2 * sb.hi / sb.lo;
                break;
            }
            case SldpBackend::lll:
                gamma_b = pow2(static_cast<long>(action.n()) / 2 + 1);
                break;
        }
    }
    Rat gamma = 2 * gamma_b;
    Rat eps = sep.eps / (2 * gamma);

    // minimize both Kempf-Ness functions to x-accuracy (1/2) ||M||^-1 eps,
    // mapping gradient accuracy through the local Hessian floor
    Rat sigma_hi = Rat(Int(action.n()) * action.M.max_abs());
    Rat x_target = eps / (2 * sigma_hi);
    KnProblem pv = KnProblem::from_vector(action.M, v);
    KnProblem pw = KnProblem::from_vector(action.M, w);
    auto minimize_to_x = [&](const KnProblem& p) {
        KnSolution coarse = kn_minimize(p, x_target);
        // local strong-convexity floor from the midpoint Hessian
        auto Hc = kn_hessian(p, coarse.x, pow2(-2 * prec_bits));
        RatMatrix Hm(p.d(), p.d());
        for (std::size_t i = 0; i < p.d(); ++i)
            for (std::size_t j = 0; j < p.d(); ++j) Hm.at(i, j) = Hc[i][j].value;
        // lambda_min lower bound by Sturm on the char poly of the midpoint Hessian
        RatPoly cp = squarefree_part(char_poly(Hm));
        Rat ub = 0;
        for (std::size_t i = 0; i < p.d(); ++i) ub += rat_abs(Hm.at(i, i)) + 1;
        EigenBracket br = bracket_extreme_root(cp, ub, true, Rat(2), Rat(0));
        Rat mu = br.lo / 2;  // safety margin on the heuristic radius
        if (mu <= 0) mu = pow2(-prec_bits);
        Rat gtol = x_target * mu;
        return kn_minimize(p, gtol);
    };
    KnSolution sx = minimize_to_x(pv);
    KnSolution sy = minimize_to_x(pw);

    // exact log-space translation: the minimum of f(x) = 2 log ||e^{x/2} v|| sits
    // at the group element e^{x/2}, so the Kempf-Ness representative is
    // Log v + M^T x / 2 (the half keeps same-orbit inputs on one K-orbit).
    Rat kappa = eps / 8;
    QuotientPoint pv_log = detail::as_exact(log_approx(v, kappa / 2));
    QuotientPoint pw_log = detail::as_exact(log_approx(w, kappa / 2));
    RatVector shift_v = scale(Rat(1, 2), action.M.transpose().mul_vec(sx.x));
    RatVector shift_w = scale(Rat(1, 2), action.M.transpose().mul_vec(sy.x));
    QuotientPoint pvp(add(pv_log.rho, shift_v), pv_log.theta);
    QuotientPoint pwp(add(pw_log.rho, shift_w), pw_log.theta);
    OrbitDistance od = delta_orbit(action, pvp, pwp, Group::K, backend, prec_bits);
    Rat D = od.estimate.D;
    return {D < gamma * eps, D, Rat(gamma * eps), true};
}

// Example family with weights (1,0), (-2,0), (-N,1), (-N,-1).
struct Example63Report {
    long N;
    RatVector x;                 // solver minimizer for q = |v|^2
    RatVector y;                 // solver minimizer for q = |w|^2
    bool bracket_ok;             // cbrt(2) < e^{x1} < (1 + N/2^{N/3}) cbrt(2)
    bool x2_small;               // |x2| <= 1e-12
    bool gap_ok;                 // f((x1,1)) - f(x) <= 2^{-N/3}(e + 1/e - 2) + errs
    bool unit_distance_ok;       // ||(x1,1) - x|| = 1 given x2 = 0
    bool euclid_upper_ok;        // ||v' - w'|| <= 2^{7/3} eps_N
    bool log_lower_ok;           // Delta(H Log v, H Log w)/sigma_hi >= log2/(2N)
    Rat gap_value;               // certified upper bound on f((x1,1)) - f*
    Rat euclid_dist_hi;          // certified upper bound on ||v' - w'||
};

inline IntMatrix example63_weights(long N) {
    IntMatrix M(2, 4);
    M.at(0, 0) = 1;
    M.at(0, 1) = -2;
    M.at(0, 2) = -N;
    M.at(0, 3) = -N;
    M.at(1, 2) = 1;
    M.at(1, 3) = -1;
    return M;
}

inline Example63Report example_6_3(long N, const GaussVector& v, const GaussVector& w,
                                   const Rat& tol = pow2(-80)) {
    if (N <= 2) throw ContractError("example_6_3: N > 2 required");
    IntMatrix M = example63_weights(N);
    TorusAction action(M);
    KnProblem pv = KnProblem::from_vector(M, v);
    KnProblem pw = KnProblem::from_vector(M, w);
    KnSolution sx = kn_minimize(pv, tol);
    KnSolution sy = kn_minimize(pw, tol);

    Example63Report rep{};
    rep.N = N;
    rep.x = sx.x;
    rep.y = sy.x;

    long bits = 160;
    // bracket: 2 < e^{3 x1} < 2 (1 + N 2^{-N/3})^3
    Certified e3x = exp_rat(3 * sx.x[0], bits);
    Certified pow_nthird = exp_rat(Rat(0), bits);  // placeholder, replaced below
    {
        Certified l2 = log2_const(bits);
        pow_nthird = exp_rat(-(Rat(N) * l2.value) / 3, bits);  // ~ 2^{-N/3}
        // fold the log2 rounding into the certified error
        Rat slack = Rat(N) * l2.err;  // |d exp| <= exp on the negative axis <= 1
        pow_nthird.err += slack;
    }
    Rat npow_hi = Rat(N) * pow_nthird.hi();
    Rat rhs = 2 * (1 + npow_hi) * (1 + npow_hi) * (1 + npow_hi);
    rep.bracket_ok = e3x.lo() > 2 && e3x.hi() < rhs;

    rep.x2_small = rat_abs(sx.x[1]) <= make_rat(1, Int(1000000000000L));

    // gap at (x1, 1)
    RatVector xp = {sx.x[0], sx.x[1] + 1};
    Certified f_pt = kn_value(pv, xp, pow2(-bits / 2));
    Certified f_min = kn_value(pv, sx.x, pow2(-bits / 2));
    Certified e1 = exp_rat(Rat(1), bits);
    Certified em1 = exp_rat(Rat(-1), bits);
    Rat bound_hi = pow_nthird.hi() * (e1.hi() + em1.hi() - 2);
    Rat gap = f_pt.value - f_min.value;
    rep.gap_value = gap + f_pt.err + f_min.err;
    rep.gap_ok = rep.gap_value <= bound_hi + f_pt.err + f_min.err;

    // ||(x1, 1) - x|| = 1 exactly when the solver kept x2 = 0
    rep.unit_distance_ok = sx.x[1] == 0;

    // Euclidean upper bound on the Kempf-Ness orbit distance of the pair
    Rat eps_n_hi = 2 * Rat(N) * pow_nthird.hi();
    Certified two_sevth = exp_rat(Rat(0), 8);
    {
        Certified l2 = log2_const(bits);
        two_sevth = exp_rat(Rat(7) * l2.value / 3, bits);  // 2^{7/3}
        two_sevth.err += Rat(7) * l2.err * two_sevth.hi();
    }
    // v' = e^x v, w' = e^y w, real rational exponents: certified componentwise
    auto push = [&](const KnProblem&, const RatVector& xx, const GaussVector& vec) {
        std::vector<CertifiedComplex> out =
            act(action, xx, RatVector(2, Rat(0)), vec, pow2(-bits / 2));
        return out;
    };
    auto vv = push(pv, sx.x, v);
    auto ww = push(pw, sy.x, w);
    Rat d2_hi = 0;
    for (std::size_t j = 0; j < 4; ++j) {
        GaussianRational diff = vv[j].midpoint() - ww[j].midpoint();
        Rat mod_hi = sqrt_upper(diff.norm2(), 24) + vv[j].err_bound() + ww[j].err_bound();
        d2_hi += mod_hi * mod_hi;
    }
    rep.euclid_dist_hi = sqrt_upper(d2_hi, 24);
    rep.euclid_upper_ok = rep.euclid_dist_hi <= two_sevth.lo() * eps_n_hi;

    // logarithmic lower bound via H = [[2,1,0,0],[2N,0,1,1]]
    IntMatrix H(2, 4);
    H.at(0, 0) = 2;
    H.at(0, 1) = 1;
    H.at(1, 0) = 2 * N;
    H.at(1, 2) = 1;
    H.at(1, 3) = 1;
    if (!(M * H.transpose()).is_zero() || !is_saturated_basis(H))
        throw ContractError("example_6_3: invariant matrix check failed");
    InvariantMatrix invH{H};
    Rat eps_log = pow2(-bits);
    QuotientPoint lv = log_approx(v, eps_log);
    QuotientPoint lw = log_approx(w, eps_log);
    Certified hd = h_distance(invH, lv, lw, bits);
    // sigma_max upper bound by an exact eigenvalue bracket
    auto sb = gram_spectrum_brackets(H, Rat(33, 32));
    Rat sigma_hi = sqrt_upper(sb.lambda_max.hi, 24);
    Certified l2 = log2_const(bits);
    rep.log_lower_ok = hd.lo() / sigma_hi >= l2.hi() / (2 * N) && sigma_hi <= 4 * N;
    return rep;
}

}  // namespace torusdist
