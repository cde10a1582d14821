#pragma once

// Acceptance suite: one deterministic, seeded check per headline property,
// shared by the standalone test binary and the CLI `verify` subcommand.
// Every tolerance is pinned here; comparisons are exact rational or
// Sturm-certified wherever the quantity allows it.

#include <chrono>
#include <functional>
#include <ostream>
#include <sstream>

#include "torusdist/json_io.hpp"

namespace torusdist::acceptance {

struct CriterionResult {
    int index;
    std::string name;
    bool passed;
    std::string detail;
    double seconds;
};

namespace detail {

using torusdist::detail::as_exact;

inline IntMatrix random_invertible(SplitMix64& rng, std::size_t m, long lo, long hi) {
    IntMatrix G(m, m);
    do {
        for (auto& x : G.a) x = rng.uniform(lo, hi);
    } while (det(G) == 0);
    return G;
}

inline std::vector<IntVector> unitriangular_rows(std::size_t n, std::size_t r, SplitMix64& rng) {
    std::vector<IntVector> rows;
    for (std::size_t i = 0; i < r; ++i) {
        IntVector u(n, Int(0));
        u[i] = 1;
        if (i + 1 < n) {
            std::size_t j =
                static_cast<std::size_t>(rng.uniform(static_cast<long>(i) + 1, static_cast<long>(n) - 1));
            u[j] = rng.uniform(-2, 2);
        }
        rows.push_back(u);
    }
    return rows;
}

// x + y pi^2 >= 0, decided exactly (pi^2 irrational: zero iff x = y = 0).
inline bool pi2_linear_nonneg(const Rat& x, const Rat& y) {
    if (y == 0) return x >= 0;
    if (x == 0) return y >= 0;
    for (long bits = 64; bits <= (1L << 16); bits *= 2) {
        Certified pi = pi_const(bits);
        Rat p2lo = pi.lo() * pi.lo(), p2hi = pi.hi() * pi.hi();
        Rat lo = x + y * (y > 0 ? p2lo : p2hi);
        Rat hi = x + y * (y > 0 ? p2hi : p2lo);
        if (lo > 0) return true;
        if (hi < 0) return false;
    }
    throw ContractError("pi2_linear_nonneg: refinement failed to separate");
}

// lambda_min(H H^T) <= c and lambda_max(H H^T) >= c, both exact via Sturm.
struct GramSturm {
    RatPoly sf;
    std::vector<RatPoly> chain;
    Rat ub;

    explicit GramSturm(const IntMatrix& H) {
        IntMatrix G = H * H.transpose();
        sf = squarefree_part(char_poly(G));
        chain = sturm_chain(sf);
        ub = Rat(Int(H.cols) * H.max_abs());
        ub = ub * ub + 1;
    }
    bool lambda_min_leq(const Rat& c) const {
        if (c <= 0) return false;
        return count_roots_in(chain, Rat(0), c) >= 1;
    }
    bool lambda_max_geq(const Rat& c) const {
        if (c > ub) return false;
        return count_roots_in(chain, c, ub) >= 1 || poly_eval(sf, c) == 0;
    }
};

using Check = std::function<bool(std::ostream&)>;

inline CriterionResult run_one(int index, const std::string& name, const Check& body) {
    auto t0 = std::chrono::steady_clock::now();
    std::ostringstream detail;
    bool ok = false;
    try {
        ok = body(detail);
    } catch (const std::exception& e) {
        ok = false;
        detail << "exception: " << e.what();
    }
    auto t1 = std::chrono::steady_clock::now();
    return {index, name, ok, detail.str(), std::chrono::duration<double>(t1 - t0).count()};
}

}  // namespace detail

// 1. Lattice lifting exactness: 100 random G, m <= 4, entries in [-10, 10],
//    Y Y^T = I_n exactly and s_total P(Y Z^n) = G(Z^m) by HNF equality.
inline CriterionResult criterion_lifting(unsigned seed) {
    return detail::run_one(1, "lattice lifting exactness (Y Y^T = I, HNF lattice equality)",
                           [&](std::ostream& out) {
        SplitMix64 rng(seed ^ 0x1111);
        for (int it = 0; it < 100; ++it) {
            std::size_t m = static_cast<std::size_t>(it % 4 + 1);
            IntMatrix G = detail::random_invertible(rng, m, -10, 10);
            LiftResult l = lift_lattice(G);
            if (!has_orthonormal_rows(l.Y)) {
                out << "Y Y^T != I at instance " << it;
                return false;
            }
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j < l.n; ++j)
                    if (l.Y.at(i, j) * Rat(l.s_total) != Rat(l.X.at(i, j))) {
                        out << "s_total * P(Y) != X at instance " << it;
                        return false;
                    }
            if (!same_column_lattice(l.X, G)) {
                out << "HNF lattice mismatch at instance " << it;
                return false;
            }
        }
        out << "100 instances, m in 1..4, entries in [-10,10]";
        return true;
    });
}

// 2. CVP -> SLDP distance preservation: exact rational identity
//    dist^2(t, L) = s_total^2 dist^2(t' + U, Z^n), both sides by exact enumeration.
inline CriterionResult criterion_cvp_to_sldp(unsigned seed) {
    return detail::run_one(2, "CVP->SLDP exact distance preservation",
                           [&](std::ostream& out) {
        SplitMix64 rng(seed ^ 0x2222);
        for (int it = 0; it < 50; ++it) {
            std::size_t m = static_cast<std::size_t>(it % 3 + 1);
            IntMatrix G = detail::random_invertible(rng, m, -10, 10);
            RatVector t(m);
            for (auto& x : t) x = rng.rat(-20, 20, 9);
            CvpInstance inst(t, G);
            Rat lhs = cvp_exact(inst).second;
            auto red_out = cvp_to_sldp(inst);
            const auto& red = std::get<CvpToSldp>(red_out);
            auto side = sldp_exact(red.instance, kDefaultEnumGuard, &red.complement);
            if (Rat(red.s_total * red.s_total) * *side.estimate.squared_exact != lhs) {
                out << "identity violated at instance " << it;
                return false;
            }
        }
        out << "50 instances, m in 1..3, zero tolerance";
        return true;
    });
}

// 3. SLDP sandwich: d <= D <= gamma d with gamma = 2 sigma_max/sigma_min
//    (h backend, Sturm-certified) and gamma = 2^{n/2+1} (LLL backend, exact
//    rational); witness residual <= gamma d.
inline CriterionResult criterion_sldp_sandwich(unsigned seed) {
    return detail::run_one(3, "SLDP sandwich and witness soundness",
                           [&](std::ostream& out) {
        SplitMix64 rng(seed ^ 0x3333);
        for (int it = 0; it < 200; ++it) {
            std::size_t n = static_cast<std::size_t>(it % 6 + 1);
            std::size_t r = static_cast<std::size_t>(rng.uniform(0, static_cast<long>(n) - 1));
            auto U = detail::unitriangular_rows(n, r, rng);
            RatVector t(n);
            for (auto& x : t) x = rng.rat(-15, 15, 11);
            SldpInstance inst(t, U);
            Rat d2 = *sldp_exact(inst).estimate.squared_exact;

            auto h = sldp_h_based(inst);
            if (h.estimate.D * h.estimate.D < d2) {
                out << "h-backend lower violation at " << it;
                return false;
            }
            auto l = sldp_lll(inst);
            if (l.estimate.D * l.estimate.D < d2) {
                out << "lll lower violation at " << it;
                return false;
            }
            if (l.estimate.D * l.estimate.D > pow2(static_cast<long>(n) + 2) * d2) {
                out << "lll upper violation at " << it;
                return false;
            }
            if (l.witness.residual2 > pow2(static_cast<long>(n) + 2) * d2) {
                out << "lll witness violation at " << it;
                return false;
            }
            if (d2 == 0) {
                if (h.estimate.D != 0 || l.estimate.D != 0) {
                    out << "zero-distance detection failed at " << it;
                    return false;
                }
                continue;
            }
            // h backend, gamma = 2 sigma_max / sigma_min via exact Sturm facts:
            //   lambda_min <= 4 T^2 / D^2  (=> D^2 <= 4 T^2 / lambda_min)
            //   lambda_max >= T^2 / d2     (=> T^2 <= lambda_max d2)
            IntMatrix M(U.size(), n);
            for (std::size_t i = 0; i < U.size(); ++i)
                for (std::size_t j = 0; j < n; ++j) M.at(i, j) = U[i][j];
            IntMatrix H = U.empty() ? IntMatrix::identity(n) : kernel_lattice_basis(M);
            RatVector Ht = H.mul_vec(t);
            Rat T2 = 0;
            for (const auto& x : Ht) {
                Rat f = dist_to_Z(x);
                T2 += f * f;
            }
            detail::GramSturm gs(H);
            if (!gs.lambda_min_leq(4 * T2 / (h.estimate.D * h.estimate.D))) {
                out << "h-backend upper certification failed at " << it;
                return false;
            }
            if (!gs.lambda_max_geq(T2 / d2)) {
                out << "h-backend T^2 <= lambda_max d^2 failed at " << it;
                return false;
            }
            // witness: residual^2 lambda_min <= T^2 and T^2 <= lambda_max d2
            // give residual <= (sigma_max/sigma_min) d <= gamma d
            if (h.witness.residual2 > 0 &&
                !gs.lambda_min_leq(T2 / h.witness.residual2)) {
                out << "h-backend witness certification failed at " << it;
                return false;
            }
        }
        out << "200 instances, n <= 6, exact squared comparisons";
        return true;
    });
}

// 4. Linear-forms sandwich lo Delta_T <= Delta(H eta, H zeta) <= hi Delta_T,
//    decided exactly on a + b pi^2 forms (precision doubles on overlap).
inline CriterionResult criterion_linear_forms(unsigned seed) {
    return detail::run_one(4, "linear-forms sandwich (sigma bounds vs H-distance)",
                           [&](std::ostream& out) {
        SplitMix64 rng(seed ^ 0x4444);
        int done = 0;
        for (int it = 0; done < 100; ++it) {
            if (it > 2000) {
                out << "instance generation starved";
                return false;
            }
            std::size_t n = static_cast<std::size_t>(it % 5 + 1);
            std::size_t d = static_cast<std::size_t>(rng.uniform(1, 2));
            IntMatrix M(d, n);
            for (auto& x : M.a) x = rng.uniform(-3, 3);
            TorusAction action(M);
            InvariantMatrix inv = invariant_matrix(action);
            if (inv.k() == 0) continue;
            auto sb = sigma_bounds(inv.H);
            RatVector r1(n), t1(n), r2(n), t2(n);
            for (auto& x : r1) x = rng.rat(-4, 4, 5);
            for (auto& x : t1) x = rng.rat(0, 6, 7);
            for (auto& x : r2) x = rng.rat(-4, 4, 5);
            for (auto& x : t2) x = rng.rat(0, 6, 7);
            QuotientPoint p(r1, t1), q(r2, t2);
            auto od = delta_orbit(action, p, q, Group::T, SldpBackend::exact);
            DeltaParts hp = h_distance_parts(inv, p, q);
            Rat dt_a = od.real_part_sq, dt_s = *od.imag_sq_exact;
            if (!detail::pi2_linear_nonneg(sb.hi * sb.hi * dt_a - hp.a,
                                           4 * (sb.hi * sb.hi * dt_s - hp.s))) {
                out << "upper sandwich violated at " << it;
                return false;
            }
            if (!detail::pi2_linear_nonneg(hp.a - sb.lo * sb.lo * dt_a,
                                           4 * (hp.s - sb.lo * sb.lo * dt_s))) {
                out << "lower sandwich violated at " << it;
                return false;
            }
            ++done;
        }
        out << "100 instances, n <= 5, exact pi^2-linear comparisons";
        return true;
    });
}

// 5. Metric equivalence (2/pi) Delta <= ||v - w|| <= Delta on unit-modulus
//    pairs: conservative certified margins, quarter-turn corners exact.
inline CriterionResult criterion_metric_equivalence(unsigned seed) {
    return detail::run_one(5, "metric equivalence on unit-modulus pairs",
                           [&](std::ostream& out) {
        SplitMix64 rng(seed ^ 0x5555);
        auto circle_point = [](const Rat& t) -> GaussianRational {
            Rat d = 1 + t * t;
            return {(1 - t * t) / d, 2 * t / d};
        };
        for (int it = 0; it < 100; ++it) {
            std::size_t n = static_cast<std::size_t>(it % 3 + 1);
            GaussVector v(n), w(n);
            for (std::size_t j = 0; j < n; ++j) {
                v[j] = circle_point(rng.rat(-9, 9, 7));
                // sprinkle exact corner cases
                if (it % 10 == 0)
                    w[j] = (it % 20 == 0) ? -v[j] : v[j];
                else
                    w[j] = circle_point(rng.rat(-9, 9, 7));
            }
            Rat dist2 = 0;
            for (std::size_t j = 0; j < n; ++j) dist2 += (v[j] - w[j]).norm2();
            bool settled = false;
            for (long bits = 96; bits <= 4096 && !settled; bits *= 2) {
                Rat s_lo = 0, s_hi = 0;
                for (std::size_t j = 0; j < n; ++j) {
                    GaussianRational u = v[j] / w[j];
                    Rat dlo, dhi;
                    if (u == GaussianRational(1)) {
                        dlo = dhi = 0;
                    } else if (u == GaussianRational(Rat(-1), Rat(0))) {
                        dlo = dhi = Rat(1, 2);
                    } else if (u == GaussianRational(Rat(0), Rat(1)) ||
                               u == GaussianRational(Rat(0), Rat(-1))) {
                        dlo = dhi = Rat(1, 4);
                    } else {
                        Certified a = arg_turns(u, bits);
                        Rat d1 = dist_to_Z(a.lo()), d2 = dist_to_Z(a.hi());
                        dlo = d1 < d2 ? d1 : d2;
                        dhi = d1 < d2 ? d2 : d1;
                        if (rat_floor(2 * a.lo()) != rat_floor(2 * a.hi())) {
                            if (dlo > 0) dlo = 0;
                            dhi = Rat(1, 2);
                        }
                    }
                    s_lo += dlo * dlo;
                    s_hi += dhi * dhi;
                }
                // lower: 16 s <= ||v-w||^2 (pi cancels); upper: ||v-w||^2 <= 4 pi^2 s
                Certified pi = pi_const(bits);
                bool lower_ok = 16 * s_hi <= dist2;
                bool upper_ok = dist2 <= 4 * pi.lo() * pi.lo() * s_lo;
                if (dist2 == 0) upper_ok = s_lo == 0 || upper_ok;
                if (lower_ok && upper_ok) settled = true;
            }
            if (!settled) {
                out << "certified margins failed to settle at " << it;
                return false;
            }
        }
        out << "100 unit-modulus pairs, n <= 3";
        return true;
    });
}

// 6. Orbit-equality consistency across orbit_equal_T/K, rop_logdist_T
//    (D = 0 iff equal) and kn_orbit_equal (closed-orbit cases).
inline CriterionResult criterion_orbit_equality(unsigned seed) {
    return detail::run_one(6, "orbit equality consistency (30 curated cases)",
                           [&](std::ostream& out) {
        (void)seed;
        auto gr = [](long re, long im = 0) { return GaussianRational(Rat(re), Rat(im)); };
        auto grq = [](Rat re, Rat im = Rat(0)) {
            return GaussianRational(std::move(re), std::move(im));
        };
        struct Case {
            IntMatrix M;
            GaussVector v, w;
            bool equal_T;
            bool equal_K;
        };
        auto row = [](std::initializer_list<long> vals) {
            IntMatrix m(1, vals.size());
            std::size_t j = 0;
            for (long v : vals) m.at(0, j++) = v;
            return m;
        };
        std::vector<Case> cases;
        IntMatrix scale = row({1, 1});   // Fig 1(a): lines through the origin
        IntMatrix hyper = row({1, -1});  // Fig 1(b): hyperbolas
        IntMatrix dbl = row({2, -2});
        // scaling family
        cases.push_back({scale, {gr(1), gr(2)}, {gr(2), gr(4)}, true, false});
        cases.push_back({scale, {gr(1), gr(2)}, {gr(3), gr(6)}, true, false});
        cases.push_back({scale, {gr(1), gr(2)}, {gr(1), gr(3)}, false, false});
        cases.push_back({scale, {gr(1), gr(1)}, {gr(0, 1), gr(0, 1)}, true, true});
        cases.push_back({scale, {gr(2), gr(2)}, {gr(0, 2), gr(0, 2)}, true, true});
        cases.push_back({scale, {gr(1), gr(1)}, {gr(1), gr(-1)}, false, false});
        cases.push_back({scale, {gr(1), gr(2)}, {grq(Rat(1, 2)), gr(1)}, true, false});
        cases.push_back({scale, {gr(3), gr(5)}, {gr(3), gr(5)}, true, true});
        // hyperbola family (closed orbits)
        cases.push_back({hyper, {gr(1), gr(1)}, {gr(2), grq(Rat(1, 2))}, true, false});
        cases.push_back({hyper, {gr(1), gr(1)}, {gr(2), gr(1)}, false, false});
        cases.push_back({hyper, {gr(1), gr(1)}, {gr(2), gr(2)}, false, false});
        cases.push_back({hyper, {gr(1), gr(1)}, {gr(1), gr(1)}, true, true});
        cases.push_back({hyper, {gr(1), gr(1)}, {gr(0, 1), grq(Rat(0), Rat(-1))}, true, true});
        cases.push_back({hyper, {gr(2), gr(3)}, {gr(3), gr(2)}, true, false});
        cases.push_back({hyper, {gr(2), gr(3)}, {gr(6), gr(1)}, true, false});
        cases.push_back({hyper, {gr(2), gr(3)}, {gr(1), gr(5)}, false, false});
        cases.push_back({hyper, {grq(Rat(1, 2)), gr(4)}, {gr(1), gr(2)}, true, false});
        cases.push_back({hyper, {gr(1), gr(4)}, {gr(2), gr(2)}, true, false});
        cases.push_back({hyper, {gr(-1), gr(1)}, {gr(1), gr(-1)}, true, true});
        cases.push_back({hyper, {gr(1), gr(1)}, {gr(-1), gr(-1)}, true, true});
        cases.push_back({dbl, {gr(1), gr(1)}, {gr(3), grq(Rat(1, 3))}, true, false});
        cases.push_back({dbl, {gr(1), gr(1)}, {gr(3), gr(3)}, false, false});
        // d = 2 family: invariant x1 x2 x3
        IntMatrix two(2, 3);
        two.at(0, 0) = 1; two.at(0, 1) = -1; two.at(0, 2) = 0;
        two.at(1, 0) = 0; two.at(1, 1) = 1;  two.at(1, 2) = -1;
        cases.push_back({two, {gr(1), gr(1), gr(1)}, {gr(2), gr(1), grq(Rat(1, 2))}, true, false});
        cases.push_back({two, {gr(1), gr(1), gr(1)}, {gr(2), gr(1), gr(1)}, false, false});
        cases.push_back({two, {gr(1), gr(2), gr(3)}, {gr(3), gr(2), gr(1)}, true, false});
        cases.push_back({two, {gr(1), gr(2), gr(3)}, {gr(1), gr(2), gr(-3)}, false, false});
        // full-rank invariant-free action: single dense orbit
        IntMatrix eye = IntMatrix::identity(2);
        cases.push_back({eye, {gr(1), gr(1)}, {gr(5), gr(-7)}, true, false});
        cases.push_back({eye, {gr(1), gr(1)}, {gr(0, 1), gr(1)}, true, true});
        cases.push_back({eye, {gr(2), gr(1)}, {gr(0, 2), gr(0, 1)}, true, true});
        cases.push_back({eye, {gr(2), gr(1)}, {gr(1), gr(1)}, true, false});
        if (cases.size() != 30) {
            out << "curated set has " << cases.size() << " cases";
            return false;
        }
        SepBound sep(Rat(1, 100));  // all curated distinct pairs are far apart
        int kn_checked = 0;
        for (std::size_t i = 0; i < cases.size(); ++i) {
            const Case& c = cases[i];
            TorusAction action(c.M);
            bool eT = orbit_equal_T(action, c.v, c.w);
            bool eK = orbit_equal_K(action, c.v, c.w);
            if (eT != c.equal_T || eK != c.equal_K) {
                out << "orbit_equal mismatch at case " << i;
                return false;
            }
            DistanceEstimate e = rop_logdist_T(action, c.v, c.w, sep, SldpBackend::h_based);
            if ((e.D == 0) != c.equal_T) {
                out << "rop_logdist_T zero-iff-equal mismatch at case " << i;
                return false;
            }
            if (polytope_origin_position(action) == PolytopePosition::interior) {
                auto kn = kn_orbit_equal(action, c.v, c.w, sep, SldpBackend::h_based);
                if (kn.equal != c.equal_T) {
                    out << "kn_orbit_equal mismatch at case " << i;
                    return false;
                }
                ++kn_checked;
            }
        }
        out << "30 cases; " << kn_checked << " closed-orbit Kempf-Ness decisions";
        return true;
    });
}

// 7. Example family: minimizer bracket, |x2| <= 1e-12, the f-gap bound, the
//    2^{7/3} eps_N Euclidean upper bound and the log2/(2N) lower bound.
inline CriterionResult criterion_example63(unsigned seed) {
    return detail::run_one(7, "example family N in 6..30 (brackets, gap, distance bounds)",
                           [&](std::ostream& out) {
        (void)seed;
        GaussVector v = {GaussianRational(1), GaussianRational(1), GaussianRational(1),
                         GaussianRational(1)};
        GaussVector w = {GaussianRational(1), GaussianRational(1), GaussianRational(Rat(2), Rat(0)),
                         GaussianRational(Rat(2), Rat(0))};
        for (long N = 6; N <= 30; ++N) {
            auto rep = example_6_3(N, v, w);
            if (!rep.bracket_ok) {
                out << "minimizer bracket failed at N = " << N;
                return false;
            }
            if (!rep.x2_small) {
                out << "|x2| > 1e-12 at N = " << N;
                return false;
            }
            if (!rep.gap_ok) {
                out << "f-gap bound failed at N = " << N;
                return false;
            }
            if (!rep.unit_distance_ok) {
                out << "||(x1,1) - x*|| != 1 at N = " << N;
                return false;
            }
            if (!rep.euclid_upper_ok) {
                out << "Euclidean 2^{7/3} eps_N bound failed at N = " << N;
                return false;
            }
            if (!rep.log_lower_ok) {
                out << "log2/(2N) lower bound failed at N = " << N;
                return false;
            }
        }
        out << "N = 6..30, all checks certified";
        return true;
    });
}

// 8. Gradient and Hessian against central finite differences,
//    ||diff|| <= 1e-6 max(||analytic||, 1).
inline CriterionResult criterion_derivatives(unsigned seed) {
    return detail::run_one(8, "derivative checks vs central finite differences",
                           [&](std::ostream& out) {
        SplitMix64 rng(seed ^ 0x8888);
        Rat tol2 = make_rat(1, Int(1000000000000L));  // (1e-6)^2
        int done = 0;
        for (int it = 0; done < 50; ++it) {
            if (it > 500) {
                out << "instance generation starved";
                return false;
            }
            std::size_t d = static_cast<std::size_t>(rng.uniform(1, 4));
            std::size_t n = static_cast<std::size_t>(rng.uniform(d + 2, 8));
            IntMatrix M(d, n);
            for (auto& x : M.a) x = rng.uniform(-3, 3);
            if (!weights_affinely_span(M)) continue;
            RatVector q(n);
            for (auto& x : q) x = rng.rat(1, 4, 3) + Rat(1, 4);
            KnProblem p(M, q);
            RatVector x(d);
            for (auto& c : x) c = rng.rat(-1, 1, 4);
            Rat h = pow2(-20);
            long bits = 100;
            auto g = kn_gradient(p, x, pow2(-80));
            Rat diff2 = 0, gn2 = 0;
            for (std::size_t k = 0; k < d; ++k) {
                RatVector xp = x, xm = x;
                xp[k] += h;
                xm[k] -= h;
                Rat fd = (kn_value(p, xp, pow2(-bits)).value - kn_value(p, xm, pow2(-bits)).value) /
                         (2 * h);
                Rat dd = fd - g[k].value;
                diff2 += dd * dd;
                gn2 += g[k].value * g[k].value;
            }
            Rat floor_g = gn2 > 1 ? gn2 : Rat(1);
            if (diff2 > tol2 * floor_g) {
                out << "gradient FD mismatch at instance " << done;
                return false;
            }
            auto H = kn_hessian(p, x, pow2(-90));
            Rat hdiff2 = 0, hn2 = 0;
            for (std::size_t i = 0; i < d; ++i)
                for (std::size_t j = 0; j < d; ++j) {
                    RatVector xpp = x, xpm = x, xmp = x, xmm = x;
                    xpp[i] += h; xpp[j] += h;
                    xpm[i] += h; xpm[j] -= h;
                    xmp[i] -= h; xmp[j] += h;
                    xmm[i] -= h; xmm[j] -= h;
                    Rat fd = (kn_value(p, xpp, pow2(-bits)).value -
                              kn_value(p, xpm, pow2(-bits)).value -
                              kn_value(p, xmp, pow2(-bits)).value +
                              kn_value(p, xmm, pow2(-bits)).value) /
                             (4 * h * h);
                    Rat dd = fd - H[i][j].value;
                    hdiff2 += dd * dd;
                    hn2 += H[i][j].value * H[i][j].value;
                }
            Rat floor_h = hn2 > 1 ? hn2 : Rat(1);
            if (hdiff2 > tol2 * floor_h) {
                out << "Hessian FD mismatch at instance " << done;
                return false;
            }
            ++done;
        }
        out << "50 problems, d <= 4, n <= 8, relative error <= 1e-6";
        return true;
    });
}

// 9. Sum of squares: exhaustive exactness for D <= 10^6 with the length bound
//    k <= ceil(log2 log2 D) + 4, plus 10^6 random D <= 10^18.
inline CriterionResult criterion_sum_of_squares(unsigned seed) {
    return detail::run_one(9, "greedy sum of squares (exhaustive 1e6 + random 1e18)",
                           [&](std::ostream& out) {
        auto length_bound = [](const Int& D) {
            long l2 = static_cast<long>(mpz_sizeinbase(D.get_mpz_t(), 2));
            long ll = 0;
            while ((1L << ll) < l2) ++ll;
            return ll + 4;
        };
        for (long D = 0; D <= 1000000; ++D) {
            auto a = sum_of_squares(Int(D));
            Int s = 0;
            for (const auto& x : a) s += x * x;
            if (s != D) {
                out << "sum mismatch at D = " << D;
                return false;
            }
            if (D >= 2 && static_cast<long>(a.size()) > length_bound(Int(D))) {
                out << "length bound violated at D = " << D;
                return false;
            }
        }
        SplitMix64 rng(seed ^ 0x9999);
        for (long it = 0; it < 1000000; ++it) {
            Int D = Int(rng.uniform(0, 999999999)) * Int(1000000000) + Int(rng.uniform(0, 999999999));
            auto a = sum_of_squares(D);
            Int s = 0;
            for (const auto& x : a) s += x * x;
            if (s != D) {
                out << "sum mismatch on random draw " << it;
                return false;
            }
            if (D >= 2 && static_cast<long>(a.size()) > length_bound(D)) {
                out << "length bound violated on random draw " << it;
                return false;
            }
        }
        out << "exhaustive D <= 1e6 and 1e6 random D <= 1e18";
        return true;
    });
}

// 10. Waring decomposition: sum l_i l_i^T = A exactly, N within the bound.
inline CriterionResult criterion_waring(unsigned seed) {
    return detail::run_one(10, "Waring decomposition exactness and size bound",
                           [&](std::ostream& out) {
        SplitMix64 rng(seed ^ 0xaaaa);
        auto length_bound = [](const Int& D) {
            if (D < 2) return 1L;
            long l2 = static_cast<long>(mpz_sizeinbase(D.get_mpz_t(), 2));
            long ll = 0;
            while ((1L << ll) < l2) ++ll;
            return ll + 4;
        };
        for (int it = 0; it < 200; ++it) {
            std::size_t m = static_cast<std::size_t>(it % 6 + 1);
            RatMatrix B(m, m);
            for (auto& x : B.a) x = rng.rat(-5, 5, 4);
            RatMatrix A = mul(B.transpose(), B);
            for (std::size_t i = 0; i < m; ++i) A.at(i, i) += rng.rat(1, 3, 2) + 1;
            auto war = waring_decompose(A);
            RatMatrix S(m, m);
            for (const auto& l : war.ls)
                for (std::size_t i = 0; i < m; ++i)
                    for (std::size_t j = 0; j < m; ++j) S.at(i, j) += l[i] * l[j];
            if (!(S == A)) {
                out << "sum of outer products mismatch at " << it;
                return false;
            }
            if (static_cast<long>(war.ls.size()) >
                static_cast<long>(m) * length_bound(war.d_max)) {
                out << "N bound violated at " << it;
                return false;
            }
        }
        out << "200 random positive definite A, m <= 6, zero tolerance";
        return true;
    });
}

// 11. Reduction round trips: back-mapped ROP answers sandwich sldp_exact
//     within the composed, explicitly reported factors.
inline CriterionResult criterion_reduction_roundtrip(unsigned seed) {
    return detail::run_one(11, "SLDP->ROP reduction round trips (all four settings)",
                           [&](std::ostream& out) {
        SplitMix64 rng(seed ^ 0xbbbb);
        struct Setting {
            Group g;
            RopMetric m;
        };
        const Setting settings[4] = {{Group::T, RopMetric::delta},
                                     {Group::K, RopMetric::delta},
                                     {Group::T, RopMetric::logdist},
                                     {Group::K, RopMetric::euclid}};
        for (int it = 0; it < 100; ++it) {
            std::size_t n = static_cast<std::size_t>(it % 4 + 1);
            std::size_t r = static_cast<std::size_t>(rng.uniform(0, static_cast<long>(n) - 1));
            auto U = detail::unitriangular_rows(n, r, rng);
            RatVector t(n);
            for (auto& x : t) x = rng.rat(-6, 6, 5);
            SldpInstance inst(t, U);
            Rat d2 = *sldp_exact(inst).estimate.squared_exact;
            const Setting& s = settings[it % 4];
            auto red = reduce_sldp_to_rop(inst, s.g, s.m);
            auto ans = solve_reduced_rop(red, SldpBackend::h_based);
            if (d2 == 0) {
                if (ans.D_backmapped != 0) {
                    out << "nonzero back-map on a zero instance at " << it;
                    return false;
                }
                continue;
            }
            // composed factor: back map contributes at most 2x over gamma_rop
            if (ans.D_backmapped * ans.D_backmapped < d2) {
                out << "back-mapped lower violation at " << it;
                return false;
            }
            if (ans.D_backmapped * ans.D_backmapped > 4 * ans.gamma_rop * ans.gamma_rop * d2) {
                out << "back-mapped upper violation at " << it;
                return false;
            }
        }
        out << "100 instances, n <= 4, factors reported by the estimates";
        return true;
    });
}

inline std::vector<CriterionResult> run_all(unsigned seed = 20240817,
                                            std::ostream* progress = nullptr) {
    std::vector<CriterionResult> results;
    auto push = [&](CriterionResult r) {
        if (progress) {
            (*progress) << "criterion " << r.index << " [" << (r.passed ? "PASS" : "FAIL") << "] "
                        << r.name << " (" << r.detail << ", " << r.seconds << " s)\n";
            progress->flush();
        }
        results.push_back(std::move(r));
    };
    push(criterion_lifting(seed));
    push(criterion_cvp_to_sldp(seed));
    push(criterion_sldp_sandwich(seed));
    push(criterion_linear_forms(seed));
    push(criterion_metric_equivalence(seed));
    push(criterion_orbit_equality(seed));
    push(criterion_example63(seed));
    push(criterion_derivatives(seed));
    push(criterion_sum_of_squares(seed));
    push(criterion_waring(seed));
    push(criterion_reduction_roundtrip(seed));
    return results;
}

}  // namespace torusdist::acceptance
