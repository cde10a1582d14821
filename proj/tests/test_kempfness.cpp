#include "doctest.h"

#include "torusdist/kempf_ness.hpp"

using namespace torusdist;

namespace {

GaussianRational gr(long re, long im = 0) { return {Rat(re), Rat(im)}; }

TorusAction row_action(std::initializer_list<long> row) {
    IntMatrix M(1, row.size());
    std::size_t j = 0;
    for (long v : row) M.at(0, j++) = v;
    return TorusAction(M);
}

KnProblem symmetric_problem() {
    IntMatrix M(1, 2);
    M.at(0, 0) = 1;
    M.at(0, 1) = -1;
    return KnProblem(M, {Rat(1), Rat(1)});
}

// central finite differences of f for the gradient oracle
RatVector fd_gradient(const KnProblem& p, const RatVector& x, const Rat& h, long bits) {
    RatVector g(p.d());
    for (std::size_t k = 0; k < p.d(); ++k) {
        RatVector xp = x, xm = x;
        xp[k] += h;
        xm[k] -= h;
        Certified fp = kn_value(p, xp, pow2(-bits));
        Certified fm = kn_value(p, xm, pow2(-bits));
        g[k] = (fp.value - fm.value) / (2 * h);
    }
    return g;
}

}  // namespace

TEST_CASE("kn_value: worked examples") {
    KnProblem p = symmetric_problem();
    Certified f0 = kn_value(p, {Rat(0)}, pow2(-60));
    // f(0) = log 2
    Certified l2 = log2_const(80);
    CHECK(rat_abs(f0.value - l2.value) <= f0.err + l2.err);

    // all exponents zero: f = log(sum q_i)
    IntMatrix M(2, 3);
    M.at(0, 0) = 1;
    M.at(0, 1) = -1;
    M.at(1, 1) = 1;
    M.at(1, 2) = -1;
    KnProblem p2(M, {Rat(2), Rat(3), Rat(4)});
    Certified f2 = kn_value(p2, {Rat(0), Rat(0)}, pow2(-50));
    Certified l9 = log_rat(Rat(9), 80);
    CHECK(rat_abs(f2.value - l9.value) <= f2.err + l9.err);
}

TEST_CASE("kn_gradient and kn_hessian: symmetric point") {
    KnProblem p = symmetric_problem();
    auto g = kn_gradient(p, {Rat(0)}, pow2(-50));
    CHECK(g[0].value == 0);  // exact by symmetry
    auto H = kn_hessian(p, {Rat(0)}, pow2(-50));
    CHECK(rat_abs(H[0][0].value - 1) <= H[0][0].err);
}

TEST_CASE("kn_gradient matches central finite differences") {
    SplitMix64 rng(111);
    for (int it = 0; it < 12; ++it) {
        std::size_t d = static_cast<std::size_t>(rng.uniform(1, 3));
        std::size_t n = static_cast<std::size_t>(rng.uniform(d + 2, 6));
        IntMatrix M(d, n);
        RatVector q(n);
        do {
            for (auto& x : M.a) x = rng.uniform(-3, 3);
        } while (!weights_affinely_span(M));
        for (auto& x : q) x = rng.rat(1, 4, 3) + Rat(1, 4);
        KnProblem p(M, q);
        RatVector x(d);
        for (auto& c : x) c = rng.rat(-1, 1, 4);
        auto g = kn_gradient(p, x, pow2(-80));
        Rat h = pow2(-20);
        RatVector fd = fd_gradient(p, x, h, 90);
        Rat diff2 = 0, gn2 = 0;
        for (std::size_t k = 0; k < d; ++k) {
            Rat dg = fd[k] - g[k].value;
            diff2 += dg * dg;
            gn2 += g[k].value * g[k].value;
        }
        Rat floor = gn2 > 1 ? gn2 : Rat(1);
        CHECK(diff2 <= floor * pow2(-39));  // (1e-6)^2 ~ 2^-40 relative, floored at 1
    }
}

TEST_CASE("kn_hessian matches second finite differences") {
    IntMatrix M(2, 4);
    long w[2][4] = {{1, -1, 2, -2}, {1, -1, -1, 1}};
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 4; ++j) M.at(i, j) = w[i][j];
    KnProblem p(M, {Rat(1), Rat(2), Rat(1, 2), Rat(1)});
    RatVector x = {Rat(1, 5), Rat(-1, 7)};
    auto H = kn_hessian(p, x, pow2(-90));
    Rat h = pow2(-18);
    long bits = 110;
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) {
            RatVector xpp = x, xpm = x, xmp = x, xmm = x;
            xpp[i] += h; xpp[j] += h;
            xpm[i] += h; xpm[j] -= h;
            xmp[i] -= h; xmp[j] += h;
            xmm[i] -= h; xmm[j] -= h;
            Rat fd = (kn_value(p, xpp, pow2(-bits)).value - kn_value(p, xpm, pow2(-bits)).value -
                      kn_value(p, xmp, pow2(-bits)).value + kn_value(p, xmm, pow2(-bits)).value) /
                     (4 * h * h);
            CHECK(rat_abs(fd - H[i][j].value) <= pow2(-20));
        }
}

TEST_CASE("convexity witness: f(lerp) <= lerp(f) within certified error") {
    SplitMix64 rng(112);
    IntMatrix M(2, 4);
    long w[2][4] = {{1, -2, 1, 0}, {0, 1, -1, -1}};
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 4; ++j) M.at(i, j) = w[i][j];
    KnProblem p(M, {Rat(1), Rat(1), Rat(2), Rat(3)});
    for (int it = 0; it < 10; ++it) {
        RatVector x = {rng.rat(-2, 2, 3), rng.rat(-2, 2, 3)};
        RatVector y = {rng.rat(-2, 2, 3), rng.rat(-2, 2, 3)};
        Rat lam = rng.rat(1, 7, 8);
        if (lam <= 0 || lam >= 1) continue;
        RatVector mid = add(scale(lam, x), scale(1 - lam, y));
        Certified fm = kn_value(p, mid, pow2(-60));
        Certified fx = kn_value(p, x, pow2(-60));
        Certified fy = kn_value(p, y, pow2(-60));
        CHECK(fm.lo() <= lam * fx.hi() + (1 - lam) * fy.hi() + pow2(-50));
    }
}

TEST_CASE("gradient lies in the interior of the weight polytope") {
    IntMatrix M(2, 4);
    long w[2][4] = {{1, -2, -3, -3}, {0, 0, 1, -1}};
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 4; ++j) M.at(i, j) = w[i][j];
    KnProblem p(M, {Rat(1), Rat(1), Rat(1), Rat(1)});
    SplitMix64 rng(113);
    for (int it = 0; it < 8; ++it) {
        RatVector x = {rng.rat(-1, 1, 3), rng.rat(-1, 1, 3)};
        auto g = kn_gradient(p, x, pow2(-50));
        // exact LP on the corners of the certified gradient box
        for (int corner = 0; corner < 4; ++corner) {
            RatVector pt = {corner & 1 ? g[0].hi() : g[0].lo(),
                            corner & 2 ? g[1].hi() : g[1].lo()};
            CHECK(polytope_position(M, pt) == PolytopePosition::interior);
        }
    }
}

TEST_CASE("kn_minimize: symmetric problem and infeasibility") {
    KnProblem p = symmetric_problem();
    KnSolution s = kn_minimize(p, pow2(-40));
    CHECK(s.grad_norm <= pow2(-40));
    CHECK(rat_abs(s.x[0]) <= pow2(-30));  // x* = 0 by symmetry
    Certified l2 = log2_const(80);
    CHECK(rat_abs(s.f_value.value - l2.value) <= s.f_value.err + l2.err + pow2(-50));

    // 0 on the polytope boundary: explicit infeasibility
    IntMatrix M(1, 2);
    M.at(0, 0) = 0;
    M.at(0, 1) = 1;
    CHECK_THROWS_AS(kn_minimize(KnProblem(M, {Rat(1), Rat(1)}), Rat(1, 100)), ContractError);
}

TEST_CASE("kn_minimize: strict certified descent") {
    IntMatrix M(2, 4);
    long w[2][4] = {{1, -2, -4, -4}, {0, 0, 1, -1}};
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 4; ++j) M.at(i, j) = w[i][j];
    KnProblem p(M, {Rat(2), Rat(1), Rat(1), Rat(3)});
    KnSolution s = kn_minimize(p, pow2(-50));
    CHECK(s.grad_norm <= pow2(-50));
    // a coarse independent check: value at x is below the value at 0
    Certified f0 = kn_value(p, RatVector(2, Rat(0)), pow2(-60));
    CHECK(s.f_value.value <= f0.value + pow2(-40));
}

TEST_CASE("example_6_3: N = 9 worked example") {
    GaussVector v = {gr(1), gr(1), gr(1), gr(1)};
    GaussVector w = {gr(1), gr(1), gr(2), gr(2)};
    auto rep = example_6_3(9, v, w);
    CHECK(rep.bracket_ok);
    CHECK(rep.x2_small);
    CHECK(rep.gap_ok);
    CHECK(rep.unit_distance_ok);
    CHECK(rep.euclid_upper_ok);
    CHECK(rep.log_lower_ok);
    // e^{x1} in (cbrt2, (1 + 9/8) cbrt2): the solver's x1 ~ log(cbrt2 (1+eps))
    CHECK(rep.x[0] > 0);
    CHECK_THROWS_AS(example_6_3(2, v, w), ContractError);
}

TEST_CASE("example_6_3: N = 3 loose brackets") {
    GaussVector v = {gr(1), gr(1), gr(1), gr(1)};
    GaussVector w = {gr(1), gr(1), gr(2), gr(2)};
    auto rep = example_6_3(3, v, w);
    CHECK(rep.bracket_ok);
    CHECK(rep.x2_small);
    CHECK(rep.gap_ok);
    CHECK(rep.log_lower_ok);
}

TEST_CASE("kn_orbit_equal: agrees with orbit_equal_T on closed orbits") {
    TorusAction hyper = row_action({1, -1});
    SepBound sep(Rat(1, 100));
    auto same = kn_orbit_equal(hyper, {gr(1), gr(1)}, {gr(1), gr(1)}, sep);
    CHECK(same.equal);
    auto conj = kn_orbit_equal(hyper, {gr(1), gr(1)}, {gr(2), {Rat(1, 2), Rat(0)}}, sep);
    CHECK(conj.equal);
    auto diff = kn_orbit_equal(hyper, {gr(1), gr(1)}, {gr(2), gr(1)}, sep);
    CHECK(!diff.equal);
    CHECK(diff.heuristic_x_accuracy);

    // scaling action: orbit not closed -> infeasibility
    TorusAction scale = row_action({1, 1});
    CHECK_THROWS_AS(kn_orbit_equal(scale, {gr(1), gr(1)}, {gr(1), gr(1)}, sep), ContractError);
}

TEST_CASE("example_6_3: N = 45 beyond the acceptance range") {
    GaussVector v = {gr(1), gr(1), gr(1), gr(1)};
    GaussVector w = {gr(1), gr(1), gr(2), gr(2)};
    auto rep = example_6_3(45, v, w);
    CHECK(rep.bracket_ok);
    CHECK(rep.x2_small);
    CHECK(rep.gap_ok);
    CHECK(rep.euclid_upper_ok);
    CHECK(rep.log_lower_ok);
}
