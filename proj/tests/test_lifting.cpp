#include "doctest.h"

#include "torusdist/lifting.hpp"

using namespace torusdist;

namespace {

IntMatrix make(std::size_t r, std::size_t c, std::initializer_list<long> vals) {
    IntMatrix m(r, c);
    std::size_t i = 0;
    for (long v : vals) m.a[i++] = v;
    return m;
}

RatMatrix rmake(std::size_t r, std::size_t c, std::initializer_list<Rat> vals) {
    RatMatrix m(r, c);
    std::size_t i = 0;
    for (const Rat& v : vals) m.a[i++] = v;
    return m;
}

RatMatrix sum_outer(const std::vector<RatVector>& ls, std::size_t m) {
    RatMatrix S(m, m);
    for (const auto& l : ls)
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j) S.at(i, j) += l[i] * l[j];
    return S;
}

RatMatrix random_pd(SplitMix64& rng, std::size_t m) {
    // B^T B + diag(positive) is symmetric positive definite
    RatMatrix B(m, m);
    for (auto& x : B.a) x = rng.rat(-4, 4, 3);
    RatMatrix A = mul(B.transpose(), B);
    for (std::size_t i = 0; i < m; ++i) A.at(i, i) += rng.rat(1, 3, 2) + 1;
    return A;
}

long sos_length_bound(const Int& D) {
    // ceil(log2 log2 D) + 4 for D >= 2
    if (D < 2) return 1;
    long l2 = static_cast<long>(mpz_sizeinbase(D.get_mpz_t(), 2));
    long ll = 0;
    while ((1L << ll) < l2) ++ll;
    return ll + 4;
}

}  // namespace

TEST_CASE("sum_of_squares: worked examples and exactness") {
    CHECK(sum_of_squares(Int(0)).empty());
    CHECK(sum_of_squares(Int(12)) == std::vector<Int>{Int(3), Int(1), Int(1), Int(1)});
    CHECK(sum_of_squares(Int(1000000)) == std::vector<Int>{Int(1000)});

    SplitMix64 rng(4);
    for (long D = 0; D <= 10000; ++D) {
        auto a = sum_of_squares(Int(D));
        Int s = 0;
        for (const auto& x : a) s += x * x;
        CHECK(s == D);
        if (D >= 2) CHECK(static_cast<long>(a.size()) <= sos_length_bound(Int(D)));
    }
    for (int it = 0; it < 2000; ++it) {
        Int D = Int(rng.uniform(0, 1000000000)) * Int(rng.uniform(1, 1000000000));
        auto a = sum_of_squares(D);
        Int s = 0;
        for (const auto& x : a) s += x * x;
        CHECK(s == D);
        if (D >= 2) CHECK(static_cast<long>(a.size()) <= sos_length_bound(D));
    }
}

TEST_CASE("lagrange_diagonalize: worked examples") {
    auto r1 = lagrange_diagonalize(RatMatrix::identity(2));
    CHECK(r1.Q == IntMatrix::identity(2));
    CHECK(r1.d == std::vector<Rat>{Rat(1), Rat(1)});

    auto r2 = lagrange_diagonalize(rmake(2, 2, {Rat(2), Rat(1), Rat(1), Rat(2)}));
    CHECK(r2.Q == make(2, 2, {1, 0, -1, 2}));
    CHECK(r2.d == std::vector<Rat>{Rat(2), Rat(6)});
    RatMatrix QAQ = mul(mul(RatMatrix(r2.Q), rmake(2, 2, {Rat(2), Rat(1), Rat(1), Rat(2)})),
                        RatMatrix(r2.Q).transpose());
    CHECK(QAQ == rmake(2, 2, {Rat(2), Rat(0), Rat(0), Rat(6)}));

    auto r3 = lagrange_diagonalize(rmake(1, 1, {Rat(5)}));
    CHECK(r3.Q == IntMatrix::identity(1));
    CHECK(r3.d == std::vector<Rat>{Rat(5)});

    // non-positive-definite rejected with the violated minor index
    try {
        lagrange_diagonalize(rmake(2, 2, {Rat(1), Rat(2), Rat(2), Rat(1)}));
        FAIL("expected rejection");
    } catch (const ContractError& e) {
        CHECK(std::string(e.what()).find("minor 2") != std::string::npos);
    }
}

TEST_CASE("lagrange_diagonalize: random PD matrices") {
    SplitMix64 rng(8);
    for (int it = 0; it < 25; ++it) {
        std::size_t m = static_cast<std::size_t>(rng.uniform(1, 5));
        RatMatrix A = random_pd(rng, m);
        auto r = lagrange_diagonalize(A);
        CHECK(det(r.Q) != 0);
        RatMatrix QAQ = mul(mul(RatMatrix(r.Q), A), RatMatrix(r.Q).transpose());
        for (std::size_t i = 0; i < m; ++i) {
            CHECK(r.d[i] > 0);
            for (std::size_t j = 0; j < m; ++j) CHECK(QAQ.at(i, j) == (i == j ? r.d[i] : Rat(0)));
        }
    }
}

TEST_CASE("waring_decompose: worked examples") {
    auto w1 = waring_decompose(RatMatrix::identity(2));
    REQUIRE(w1.ls.size() == 2);
    CHECK(w1.ls[0] == RatVector{Rat(1), Rat(0)});
    CHECK(w1.ls[1] == RatVector{Rat(0), Rat(1)});

    auto w2 = waring_decompose(rmake(2, 2, {Rat(2), Rat(1), Rat(1), Rat(2)}));
    REQUIRE(w2.ls.size() == 5);
    CHECK(w2.ls[0] == RatVector{Rat(1), Rat(1, 2)});
    CHECK(w2.ls[1] == RatVector{Rat(1), Rat(1, 2)});
    CHECK(w2.ls[2] == RatVector{Rat(0), Rat(1)});
    CHECK(w2.ls[3] == RatVector{Rat(0), Rat(1, 2)});
    CHECK(w2.ls[4] == RatVector{Rat(0), Rat(1, 2)});
    CHECK(sum_outer(w2.ls, 2) == rmake(2, 2, {Rat(2), Rat(1), Rat(1), Rat(2)}));

    auto w3 = waring_decompose(rmake(1, 1, {Rat(4)}));
    REQUIRE(w3.ls.size() == 1);
    CHECK(w3.ls[0] == RatVector{Rat(2)});
}

TEST_CASE("waring_decompose: random PD, exact sum and length bound") {
    SplitMix64 rng(9);
    for (int it = 0; it < 30; ++it) {
        std::size_t m = static_cast<std::size_t>(rng.uniform(1, 6));
        RatMatrix A = random_pd(rng, m);
        auto w = waring_decompose(A);
        CHECK(sum_outer(w.ls, m) == A);
        CHECK(static_cast<long>(w.ls.size()) <= static_cast<long>(m) * sos_length_bound(w.d_max));
    }
}

TEST_CASE("orthogonal_complete: worked examples") {
    CHECK(orthogonal_complete(rmake(1, 2, {Rat(1), Rat(0)})) == RatMatrix::identity(2));

    auto y2 = orthogonal_complete(rmake(1, 2, {Rat(3, 5), Rat(4, 5)}));
    CHECK(y2 == rmake(2, 2, {Rat(3, 5), Rat(4, 5), Rat(4, 5), Rat(-3, 5)}));

    auto y3 = orthogonal_complete(rmake(1, 2, {Rat(0), Rat(1)}));
    CHECK(y3 == rmake(2, 2, {Rat(0), Rat(1), Rat(1), Rat(0)}));

    CHECK_THROWS_AS(orthogonal_complete(rmake(1, 2, {Rat(1), Rat(1)})), ContractError);
}

TEST_CASE("orthogonal_complete: random rational orthonormal rows") {
    SplitMix64 rng(10);
    for (int it = 0; it < 15; ++it) {
        std::size_t n = static_cast<std::size_t>(rng.uniform(2, 5));
        std::size_t m = static_cast<std::size_t>(rng.uniform(1, static_cast<long>(n)));
        RatMatrix R = RatMatrix::identity(n);
        for (int rot = 0; rot < 4; ++rot) {
            std::size_t i = static_cast<std::size_t>(rng.uniform(0, static_cast<long>(n) - 1));
            std::size_t j = static_cast<std::size_t>(rng.uniform(0, static_cast<long>(n) - 1));
            if (i == j) continue;
            Rat t = rng.rat(-3, 3, 2);
            Rat c = (1 - t * t) / (1 + t * t), s = 2 * t / (1 + t * t);
            RatMatrix rot_m = RatMatrix::identity(n);
            rot_m.at(i, i) = c;
            rot_m.at(i, j) = -s;
            rot_m.at(j, i) = s;
            rot_m.at(j, j) = c;
            R = mul(rot_m, R);
        }
        RatMatrix X(m, n);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j) X.at(i, j) = R.at(i, j);
        RatMatrix Y = orthogonal_complete(X);
        CHECK(has_orthonormal_rows(Y));
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j) CHECK(Y.at(i, j) == X.at(i, j));
    }
}

TEST_CASE("eutactic_check: worked examples") {
    CHECK(!eutactic_check(make(1, 1, {1}), make(1, 3, {1, 1, 1}), Int(2)));
    CHECK(eutactic_check(make(1, 1, {1}), make(1, 4, {1, 1, 1, 1}), Int(2)));
    CHECK(eutactic_check(IntMatrix::identity(2), IntMatrix::identity(2), Int(1)));
}

TEST_CASE("lift_lattice: G = [1] pipeline values") {
    auto l = lift_lattice(make(1, 1, {1}));
    CHECK(l.s_total == 2);
    CHECK(l.n == 4);
    CHECK(l.X == make(1, 4, {1, 1, 1, 1}));
    CHECK(has_orthonormal_rows(l.Y));
    CHECK(same_column_lattice(l.X, make(1, 1, {1})));
}

TEST_CASE("lift_lattice: G = [2] pipeline values") {
    auto l = lift_lattice(make(1, 1, {2}));
    CHECK(l.s_total == 6);
    CHECK(l.n == 6);
    IntMatrix XXt = l.X * l.X.transpose();
    CHECK(XXt.at(0, 0) == 36);
    CHECK(same_column_lattice(l.X, make(1, 1, {2})));
    CHECK(has_orthonormal_rows(l.Y));
}

TEST_CASE("lift_lattice: identity and random G, lattice equality") {
    auto li = lift_lattice(IntMatrix::identity(2));
    CHECK(has_orthonormal_rows(li.Y));
    CHECK(same_column_lattice(li.X, IntMatrix::identity(2)));

    SplitMix64 rng(21);
    for (int it = 0; it < 12; ++it) {
        std::size_t m = static_cast<std::size_t>(rng.uniform(1, 3));
        IntMatrix G(m, m);
        do {
            for (auto& x : G.a) x = rng.uniform(-10, 10);
        } while (det(G) == 0);
        auto l = lift_lattice(G);
        CHECK(has_orthonormal_rows(l.Y));
        CHECK(same_column_lattice(l.X, G));
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < l.n; ++j)
                CHECK(l.Y.at(i, j) * Rat(l.s_total) == Rat(l.X.at(i, j)));
        // eutactic star: (G [I | L''])(..)^T = (s f)^2 I with right-invertible [I | L'']
        IntMatrix IL(m, m + l.L2.cols);
        for (std::size_t i = 0; i < m; ++i) {
            IL.at(i, i) = 1;
            for (std::size_t j = 0; j < l.L2.cols; ++j) IL.at(i, m + j) = l.L2.at(i, j);
        }
        CHECK(eutactic_check(G, IL, l.s_total));
    }
    CHECK_THROWS_AS(lift_lattice(make(2, 2, {1, 2, 2, 4})), ContractError);
}

TEST_CASE("cvp_to_sldp: distance identity on worked examples") {
    // L = Z, t = 3/10
    CvpInstance a(RatVector{Rat(3, 10)}, IntMatrix::identity(1));
    auto out = cvp_to_sldp(a);
    REQUIRE(std::holds_alternative<CvpToSldp>(out));
    const auto& red = std::get<CvpToSldp>(out);
    CHECK(red.s_total == 2);
    auto side = sldp_exact(red.instance, kDefaultEnumGuard, &red.complement);
    CHECK(*side.estimate.squared_exact == Rat(9, 400));  // (3/20)^2
    CHECK(Rat(red.s_total * red.s_total) * *side.estimate.squared_exact == Rat(9, 100));

    // t in the lattice: both sides zero
    CvpInstance b(RatVector{Rat(2)}, IntMatrix::identity(1));
    auto outb = cvp_to_sldp(b);
    const auto& redb = std::get<CvpToSldp>(outb);
    auto sideb = sldp_exact(redb.instance, kDefaultEnumGuard, &redb.complement);
    CHECK(*sideb.estimate.squared_exact == 0);

    // L = Z^2, t = (1/2, 1/2): dist^2 = 1/2 preserved
    CvpInstance c(RatVector{Rat(1, 2), Rat(1, 2)}, IntMatrix::identity(2));
    auto outc = cvp_to_sldp(c);
    const auto& redc = std::get<CvpToSldp>(outc);
    auto sidec = sldp_exact(redc.instance, kDefaultEnumGuard, &redc.complement);
    Rat lhs = cvp_exact(c).second;
    CHECK(lhs == Rat(1, 2));
    CHECK(Rat(redc.s_total * redc.s_total) * *sidec.estimate.squared_exact == lhs);

    // exact branch on request
    auto oute = cvp_to_sldp(a, true);
    REQUIRE(std::holds_alternative<CvpExactAnswer>(oute));
    CHECK(std::get<CvpExactAnswer>(oute).dist2 == Rat(9, 100));
}

TEST_CASE("cvp_to_sldp: random distance identity") {
    SplitMix64 rng(33);
    for (int it = 0; it < 6; ++it) {
        std::size_t m = static_cast<std::size_t>(rng.uniform(1, 2));
        IntMatrix G(m, m);
        do {
            for (auto& x : G.a) x = rng.uniform(-4, 4);
        } while (det(G) == 0);
        RatVector t(m);
        for (auto& x : t) x = rng.rat(-8, 8, 5);
        CvpInstance inst(t, G);
        Rat lhs = cvp_exact(inst).second;
        auto out = cvp_to_sldp(inst);
        const auto& red = std::get<CvpToSldp>(out);
        auto side = sldp_exact(red.instance, kDefaultEnumGuard, &red.complement);
        CHECK(Rat(red.s_total * red.s_total) * *side.estimate.squared_exact == lhs);
    }
}
