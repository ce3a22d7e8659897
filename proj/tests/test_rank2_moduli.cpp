#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "piv/rank2_moduli.hpp"

using namespace piv;

namespace {

std::mt19937 rng(77221);

Complex rand_c(double scale = 1.0) {
    std::uniform_real_distribution<double> u(-scale, scale);
    return {u(rng), u(rng)};
}

// Random ST2 point: free (a0, c1, t) with c1 != 0, b-1 solved from the chart
// relation.
ST2Point rand_st2(const ThetaParams& p) {
    Complex a0 = rand_c(), c1 = rand_c() + Complex(1.5), t = rand_c();
    Complex h = p.theta0 / 2.0;
    Complex bm1 = (h * (h - 1.0) - a0 * (a0 - 1.0)) / c1;
    return {a0, c1, t, bm1, p};
}

ST1Point rand_st1(const ThetaParams& p) {
    Complex c2 = rand_c() + Complex(1.5), t = rand_c(), b0 = rand_c();
    Complex a2 = std::sqrt(1.0 - c2 * t + c2 * c2 * (p.thetainf + t * t / 4.0 - b0 * c2));
    return {a2, c2, t, b0, p};
}

double max_resid(const GeneralPoint& g) {
    double m = 0;
    for (const Complex& r : check_local_data(g)) m = std::max(m, std::abs(r));
    return m;
}

}  // namespace

TEST_CASE("theta parameters expose the monodromy exponentials") {
    ThetaParams p{Complex(0.3, 0.1), Complex(-1.2)};
    CHECK(std::abs(p.beta() - std::exp(Complex(0, kPi) * p.theta0)) < 1e-14);
    CHECK(std::abs(p.alpha() - std::exp(Complex(0, kPi) * p.thetainf)) < 1e-14);
}

TEST_CASE("standard-form matrices") {
    ThetaParams p{Complex(0.7, -0.2), Complex(1.3, 0.4)};

    SUBCASE("ST1 special point c2=0: c = z, b2 = 0, b1 = thetainf + t^2/4") {
        ST1Point s{1.0, 0.0, 0.0, 0.0, p};
        MatPoly m = st1_matrix(s);
        CHECK(std::abs(m(1, 0).coeff_z(1) - Complex(1.0)) < 1e-14);
        CHECK(std::abs(m(1, 0).coeff_z(2)) < 1e-14);
        CHECK(std::abs(m(0, 1).coeff_z(2)) < 1e-14);
        CHECK(std::abs(m(0, 1).coeff_z(1) - p.thetainf) < 1e-14);
    }
    SUBCASE("trace zero and local data for random chart points") {
        for (int i = 0; i < 200; ++i) {
            ST2Point s2 = rand_st2(p);
            MatPoly m2 = st2_matrix(s2);
            CHECK(m2.trace().max_abs_coeff() < 1e-12);
            CHECK(max_resid(general_from_matrix(m2, s2.t, p)) < 1e-11);

            ST1Point s1 = rand_st1(p);
            MatPoly m1 = st1_matrix(s1);
            CHECK(m1.trace().max_abs_coeff() < 1e-12);
            CHECK(max_resid(general_from_matrix(m1, s1.t, p)) < 1e-11);
        }
    }
    SUBCASE("relation violation is rejected") {
        ST2Point bad{0.0, 1.0, 0.0, 1.0, p};  // residual = 1 - h(h-1) != 0
        CHECK_THROWS_AS((void)st2_matrix(bad), std::invalid_argument);
    }
    SUBCASE("perturbing b2 by 1 shifts the first residual by c2") {
        ST1Point s = rand_st1(p);
        GeneralPoint g = st1_coords(s);
        auto base = check_local_data(g);
        g.b2 += 1.0;
        auto pert = check_local_data(g);
        CHECK(std::abs((pert[0] - base[0]) - g.c2) < 1e-13);
    }
}

TEST_CASE("gauge normalization between charts") {
    ThetaParams p{Complex(0.4, 0.3), Complex(-0.9, 0.2)};

    SUBCASE("ST2 normal form is a fixed point") {
        ST2Point s = rand_st2(p);
        ST2Point n = normalize_to_st2(st2_coords(s));
        CHECK(std::abs(n.a0 - s.a0) < 1e-10);
        CHECK(std::abs(n.c1 - s.c1) < 1e-10);
        CHECK(std::abs(n.bm1 - s.bm1) < 1e-10);
    }
    SUBCASE("round-trip through a random G-gauge, 200 samples") {
        for (int i = 0; i < 200; ++i) {
            ST2Point s = rand_st2(p);
            Complex lambda = rand_c() + Complex(2.0);
            GeneralPoint moved = apply_g_action(st2_coords(s), lambda, rand_c(), rand_c());
            ST2Point back = normalize_to_st2(moved);
            CHECK(std::abs(back.a0 - s.a0) < 1e-9);
            CHECK(std::abs(back.c1 - s.c1) < 1e-9);
            CHECK(std::abs(back.bm1 - s.bm1) < 1e-9);
            CHECK(std::abs(back.t - s.t) < 1e-12);
        }
    }
    SUBCASE("chart transition composed with its inverse is the identity") {
        for (int i = 0; i < 50; ++i) {
            ST2Point s = rand_st2(p);
            GeneralPoint g = st2_coords(s);
            if (std::abs(g.c1) < 0.2) continue;  // need the ST1 chart too
            ST1Point via = normalize_to_st1(g);
            CHECK(std::abs(via.relation_residual()) < 1e-9);
            ST2Point back = normalize_to_st2(st1_coords(via));
            CHECK(std::abs(back.a0 - s.a0) < 1e-8);
            CHECK(std::abs(back.c1 - s.c1) < 1e-8);
            CHECK(std::abs(back.bm1 - s.bm1) < 1e-8);
        }
    }
    SUBCASE("missing chart coefficient is rejected") {
        GeneralPoint g = st2_coords(rand_st2(p));
        g.c2 = 0.0;
        CHECK_THROWS_AS((void)normalize_to_st2(g), ChartError);
    }
    SUBCASE("variant interface prefers ST2") {
        GeneralPoint g = st2_coords(rand_st2(p));
        auto v = normalize_to_chart(g);
        CHECK(std::holds_alternative<ST2Point>(v));
    }
}

TEST_CASE("singular point of the ST2 chart") {
    SUBCASE("the displayed point is flagged") {
        ThetaParams p{1.0, Complex(0.7, 0.1)};
        CHECK(detect_singular_st2(ST2Point{0.5, 0.0, 1.0, 0.0, p}));
    }
    SUBCASE("other relation points with theta0 = 1 are not flagged") {
        ThetaParams p{1.0, Complex(0.7, 0.1)};
        CHECK_FALSE(detect_singular_st2(ST2Point{0.0, 1.0, 1.0, -0.25, p}));
    }
    SUBCASE("theta0 away from 1 never flags") {
        ThetaParams p{3.0, 0.0};
        CHECK_FALSE(detect_singular_st2(ST2Point{0.5, 0.0, 1.0, 0.0, p}));
    }
    SUBCASE("uniqueness per t: grid over the relation surface finds one hit") {
        ThetaParams p{1.0, Complex(-0.3)};
        const Complex hh = -0.25;  // (theta0/2)(theta0/2 - 1)
        int hits = 0;
        for (int ia = -20; ia <= 20; ++ia)
            for (int ic = -20; ic <= 20; ++ic) {
                Complex a0 = 0.05 * ia, c1 = 0.05 * ic;
                Complex bm1;
                if (std::abs(c1) < 1e-13) {
                    if (std::abs(a0 * (a0 - 1.0) - hh) > 1e-13) continue;  // off the surface
                    bm1 = 0.0;
                } else {
                    bm1 = (hh - a0 * (a0 - 1.0)) / c1;
                }
                if (detect_singular_st2(ST2Point{a0, c1, 1.0, bm1, p})) ++hits;
            }
        CHECK(hits == 1);
    }
}

TEST_CASE("reducible-locus presence predicates") {
    SUBCASE("both congruences, type 1 by theta0 >= thetainf") {
        auto [t1, t2] = reducible_presence(Rational(4), Rational(2));
        CHECK(t1);
        CHECK(t2);  // theta0 >= -thetainf also holds
    }
    SUBCASE("no congruence: absent") {
        auto [t1, t2] = reducible_presence(Rational(1, 3), Rational(1, 5));
        CHECK_FALSE(t1);
        CHECK_FALSE(t2);
    }
    SUBCASE("boundary theta0 = thetainf = 1: all equalities") {
        auto [t1, t2] = reducible_presence(Rational(1), Rational(1));
        CHECK(t1);
        CHECK(t2);
    }
    SUBCASE("plus congruence only, strict cases") {
        // theta0/2 in thetainf/2 + Z only: theta0 = 1/2, thetainf = 5/2
        auto [t1, t2] = reducible_presence(Rational(1, 2), Rational(5, 2));
        CHECK_FALSE(t1);  // 1/2 < 5/2
        CHECK(t2);        // 1/2 <= 5/2 + 2
        auto [s1, s2] = reducible_presence(Rational(9, 2), Rational(-3, 2));
        CHECK(s1);        // 9/2 >= -3/2
        CHECK_FALSE(s2);  // 9/2 > -3/2 + 2
    }
    SUBCASE("minus congruence only") {
        // theta0/2 in -thetainf/2 + Z only: theta0 = 1/2, thetainf = -5/2
        auto [t1, t2] = reducible_presence(Rational(1, 2), Rational(-5, 2));
        CHECK(t1);        // 1/2 <= 5/2 + 2
        CHECK_FALSE(t2);  // 1/2 < 5/2
    }
}

TEST_CASE("b = 0 reducible families") {
    SUBCASE("branch 1 at theta0 = thetainf = 1, t = 0") {
        GeneralPoint g = reducible_family_b0(1.0, 1.0, 0.0, 1);
        CHECK(std::abs(g.a2 - Complex(1.0)) < 1e-14);
        CHECK(std::abs(g.a1) < 1e-14);
        CHECK(std::abs(g.a0 - Complex(0.5)) < 1e-14);
        CHECK(max_resid(g) < 1e-12);
    }
    SUBCASE("all four branches pass local data when their constraint holds") {
        Complex t{0.3, -0.8};
        struct Case {
            int branch;
            Complex theta0, thetainf;
        };
        // thetainf/2 = 1/2 + (theta0/2 - 1/2) etc., solved for thetainf
        Complex th0{0.77, 0.21};
        Case cases[] = {{1, th0, th0},
                        {2, th0, 2.0 - th0},
                        {3, th0, -th0},
                        {4, th0, th0 - 2.0}};
        for (const auto& c : cases) {
            GeneralPoint g = reducible_family_b0(c.theta0, c.thetainf, t, c.branch);
            CHECK(max_resid(g) < 1e-12);
            CHECK(std::abs(g.bm1) + std::abs(g.b0) + std::abs(g.b1) + std::abs(g.b2) < 1e-14);
        }
    }
    SUBCASE("violated constraint is rejected") {
        CHECK_THROWS_AS((void)reducible_family_b0(1.0, 7.0, 0.0, 1), std::invalid_argument);
    }
}
