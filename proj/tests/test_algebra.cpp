#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "piv/formal_gauge.hpp"
#include "piv/integrate.hpp"
#include "piv/mat_poly.hpp"
#include "piv/third_poly.hpp"

using namespace piv;

namespace {

std::mt19937 rng(20260823);

Complex rand_c(double scale = 1.0) {
    std::uniform_real_distribution<double> u(-scale, scale);
    return {u(rng), u(rng)};
}

MatPoly rand_mat(int n, int lo, int hi) {
    MatPoly m(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = lo; k <= hi; ++k) m(i, j) += ThirdPoly::z_pow(k, rand_c());
    return m;
}

}  // namespace

TEST_CASE("third-exponent polynomial arithmetic") {
    ThirdPoly p = ThirdPoly::term(2.0, 1) + ThirdPoly::z_pow(-1, 3.0);  // 2 z^{1/3} + 3/z
    ThirdPoly q = ThirdPoly::term(1.0, 2);                              // z^{2/3}

    SUBCASE("multiplication adds exponents exactly") {
        ThirdPoly r = p * q;
        CHECK(std::abs(r.coeff_z(1) - Complex(2.0)) < 1e-15);
        CHECK(std::abs(r.coeff(-1) - Complex(3.0)) < 1e-15);
    }
    SUBCASE("euler multiplies by the exponent") {
        ThirdPoly r = p.euler();
        CHECK(std::abs(r.coeff(1) - Complex(2.0 / 3.0)) < 1e-15);
        CHECK(std::abs(r.coeff(-3) - Complex(-3.0)) < 1e-15);
    }
    SUBCASE("cancellation prunes to the empty polynomial") {
        ThirdPoly r = p - p;
        CHECK(r.empty());
        CHECK(r.max_abs_coeff() == 0.0);
    }
    SUBCASE("monomial division is exact") {
        ThirdPoly r = (p * q).divided_by_monomial(1.0, 2);
        CHECK(std::abs(r.coeff(1) - Complex(2.0)) < 1e-15);
        CHECK(std::abs(r.coeff(-3) - Complex(3.0)) < 1e-15);
    }
    SUBCASE("truncation keeps the requested band") {
        ThirdPoly r = p.truncated_above(0);
        CHECK(r.coeff(1) == Complex(0.0));
        CHECK(std::abs(r.coeff(-3) - Complex(3.0)) < 1e-15);
    }
}

TEST_CASE("matrix polynomial algebra") {
    SUBCASE("determinant and inverse round-trip, n = 2") {
        for (int s = 0; s < 20; ++s) {
            MatPoly g = MatPoly::identity(2);
            g(0, 1) = ThirdPoly(rand_c()) + ThirdPoly::z_pow(-1, rand_c());
            g(1, 1) = ThirdPoly(rand_c(2.0) + Complex(3.0));  // monomial determinant
            MatPoly prod = g * g.inverse();
            MatPoly diff = prod - MatPoly::identity(2);
            CHECK(diff.max_abs_coeff() < 1e-12);
        }
    }
    SUBCASE("inverse of a unimodular z-scaled matrix, n = 3") {
        MatPoly g = MatPoly::identity(3);
        g(0, 0) = ThirdPoly::z_pow(1);
        g(2, 2) = ThirdPoly::z_pow(-1, 2.0);
        g(0, 2) = ThirdPoly(rand_c());
        MatPoly diff = g.inverse() * g - MatPoly::identity(3);
        CHECK(diff.max_abs_coeff() < 1e-13);
    }
    SUBCASE("non-monomial determinant is rejected") {
        MatPoly g = MatPoly::identity(2);
        g(0, 0) = ThirdPoly(1.0) + ThirdPoly::z_pow(1);
        CHECK_THROWS_AS((void)g.inverse(), SingularGaugeError);
    }
    SUBCASE("commutator antisymmetry") {
        MatPoly a = rand_mat(3, -1, 2), b = rand_mat(3, -1, 2);
        MatPoly s = commutator(a, b) + commutator(b, a);
        CHECK(s.max_abs_coeff() < 1e-12);
    }
    SUBCASE("gauge transform by the identity is the identity") {
        MatPoly a = rand_mat(2, -1, 2);
        MatPoly diff = gauge_transform(a, MatPoly::identity(2)) - a;
        CHECK(diff.max_abs_coeff() < 1e-13);
    }
    SUBCASE("gauge transform composes contravariantly") {
        MatPoly a = rand_mat(2, 0, 2);
        MatPoly g = MatPoly::identity(2);
        g(0, 1) = ThirdPoly(rand_c());
        g(1, 1) = ThirdPoly(2.0);
        MatPoly h = MatPoly::identity(2);
        h(0, 1) = ThirdPoly::z_pow(-1, rand_c());
        MatPoly lhs = gauge_transform(gauge_transform(a, g), h);
        MatPoly rhs = gauge_transform(a, g * h);
        CHECK((lhs - rhs).max_abs_coeff() < 1e-12);
    }
}

TEST_CASE("formal gauge equivalence") {
    SUBCASE("recovers a tail gauge at infinity") {
        MatPoly a(2);
        a(0, 0) = ThirdPoly(0.25) + ThirdPoly::z_pow(-1, rand_c());
        a(0, 1) = ThirdPoly::z_pow(-1, 2.0);
        a(1, 0) = ThirdPoly::z_pow(-2, rand_c());
        a(1, 1) = ThirdPoly(-0.35);
        MatPoly g = MatPoly::identity(2);
        g(0, 1) = ThirdPoly::z_pow(-1, 0.3) + ThirdPoly::z_pow(-2, Complex(0.1, 0.2));
        MatPoly a2 = gauge_transform(a, g);
        auto res = formal_gauge_equivalence(a, a2, ExpansionPoint::at_infinity, 12);
        REQUIRE(res.ok());
        MatPoly r = formal_gauge_residual(a, a2, *res.series);
        CHECK(r.max_abs_coeff() < 1e-9);
    }
    SUBCASE("regular-singular pair at zero") {
        MatPoly a(2);
        a(0, 0) = ThirdPoly(0.3) + ThirdPoly::z_pow(1, rand_c());
        a(0, 1) = ThirdPoly::z_pow(1, rand_c()) + ThirdPoly::z_pow(2, rand_c());
        a(1, 0) = ThirdPoly::z_pow(1, rand_c());
        a(1, 1) = ThirdPoly(-0.1) + ThirdPoly::z_pow(2, rand_c());
        MatPoly u = MatPoly::identity(2);
        u(0, 1) = ThirdPoly::z_pow(1, 0.4) + ThirdPoly::z_pow(2, Complex(0.0, 0.2));
        MatPoly a2 = gauge_transform(a, u);
        auto res = formal_gauge_equivalence(a, a2, ExpansionPoint::at_zero, 10);
        REQUIRE(res.ok());
        MatPoly r = formal_gauge_residual(a, a2, *res.series);
        CHECK(r.max_abs_coeff() < 1e-9);
    }
    SUBCASE("mismatched residue spectrum obstructs at order zero") {
        MatPoly a(2), a2(2);
        a(0, 0) = ThirdPoly(0.25);
        a(1, 1) = ThirdPoly(-0.25);
        a2(0, 0) = ThirdPoly(0.35);
        a2(1, 1) = ThirdPoly(-0.35);
        auto res = formal_gauge_equivalence(a, a2, ExpansionPoint::at_zero, 4);
        CHECK_FALSE(res.ok());
        CHECK(res.obstructed_order == 0);
    }
    SUBCASE("resonant shift obstructs at a positive order") {
        // diag(0, 0) vs diag(0, 0) + nilpotent z-term that cannot be gauged
        // away when the order-1 Sylvester operator is singular with an
        // incompatible right-hand side.
        MatPoly a(2), a2(2);
        a(0, 0) = ThirdPoly(0.5);
        a(1, 1) = ThirdPoly(-0.5);
        a2 = a;
        a2(1, 0) = ThirdPoly::z_pow(1);  // eigenvalue gap -1 resonates at order 1
        auto res = formal_gauge_equivalence(a, a2, ExpansionPoint::at_zero, 4);
        CHECK_FALSE(res.ok());
        CHECK(res.obstructed_order == 1);
    }
}

TEST_CASE("integrator") {
    SUBCASE("zero right-hand side gives a constant trajectory") {
        Rhs rhs = [](Complex, const State&) -> State { return {Complex(0.0)}; };
        Trajectory tr = integrate(rhs, {Complex(2.5, -1.0)}, 0.0, 1.0);
        CHECK(tr.termination == Termination::completed);
        CHECK(std::abs(tr.back().state[0] - Complex(2.5, -1.0)) < 1e-14);
    }
    SUBCASE("exp calibration to 1e-9") {
        Rhs rhs = [](Complex, const State& y) -> State { return {y[0]}; };
        Trajectory tr = integrate(rhs, {Complex(1.0)}, 0.0, 1.0);
        CHECK(tr.termination == Termination::completed);
        CHECK(std::abs(tr.back().state[0] - std::exp(1.0)) < 1e-9);
    }
    SUBCASE("fixed-step order at least 4") {
        Rhs rhs = [](Complex, const State& y) -> State { return {y[0]}; };
        auto err_at = [&](double h) {
            IntegrateOptions opt;
            opt.tol = 1e6;  // force acceptance; step size pinned by max_step
            opt.max_step = h;
            Trajectory tr = integrate(rhs, {Complex(1.0)}, 0.0, 1.0, opt);
            return std::abs(tr.back().state[0] - std::exp(1.0));
        };
        double e1 = err_at(1.0 / 16), e2 = err_at(1.0 / 32);
        CHECK(e1 / e2 > 16.0);  // order >= 4
    }
    SUBCASE("complex segment: linear phase rotation") {
        Rhs rhs = [](Complex, const State& y) -> State { return {y[0]}; };
        Trajectory tr = integrate(rhs, {Complex(1.0)}, 0.0, Complex(0.0, kPi));
        CHECK(std::abs(tr.back().state[0] - Complex(-1.0)) < 1e-9);
    }
    SUBCASE("blow-up of q' = q^2 is reported as a pole near t = 1") {
        Rhs rhs = [](Complex, const State& y) -> State { return {y[0] * y[0]}; };
        Trajectory tr = integrate(rhs, {Complex(1.0)}, 0.0, 2.0);
        CHECK(tr.termination != Termination::completed);
        CHECK(std::abs(tr.stop_point - Complex(1.0)) < 1e-3);
    }
    SUBCASE("immediate pole at the start throws") {
        Rhs rhs = [](Complex, const State&) -> State { throw PoleError("at start"); };
        CHECK_THROWS_AS((void)integrate(rhs, {Complex(1.0)}, 0.0, 1.0), PoleError);
    }
    SUBCASE("polygonal path matches the direct segment for holomorphic flow") {
        Rhs rhs = [](Complex t, const State& y) -> State { return {t * y[0]}; };
        Trajectory direct = integrate(rhs, {Complex(1.0)}, 0.0, 1.0);
        Trajectory path =
            integrate_path(rhs, {Complex(1.0)}, {0.0, Complex(0.5, 0.4), Complex(1.0)});
        CHECK(path.termination == Termination::completed);
        CHECK(std::abs(path.back().state[0] - direct.back().state[0]) < 1e-8);
    }
}
