#pragma once

#include <array>
#include <utility>
#include <variant>

#include "piv/mat_poly.hpp"
#include "piv/rational.hpp"

namespace piv {

struct ThetaParams {
    Complex theta0{};
    Complex thetainf{};

    Complex beta() const { return std::exp(Complex(0.0, kPi) * theta0); }
    Complex alpha() const { return std::exp(Complex(0.0, kPi) * thetainf); }
};

// Coordinates on the first standard chart ST1: a2, c2, t, b0 subject to
// a2^2 + c2 t - c2^2 (thetainf + t^2/4 - b0 c2) - 1 = 0.
struct ST1Point {
    Complex a2, c2, t, b0;
    ThetaParams params;

    Complex relation_residual() const {
        return a2 * a2 + c2 * t - c2 * c2 * (params.thetainf + t * t / 4.0 - b0 * c2) - 1.0;
    }
};

// Coordinates on the second standard chart ST2: a0, c1, t, bm1 subject to
// a0(a0-1) + bm1 c1 = (theta0/2)(theta0/2 - 1).
struct ST2Point {
    Complex a0, c1, t, bm1;
    ThetaParams params;

    Complex relation_residual() const {
        Complex h = params.theta0 / 2.0;
        return a0 * (a0 - 1.0) + bm1 * c1 - h * (h - 1.0);
    }
};

// A general point of the space C: z d/dz + [[a, b], [c, -a]] with
// a = a0+a1 z+a2 z^2, b = bm1/z+...+b2 z^2, c = c1 z + c2 z^2.
struct GeneralPoint {
    Complex a0{}, a1{}, a2{};
    Complex bm1{}, b0{}, b1{}, b2{};
    Complex c1{}, c2{};
    Complex t{};
    ThetaParams params;
};

// Residuals of the four local-data equations (three at infinity, one at 0).
inline std::array<Complex, 4> check_local_data(const GeneralPoint& g) {
    const auto& p = g.params;
    Complex h = p.theta0 / 2.0;
    return {
        g.a2 * g.a2 + g.b2 * g.c2 - 1.0,
        2.0 * g.a1 * g.a2 + g.b2 * g.c1 + g.b1 * g.c2 - g.t,
        2.0 * g.a0 * g.a2 + g.a1 * g.a1 + g.b1 * g.c1 + g.b0 * g.c2 -
            (p.thetainf + g.t * g.t / 4.0),
        g.a0 * (g.a0 - 1.0) + g.bm1 * g.c1 - h * (h - 1.0),
    };
}

inline MatPoly general_matrix(const GeneralPoint& g) {
    MatPoly m(2);
    m(0, 0) = ThirdPoly(g.a0) + ThirdPoly::z_pow(1, g.a1) + ThirdPoly::z_pow(2, g.a2);
    m(0, 1) = ThirdPoly::z_pow(-1, g.bm1) + ThirdPoly(g.b0) + ThirdPoly::z_pow(1, g.b1) +
              ThirdPoly::z_pow(2, g.b2);
    m(1, 0) = ThirdPoly::z_pow(1, g.c1) + ThirdPoly::z_pow(2, g.c2);
    m(1, 1) = -m(0, 0);
    return m;
}

inline GeneralPoint general_from_matrix(const MatPoly& m, Complex t, const ThetaParams& params) {
    GeneralPoint g;
    g.a0 = m(0, 0).coeff_z(0);
    g.a1 = m(0, 0).coeff_z(1);
    g.a2 = m(0, 0).coeff_z(2);
    g.bm1 = m(0, 1).coeff_z(-1);
    g.b0 = m(0, 1).coeff_z(0);
    g.b1 = m(0, 1).coeff_z(1);
    g.b2 = m(0, 1).coeff_z(2);
    g.c1 = m(1, 0).coeff_z(1);
    g.c2 = m(1, 0).coeff_z(2);
    g.t = t;
    g.params = params;
    return g;
}

inline GeneralPoint st1_coords(const ST1Point& p) {
    GeneralPoint g;
    Complex k = p.params.thetainf + p.t * p.t / 4.0 - p.b0 * p.c2;
    Complex h = p.params.theta0 / 2.0;
    g.a2 = p.a2;
    g.b2 = -p.c2 * k + p.t;
    g.b1 = k;
    g.b0 = p.b0;
    g.bm1 = h * (h - 1.0);
    g.c1 = 1.0;
    g.c2 = p.c2;
    g.t = p.t;
    g.params = p.params;
    return g;
}

inline GeneralPoint st2_coords(const ST2Point& p) {
    GeneralPoint g;
    g.a0 = p.a0;
    g.b2 = 1.0;
    g.b1 = p.t - p.c1;
    g.b0 = p.params.thetainf + p.t * p.t / 4.0 - g.b1 * p.c1;
    g.bm1 = p.bm1;
    g.c1 = p.c1;
    g.c2 = 1.0;
    g.t = p.t;
    g.params = p.params;
    return g;
}

inline MatPoly st1_matrix(const ST1Point& p) {
    if (std::abs(p.relation_residual()) > 1e-10)
        throw std::invalid_argument("ST1 relation violated");
    return general_matrix(st1_coords(p));
}

inline MatPoly st2_matrix(const ST2Point& p) {
    if (std::abs(p.relation_residual()) > 1e-10)
        throw std::invalid_argument("ST2 relation violated");
    return general_matrix(st2_coords(p));
}

// Gauge in G: e1 -> e1, e2 -> lambda e2 + (x0 + x1/z) e1, as a MatPoly.
inline MatPoly g_action_matrix(Complex lambda, Complex x0, Complex x1) {
    MatPoly g = MatPoly::zero(2);
    g(0, 0) = ThirdPoly(1.0);
    g(0, 1) = ThirdPoly(x0) + ThirdPoly::z_pow(-1, x1);
    g(1, 1) = ThirdPoly(lambda);
    return g;
}

inline GeneralPoint apply_g_action(const GeneralPoint& g, Complex lambda, Complex x0, Complex x1) {
    MatPoly m = gauge_transform(general_matrix(g), g_action_matrix(lambda, x0, x1));
    return general_from_matrix(m, g.t, g.params);
}

enum class Chart { st1, st2 };

// Normalization into ST1: scale lambda = c1 so the leading c-coefficient is 1,
// then kill a0 and a1 by back-substitution (triangular in x1, x0).
inline ST1Point normalize_to_st1(const GeneralPoint& g) {
    if (std::abs(g.c1) < 1e-13) throw ChartError("not in chart domain: c1 = 0");
    Complex lambda = g.c1;
    Complex x1 = g.a0;  // a0' = a0 - x1 c1 / lambda = 0
    Complex x0 = g.a1 - g.a0 * g.c2 / g.c1;  // a1' = a1 - (x0 c1 + x1 c2) / lambda = 0
    GeneralPoint n = apply_g_action(g, lambda, x0, x1);
    ST1Point p{n.a2, n.c2, n.t, n.b0, n.params};
    if (std::abs(p.relation_residual()) > 1e-8)
        throw std::runtime_error("ST1 normalization failed invariant");
    return p;
}

// Normalization into ST2: lambda = c2, kill a2 and a1.
inline ST2Point normalize_to_st2(const GeneralPoint& g) {
    if (std::abs(g.c2) < 1e-13) throw ChartError("not in chart domain: c2 = 0");
    Complex lambda = g.c2;
    Complex x0 = g.a2;                       // a2' = a2 - x0 c2 / lambda = 0
    Complex x1 = g.a1 - g.a2 * g.c1 / g.c2;  // a1' = a1 - (x0 c1 + x1 c2) / lambda = 0
    GeneralPoint n = apply_g_action(g, lambda, x0, x1);
    ST2Point p{n.a0, n.c1, n.t, n.bm1, n.params};
    if (std::abs(p.relation_residual()) > 1e-8)
        throw std::runtime_error("ST2 normalization failed invariant");
    return p;
}

inline std::variant<ST1Point, ST2Point> normalize_to_chart(const GeneralPoint& g,
                                                           Chart prefer = Chart::st2) {
    if (prefer == Chart::st1) return normalize_to_st1(g);
    return normalize_to_st2(g);
}

// True exactly on the one singular point per fixed t of the ST2 chart.
inline bool detect_singular_st2(const ST2Point& p) {
    return std::abs(p.params.theta0 - 1.0) < 1e-10 && std::abs(p.a0 - 0.5) < 1e-10 &&
           std::abs(p.bm1) < 1e-10 && std::abs(p.c1) < 1e-10;
}

// Presence of the type (1) / type (2) reducible families, by the exact
// integer-congruence case lists.  Requires rational parameters.
inline std::pair<bool, bool> reducible_presence(const Rational& theta0, const Rational& thetainf) {
    bool in_plus = is_integer((theta0 - thetainf) / 2);   // theta0/2 in  thetainf/2 + Z
    bool in_minus = is_integer((theta0 + thetainf) / 2);  // theta0/2 in -thetainf/2 + Z
    bool type1 = false, type2 = false;
    if (in_plus && !in_minus) {
        type1 = theta0 >= thetainf;
        type2 = theta0 <= thetainf + 2;
    } else if (!in_plus && in_minus) {
        type1 = theta0 <= -thetainf + 2;
        type2 = theta0 >= -thetainf;
    } else if (in_plus && in_minus) {
        type1 = theta0 >= thetainf || theta0 <= -thetainf + 2;
        type2 = theta0 <= thetainf + 2 || theta0 >= -thetainf;
    }
    return {type1, type2};
}

// The four b = 0 reducible families.  Branches 1,2: (a2,a1,a0) = (1, t/2,
// thetainf/2) under thetainf/2 = 1/2 +- (theta0/2 - 1/2); branches 3,4 the
// mirrored family under -thetainf/2 = 1/2 +- (theta0/2 - 1/2).
inline GeneralPoint reducible_family_b0(Complex theta0, Complex thetainf, Complex t, int branch) {
    if (branch < 1 || branch > 4) throw std::invalid_argument("branch must be 1..4");
    Complex h0 = theta0 / 2.0 - 0.5;
    Complex lhs = branch <= 2 ? thetainf / 2.0 : -thetainf / 2.0;
    Complex rhs = branch % 2 == 1 ? 0.5 + h0 : 0.5 - h0;
    if (std::abs(lhs - rhs) > 1e-10)
        throw std::invalid_argument("branch constraint on (theta0, thetainf) violated");
    GeneralPoint g;
    double sgn = branch <= 2 ? 1.0 : -1.0;
    g.a2 = sgn;
    g.a1 = sgn * t / 2.0;
    g.a0 = sgn * thetainf / 2.0;
    g.c1 = 1.0;
    g.c2 = 0.0;
    g.t = t;
    g.params = ThetaParams{theta0, thetainf};
    return g;
}

}  // namespace piv
