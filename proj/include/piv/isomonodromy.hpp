#pragma once

#include <utility>

#include "piv/integrate.hpp"
#include "piv/rank2_moduli.hpp"

namespace piv {

struct PIVState {
    Complex t, q, qprime;
};

// q'' = (q')^2/(2q) + (3/2)q^3 + t q^2 + (q/8)(4 thetainf + t^2)
//       - (theta0 - 1)^2 / (8q)
inline Complex piv_rhs(const PIVState& s, const ThetaParams& p) {
    if (s.q == Complex(0.0)) throw PoleError("piv_rhs: q = 0");
    Complex q = s.q, qp = s.qprime, t = s.t;
    return qp * qp / (2.0 * q) + 1.5 * q * q * q + t * q * q +
           q / 8.0 * (4.0 * p.thetainf + t * t) -
           (p.theta0 - 1.0) * (p.theta0 - 1.0) / (8.0 * q);
}

// The isomonodromic family above ST2: coordinates (q, a0) at time t.
struct LaxPairData {
    Complex q, a0, t;
    ThetaParams params;

    Complex b1() const { return t + q; }
    Complex b0() const { return q * (t + q) + params.thetainf + t * t / 4.0; }
    Complex bm1() const {
        if (q == Complex(0.0)) throw PoleError("LaxPairData: q = 0");
        Complex u = a0 - 0.5, v = params.theta0 / 2.0 - 0.5;
        return (u * u - v * v) / q;
    }
};

inline MatPoly lax_A(const LaxPairData& d) {
    MatPoly a(2);
    a(0, 0) = ThirdPoly(d.a0);
    a(0, 1) = ThirdPoly::z_pow(2) + ThirdPoly::z_pow(1, d.b1()) + ThirdPoly(d.b0()) +
              ThirdPoly::z_pow(-1, d.bm1());
    a(1, 0) = ThirdPoly::z_pow(2) + ThirdPoly::z_pow(1, -d.q);
    a(1, 1) = ThirdPoly(-d.a0);
    return a;
}

inline MatPoly lax_B(const LaxPairData& d) {
    MatPoly b(2);
    Complex q = d.q;
    b(0, 1) = ThirdPoly::z_pow(-1, (q * (q + d.b1()) + d.b0()) / 2.0) +
              ThirdPoly((d.b1() + q) / 2.0) + ThirdPoly::z_pow(1, 0.5);
    b(1, 0) = ThirdPoly::z_pow(1, 0.5);
    return b;
}

// dA/dt - z dB/dz - [A, B], with all t-dependence of A (explicit and through
// q, a0) expanded by the chain rule with the supplied derivatives.
inline MatPoly lax_residual(const LaxPairData& d, Complex qdot, Complex a0dot) {
    MatPoly at(2);
    at(0, 0) = ThirdPoly(a0dot);
    // d/dt of b1 = t + q, b0 = q(t+q) + thetainf + t^2/4, bm1 = ((a0-1/2)^2 - k)/q
    Complex b1dot = 1.0 + qdot;
    Complex b0dot = qdot * (d.t + d.q) + d.q * (1.0 + qdot) + d.t / 2.0;
    Complex bm1dot = (2.0 * (d.a0 - 0.5) * a0dot - d.bm1() * qdot) / d.q;
    at(0, 1) = ThirdPoly::z_pow(1, b1dot) + ThirdPoly(b0dot) + ThirdPoly::z_pow(-1, bm1dot);
    at(1, 0) = ThirdPoly::z_pow(1, -qdot);
    at(1, 1) = ThirdPoly(-a0dot);
    MatPoly a = lax_A(d), b = lax_B(d);
    return at - b.euler() - commutator(a, b);
}

// q' = a0 - 1/2,  a0' = (bm1 + q(q(b1+q)+b0))/2
inline std::pair<Complex, Complex> flow_rhs(Complex t, Complex q, Complex a0,
                                            const ThetaParams& p) {
    LaxPairData d{q, a0, t, p};
    return {a0 - 0.5, (d.bm1() + q * (q * (d.b1() + q) + d.b0())) / 2.0};
}

inline Rhs piv_flow(const ThetaParams& p) {
    return [p](Complex t, const State& y) -> State {
        auto [qd, ad] = flow_rhs(t, y[0], y[1], p);
        return {qd, ad};
    };
}

// Second-order PIV as a first-order system in (q, q').
inline Rhs piv_system(const ThetaParams& p) {
    return [p](Complex t, const State& y) -> State {
        return {y[1], piv_rhs(PIVState{t, y[0], y[1]}, p)};
    };
}

// Riccati right-hand sides attached to the reducible families.
inline Complex riccati_rhs(Complex t, Complex q, Complex d, int sign) {
    if (sign >= 0) return q * q + t / 2.0 * q + (d - 1.0) / 2.0;
    return -q * q - t / 2.0 * q - (d + 1.0) / 2.0;
}

// Compatibility residual of the reducible Lax pair
//   z d/dz + [[s w, 0], [z^2 - q z, -s w]],  d/dt + [[s tau, 0], [z/2, -s tau]]
// with w = z^2 + (t/2) z + d/2, tau = (2z + 2q + t)/4, s = sign.
// Zero exactly when qdot matches riccati_rhs for the same sign.
inline MatPoly reducible_lax_residual(Complex q, Complex qdot, Complex t, Complex d,
                                      int sign = +1) {
    double s = sign >= 0 ? 1.0 : -1.0;
    MatPoly a(2);
    ThirdPoly w = ThirdPoly::z_pow(2) + ThirdPoly::z_pow(1, t / 2.0) + ThirdPoly(d / 2.0);
    a(0, 0) = Complex(s) * w;
    a(1, 0) = ThirdPoly::z_pow(2) + ThirdPoly::z_pow(1, -q);
    a(1, 1) = Complex(-s) * w;
    MatPoly b(2);
    ThirdPoly tau = ThirdPoly::z_pow(1, 0.5) + ThirdPoly(q / 2.0 + t / 4.0);
    b(0, 0) = Complex(s) * tau;
    b(1, 0) = ThirdPoly::z_pow(1, 0.5);
    b(1, 1) = Complex(-s) * tau;
    MatPoly at(2);
    at(0, 0) = ThirdPoly::z_pow(1, s * 0.5);  // dw/dt = z/2
    at(1, 0) = ThirdPoly::z_pow(1, -qdot);
    at(1, 1) = ThirdPoly::z_pow(1, -s * 0.5);
    return at - b.euler() - commutator(a, b);
}

}  // namespace piv
