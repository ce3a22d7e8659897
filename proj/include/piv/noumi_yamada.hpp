#pragma once

#include <Eigen/Dense>
#include <array>
#include <random>

#include "piv/isomonodromy.hpp"
#include "piv/rational.hpp"

namespace piv {

// Local exponents at z = 0; the symmetric system assumes they sum to zero.
struct EpsTriple {
    Complex e1{}, e2{}, e3{};

    Complex sum() const { return e1 + e2 + e3; }
};

struct NYState {
    Complex t, f0, f1, f2;

    Complex f_sum_drift() const { return f0 + f1 + f2 - t; }
};

// f0' = f0(f1-f2) + (1-e1+e3), f1' = f1(f2-f0) + (e1-e2),
// f2' = f2(f0-f1) + (e2-e3).  The component sum is identically 1.
inline std::array<Complex, 3> ny_rhs(const NYState& s, const EpsTriple& e) {
    return {s.f0 * (s.f1 - s.f2) + 1.0 - e.e1 + e.e3,
            s.f1 * (s.f2 - s.f0) + e.e1 - e.e2,
            s.f2 * (s.f0 - s.f1) + e.e2 - e.e3};
}

inline Rhs ny_system(const EpsTriple& e) {
    return [e](Complex t, const State& y) -> State {
        auto d = ny_rhs(NYState{t, y[0], y[1], y[2]}, e);
        return {d[0], d[1], d[2]};
    };
}

// The unique zero-sum solution (q1, q2, q3) of f1-f2 = -q1+q3,
// f2-f0 = q1-q2, f0-f1 = q2-q3.
inline std::array<Complex, 3> ny_q_from_f(const NYState& s) {
    return {(2.0 * s.f2 - s.f0 - s.f1) / 3.0, (2.0 * s.f0 - s.f1 - s.f2) / 3.0,
            (2.0 * s.f1 - s.f2 - s.f0) / 3.0};
}

inline MatPoly ny_lax_A(const NYState& s, const EpsTriple& e) {
    MatPoly a(3);
    a(0, 0) = ThirdPoly(e.e1);
    a(0, 1) = ThirdPoly(s.f1);
    a(0, 2) = ThirdPoly(1.0);
    a(1, 0) = ThirdPoly::z_pow(1);
    a(1, 1) = ThirdPoly(e.e2);
    a(1, 2) = ThirdPoly(s.f2);
    a(2, 0) = ThirdPoly::z_pow(1, s.f0);
    a(2, 1) = ThirdPoly::z_pow(1);
    a(2, 2) = ThirdPoly(e.e3);
    return a;
}

inline MatPoly ny_lax_B(const NYState& s) {
    auto q = ny_q_from_f(s);
    MatPoly b(3);
    b(0, 0) = ThirdPoly(-q[0]);
    b(0, 1) = ThirdPoly(1.0);
    b(1, 1) = ThirdPoly(-q[1]);
    b(1, 2) = ThirdPoly(1.0);
    b(2, 0) = ThirdPoly::z_pow(1);
    b(2, 2) = ThirdPoly(-q[2]);
    return b;
}

// dA/dt - z dB/dz - [A, B], with dA/dt populated from ny_rhs (the epsilons
// are constant along the flow).
inline MatPoly ny_lax_residual(const NYState& s, const EpsTriple& e) {
    auto d = ny_rhs(s, e);
    MatPoly at(3);
    at(0, 1) = ThirdPoly(d[1]);
    at(1, 2) = ThirdPoly(d[2]);
    at(2, 0) = ThirdPoly::z_pow(1, d[0]);
    MatPoly a = ny_lax_A(s, e), b = ny_lax_B(s);
    return at - b.euler() - commutator(a, b);
}

// ---------------------------------------------------------------------------
// The eps <-> theta dictionary and the reduction to PIV.
//
// The forward direction follows from the simple-root increments of the
// symmetric system, alpha0 = 1-e1+e3, alpha1 = e1-e2, alpha2 = e2-e3 (sum 1):
// theta0 = 1 + alpha1 and thetainf = alpha2 - alpha0.

inline ThetaParams theta_from_eps(const EpsTriple& e) {
    return {1.0 + e.e1 - e.e2, 3.0 * (e.e1 + e.e2) - 1.0};
}

inline EpsTriple eps_from_theta(const ThetaParams& p) {
    Complex s12 = (p.thetainf + 1.0) / 3.0;  // e1 + e2
    Complex d12 = p.theta0 - 1.0;            // e1 - e2
    return {(s12 + d12) / 2.0, (s12 - d12) / 2.0, -s12};
}

// Epsilons matching a given (alpha1, alpha2) pair with zero sum.
inline EpsTriple eps_from_alpha(Complex alpha1, Complex alpha2) {
    Complex e1 = (2.0 * alpha1 + alpha2) / 3.0;
    return {e1, e1 - alpha1, e1 - alpha1 - alpha2};
}

// Effect of the cyclic permutation pi: (f0,f1,f2) -> (f1,f2,f0) on the local
// exponents: the alpha-triple rotates, (a0,a1,a2) -> (a1,a2,a0).
inline EpsTriple eps_cycle(const EpsTriple& e) {
    Complex a0 = 1.0 - e.e1 + e.e3, a1 = e.e1 - e.e2, a2 = e.e2 - e.e3;
    return eps_from_alpha(a2, a0);
}

// Residual of the pre-rescaling PIV satisfied by f1:
// y'' = (y')^2/2y + (3/2)y^3 - 2ty^2 + (t^2/2 + thetainf)y - (theta0-1)^2/2y.
inline Complex ny_form_piv_residual(Complex t, Complex y, Complex yp, Complex ypp,
                                    const ThetaParams& p) {
    if (y == Complex(0.0)) throw PoleError("ny_form_piv_residual: y = 0");
    return ypp - (yp * yp / (2.0 * y) + 1.5 * y * y * y - 2.0 * t * y * y +
                  (t * t / 2.0 + p.thetainf) * y -
                  (p.theta0 - 1.0) * (p.theta0 - 1.0) / (2.0 * y));
}

// One mapped sample: s = sqrt(2) t, q(s) = -f1(t)/sqrt(2), q' = -f1'/2.
// The direction of the rescaling t -> t/sqrt(2), y -> -sqrt(2) y is frozen by
// the residual regression tests.
inline PIVState f1_sample_to_piv(const NYState& s, const EpsTriple& e) {
    constexpr double r2 = 1.4142135623730951;
    auto d = ny_rhs(s, e);
    return {r2 * s.t, -s.f1 / r2, -d[1] / 2.0};
}

struct PIVSampleSeq {
    std::vector<PIVState> samples;
    ThetaParams params;
};

inline PIVSampleSeq f1_to_piv(const Trajectory& traj, const EpsTriple& e) {
    PIVSampleSeq out;
    out.params = theta_from_eps(e);
    out.samples.reserve(traj.samples.size());
    for (const auto& s : traj.samples)
        out.samples.push_back(
            f1_sample_to_piv(NYState{s.t, s.state[0], s.state[1], s.state[2]}, e));
    return out;
}

// ---------------------------------------------------------------------------
// Invariant lattices at infinity.

struct LatticeId {
    int index = 0;  // 0, 1, 2
    int twist = 0;  // lattice z^twist Lambda_index
};

inline Complex zeta3() { return std::polar(1.0, 2.0 * kPi / 3.0); }

// Generalized eigenvalues q_j = zeta^{2j} z^{2/3} + zeta^j (t/3) z^{1/3}.
inline MatPoly ny_infinity_diag(Complex t) {
    Complex z = zeta3();
    MatPoly d(3);
    for (int j = 0; j < 3; ++j) {
        Complex w2 = std::pow(z, 2 * j), w1 = std::pow(z, j);
        d(j, j) = ThirdPoly::term(w2, 2) + ThirdPoly::term(w1 * t / 3.0, 1);
    }
    return d;
}

// Columns are the lattice basis vectors in e-coordinates:
// h0 = e0+e1+e2, h1 = z^{1/3}(e0 + zeta e1 + zeta^2 e2),
// h2 = z^{-1/3}(e0 + zeta^2 e1 + zeta e2), with per-column z-twists for
// Lambda_1 = <h0, z^{-1}h1, h2> and Lambda_2 = <z^{-1}h0, z^{-1}h1, h2>.
inline MatPoly h_basis(const LatticeId& id) {
    if (id.index < 0 || id.index > 2) throw std::invalid_argument("lattice index must be 0..2");
    Complex z = zeta3();
    std::array<int, 3> colshift3{0, 0, 0};  // exponent numerators over 3
    if (id.index >= 1) colshift3[1] = -3;
    if (id.index == 2) colshift3[0] = -3;
    std::array<int, 3> base3{0, 1, -1};  // z^{1/3} and z^{-1/3} ramification
    MatPoly h(3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            Complex c = std::pow(z, (i * j) % 3);
            h(i, j) = ThirdPoly::term(c, base3[j] + colshift3[j] + 3 * id.twist);
        }
    return h;
}

// Matrix of D = z d/dz + diag(q0,q1,q2) with respect to the lattice basis.
inline MatPoly lattice_matrix(const LatticeId& id, Complex t) {
    return gauge_transform(ny_infinity_diag(t), h_basis(id));
}

// Invariance predicate z^{-1} D(Lambda) in Lambda: integral exponents within
// {0, 1} only.
inline bool is_invariant_lattice_matrix(const MatPoly& m) {
    for (int i = 0; i < m.dim(); ++i)
        for (int j = 0; j < m.dim(); ++j)
            for (const auto& [e, c] : m(i, j).terms())
                if (e % 3 != 0 || e < 0 || e > 3) return false;
    return true;
}

// The displayed closed forms for Lambda_0 and Lambda_1.
inline MatPoly lattice_display(int index, Complex t) {
    MatPoly m(3);
    Complex t3 = t / 3.0;
    if (index == 0) {
        m(0, 1) = ThirdPoly::z_pow(1);
        m(0, 2) = ThirdPoly(t3);
        m(1, 0) = ThirdPoly(t3);
        m(1, 1) = ThirdPoly(1.0 / 3.0);
        m(1, 2) = ThirdPoly(1.0);
        m(2, 0) = ThirdPoly::z_pow(1);
        m(2, 1) = ThirdPoly::z_pow(1, t3);
        m(2, 2) = ThirdPoly(-1.0 / 3.0);
        return m;
    }
    if (index == 1) {
        m(0, 1) = ThirdPoly(1.0);
        m(0, 2) = ThirdPoly(t3);
        m(1, 0) = ThirdPoly::z_pow(1, t3);
        m(1, 1) = ThirdPoly(-2.0 / 3.0);
        m(1, 2) = ThirdPoly::z_pow(1);
        m(2, 0) = ThirdPoly::z_pow(1);
        m(2, 1) = ThirdPoly(t3);
        m(2, 2) = ThirdPoly(-1.0 / 3.0);
        return m;
    }
    throw std::invalid_argument("only Lambda_0 and Lambda_1 are displayed");
}

// Max coefficient deviation between the Puiseux basis-change computation and
// the displayed Lambda_0 matrix.
inline double verify_h_basis_change(Complex t) {
    MatPoly diff = lattice_matrix(LatticeId{0, 0}, t) - lattice_display(0, t);
    return diff.max_abs_coeff();
}

// ---------------------------------------------------------------------------
// Normal-form equations behind the moduli identification: for the connection
// z d/dz + A0 + A1 z (A0 upper-triangular with diagonal eps, A1 lower-
// triangular nilpotent), solve
//   A1 = U0^{-1} N U0,    A0 = U0^{-1} M U0 + [A1, U_{-1}]
// with N, M the z-degree split of the Lambda_0 matrix.

inline Eigen::Matrix3cd normal_form_N(Complex t) {
    Eigen::Matrix3cd n = Eigen::Matrix3cd::Zero();
    n(0, 1) = 1.0;
    n(2, 0) = 1.0;
    n(2, 1) = t / 3.0;
    return n;
}

inline Eigen::Matrix3cd normal_form_M(Complex t) {
    Eigen::Matrix3cd m = Eigen::Matrix3cd::Zero();
    m(0, 2) = t / 3.0;
    m(1, 0) = t / 3.0;
    m(1, 1) = 1.0 / 3.0;
    m(1, 2) = 1.0;
    m(2, 2) = -1.0 / 3.0;
    return m;
}

// z-degree split of the symmetric-system connection matrix.
inline std::pair<Eigen::Matrix3cd, Eigen::Matrix3cd> ny_constant_split(const NYState& s,
                                                                       const EpsTriple& e) {
    Eigen::Matrix3cd a0 = Eigen::Matrix3cd::Zero(), a1 = Eigen::Matrix3cd::Zero();
    a0(0, 0) = e.e1;
    a0(0, 1) = s.f1;
    a0(0, 2) = 1.0;
    a0(1, 1) = e.e2;
    a0(1, 2) = s.f2;
    a0(2, 2) = e.e3;
    a1(1, 0) = 1.0;
    a1(2, 0) = s.f0;
    a1(2, 1) = 1.0;
    return {a0, a1};
}

struct NormalFormResult {
    bool success = false;
    Eigen::Matrix3cd u0, um1;
    double residual = std::numeric_limits<double>::infinity();
};

inline double normal_form_residual(const Eigen::Matrix3cd& a0, const Eigen::Matrix3cd& a1,
                                   const Eigen::Matrix3cd& u0, const Eigen::Matrix3cd& um1,
                                   Complex t) {
    Eigen::Matrix3cd ui = u0.inverse();
    Eigen::Matrix3cd r1 = a1 - ui * normal_form_N(t) * u0;
    Eigen::Matrix3cd r0 = a0 - ui * normal_form_M(t) * u0 - (a1 * um1 - um1 * a1);
    return std::max(r1.cwiseAbs().maxCoeff(), r0.cwiseAbs().maxCoeff());
}

namespace detail {

// Basis (K^2 v, K v, v) putting a regular nilpotent K into the upper Jordan
// block form; throws if K is not regular nilpotent.
inline Eigen::Matrix3cd regular_nilpotent_frame(const Eigen::Matrix3cd& k, std::mt19937& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int attempt = 0; attempt < 64; ++attempt) {
        Eigen::Vector3cd v;
        for (int i = 0; i < 3; ++i) v(i) = Complex(u(rng), u(rng));
        Eigen::Vector3cd kv = k * v, kkv = k * kv;
        Eigen::Matrix3cd p;
        p.col(0) = kkv;
        p.col(1) = kv;
        p.col(2) = v;
        Eigen::JacobiSVD<Eigen::Matrix3cd> svd(p);
        if (svd.singularValues()(2) > 1e-8 * svd.singularValues()(0)) return p;
    }
    throw std::invalid_argument("matrix is not regular nilpotent");
}

}  // namespace detail

// Newton solve for U0 = (c0 + c1 N + c2 N^2) S over c in C^3, where S is a
// fixed similarity with S A1 S^{-1} = N; the remaining conditions are the
// three trace pairings of U0 A0 U0^{-1} - M against the centralizer of N.
// U_{-1} then comes from a least-squares Sylvester solve.  U0 is unique up to
// scale; the anchor row fixes the scale per run.
inline NormalFormResult ny_normal_form_check(const Eigen::Matrix3cd& a0,
                                             const Eigen::Matrix3cd& a1, Complex t,
                                             unsigned seed = 12345) {
    std::mt19937 rng(seed);
    Eigen::Matrix3cd n = normal_form_N(t), m = normal_form_M(t);
    Eigen::Matrix3cd n2 = n * n;
    NormalFormResult best;

    Eigen::Matrix3cd s;
    try {
        Eigen::Matrix3cd pa = detail::regular_nilpotent_frame(a1, rng);
        Eigen::Matrix3cd pn = detail::regular_nilpotent_frame(n, rng);
        s = pn * pa.inverse();
    } catch (const std::invalid_argument&) {
        return best;
    }

    auto residual_mat = [&](const Eigen::Vector3cd& c) -> Eigen::Matrix3cd {
        Eigen::Matrix3cd u0 = (c(0) * Eigen::Matrix3cd::Identity() + c(1) * n + c(2) * n2) * s;
        return u0 * a0 * u0.inverse() - m;
    };
    auto fvec = [&](const Eigen::Vector3cd& c) -> Eigen::Vector3cd {
        Eigen::Matrix3cd r = residual_mat(c);
        return {r.trace(), (r * n).trace(), (r * n2).trace()};
    };

    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int restart = 0; restart < 50; ++restart) {
        Eigen::Vector3cd c;
        if (restart == 0)
            c << 1.0, 0.0, 0.0;
        else
            for (int i = 0; i < 3; ++i) c(i) = Complex(u(rng), u(rng));
        Eigen::Vector3cd anchor = c;
        bool diverged = false;
        for (int iter = 0; iter < 80 && !diverged; ++iter) {
            Eigen::Vector3cd f = fvec(c);
            if (f.cwiseAbs().maxCoeff() < 1e-12) break;
            // holomorphic in c: real-step differences give the complex Jacobian
            Eigen::Matrix4cd j = Eigen::Matrix4cd::Zero();
            Eigen::Vector4cd rhs;
            const double h = 1e-7;
            for (int k = 0; k < 3; ++k) {
                Eigen::Vector3cd ck = c;
                ck(k) += h;
                Eigen::Vector3cd fk = (fvec(ck) - f) / h;
                for (int r = 0; r < 3; ++r) j(r, k) = fk(r);
                j(3, k) = std::conj(anchor(k));
            }
            rhs << -f(0), -f(1), -f(2), Complex(1.0) - anchor.dot(c);
            Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd> cod(j.block(0, 0, 4, 3));
            Eigen::Vector3cd step = cod.solve(rhs);
            double damp = 1.0;
            for (int half = 0; half < 20; ++half, damp *= 0.5) {
                Eigen::Vector3cd cn = c + damp * step;
                Eigen::Matrix3cd u0c =
                    (cn(0) * Eigen::Matrix3cd::Identity() + cn(1) * n + cn(2) * n2) * s;
                if (std::abs(u0c.determinant()) < 1e-12) continue;
                if (fvec(cn).cwiseAbs().maxCoeff() < f.cwiseAbs().maxCoeff()) {
                    c = cn;
                    break;
                }
                if (half == 19) diverged = true;
            }
        }
        if (fvec(c).cwiseAbs().maxCoeff() > 1e-10) continue;

        Eigen::Matrix3cd u0 = (c(0) * Eigen::Matrix3cd::Identity() + c(1) * n + c(2) * n2) * s;
        if (std::abs(u0.determinant()) < 1e-12) continue;
        // [N, V] = R in least squares; R lies in im(ad N) once the trace
        // pairings vanish.
        Eigen::Matrix3cd r = residual_mat(c);
        Eigen::MatrixXcd sys = Eigen::MatrixXcd::Zero(9, 9);
        Eigen::VectorXcd b(9);
        for (int p = 0; p < 3; ++p)
            for (int q = 0; q < 3; ++q) {
                b(p + 3 * q) = r(p, q);
                for (int k = 0; k < 3; ++k) {
                    sys(p + 3 * q, k + 3 * q) += n(p, k);   // N V
                    sys(p + 3 * q, p + 3 * k) -= n(k, q);   // -V N
                }
            }
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd> cod(sys);
        Eigen::VectorXcd x = cod.solve(b);
        Eigen::Matrix3cd v;
        for (int p = 0; p < 3; ++p)
            for (int q = 0; q < 3; ++q) v(p, q) = x(p + 3 * q);
        Eigen::Matrix3cd um1 = u0.inverse() * v * u0;
        double res = normal_form_residual(a0, a1, u0, um1, t);
        if (res < best.residual) {
            best.residual = res;
            best.u0 = u0;
            best.um1 = um1;
            best.success = res < 1e-8;
        }
        if (best.success) break;
    }
    return best;
}

// ---------------------------------------------------------------------------
// Exact bijectivity case list on mu_j = e^{2 pi i eps_j}: mu_j = mu_k exactly
// when eps_j - eps_k is an integer.
inline bool bijectivity_cases(const Rational& e1, const Rational& e2, const Rational& e3) {
    if (e1 + e2 + e3 != Rational(0)) throw std::invalid_argument("eps must sum to zero");
    bool m12 = is_integer(e1 - e2), m13 = is_integer(e1 - e3), m23 = is_integer(e2 - e3);
    if (!m12 && !m13 && !m23) return true;
    if (m12 && !m13) return e2 - e1 >= Rational(0);
    if (m13 && !m12) return e3 - e1 >= Rational(0);
    if (m23 && !m12) return e3 - e2 >= Rational(0);
    return e2 - e1 >= Rational(0) && e3 - e2 >= Rational(0);  // all equal
}

}  // namespace piv
