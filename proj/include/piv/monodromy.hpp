#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "piv/core.hpp"
#include "piv/rational.hpp"

namespace piv {

// ---------------------------------------------------------------------------
// Rank 2: formal monodromy diag(alpha, alpha^{-1}) followed by four
// alternating unipotent Stokes factors.

struct Rank2Stokes {
    Complex alpha;
    Complex a1, a2, a3, a4;
};

inline Eigen::Matrix2cd rank2_top_monodromy(const Rank2Stokes& s) {
    if (s.alpha == Complex(0.0)) throw std::invalid_argument("alpha must be nonzero");
    Eigen::Matrix2cd m;
    m << s.alpha, 0.0, 0.0, 1.0 / s.alpha;
    Eigen::Matrix2cd l1, u2, l3, u4;
    l1 << 1.0, 0.0, s.a1, 1.0;
    u2 << 1.0, s.a2, 0.0, 1.0;
    l3 << 1.0, 0.0, s.a3, 1.0;
    u4 << 1.0, s.a4, 0.0, 1.0;
    return m * l1 * u2 * l3 * u4;
}

struct Rank2FiberData {
    Complex trace, alpha;
    bool singular = false;  // top monodromy is +-identity
};

inline Rank2FiberData rank2_fiber_data(const Rank2Stokes& s) {
    Eigen::Matrix2cd m = rank2_top_monodromy(s);
    Rank2FiberData d{m.trace(), s.alpha, false};
    for (double sign : {1.0, -1.0})
        if ((m - sign * Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() < 1e-10)
            d.singular = true;
    return d;
}

// Level structure: a chosen eigenvalue beta of the topological monodromy.
inline std::pair<Complex, Complex> rank2_level_param(const Rank2Stokes& s, Complex beta) {
    Complex tr = rank2_top_monodromy(s).trace();
    double scale = std::max({1.0, std::abs(beta) * std::abs(beta), std::abs(tr * beta)});
    if (std::abs(beta * beta - tr * beta + 1.0) > 1e-8 * scale)
        throw std::invalid_argument("beta is not an eigenvalue of the topological monodromy");
    return {beta, s.alpha};
}

// ---------------------------------------------------------------------------
// Rank 3: cyclic formal monodromy times four Stokes factors; templated on the
// scalar so the closed-form identities can be checked in exact rationals.

template <typename T>
using Mat3 = std::array<std::array<T, 3>, 3>;

template <typename T>
Mat3<T> mat3_mul(const Mat3<T>& a, const Mat3<T>& b) {
    Mat3<T> r{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            T s{};
            for (int k = 0; k < 3; ++k) s = s + a[i][k] * b[k][j];
            r[i][j] = s;
        }
    return r;
}

template <typename T>
Mat3<T> mat3_identity() {
    Mat3<T> r{};
    for (int i = 0; i < 3; ++i) r[i][i] = T(1);
    return r;
}

template <typename T>
struct Rank3StokesT {
    T x1, x2, x3, x4;
};

using Rank3Stokes = Rank3StokesT<Complex>;

// Product of the cyclic formal monodromy and the Stokes factors for the
// singular directions in [0, 2 pi).
template <typename T>
Mat3<T> rank3_stokes_product(const Rank3StokesT<T>& x) {
    Mat3<T> formal{};  // e1 -> e2 -> e3 -> e1
    formal[0][2] = T(1);
    formal[1][0] = T(1);
    formal[2][1] = T(1);
    Mat3<T> s4 = mat3_identity<T>();
    s4[2][0] = x.x4;
    Mat3<T> s3 = mat3_identity<T>();
    s3[1][0] = x.x3;
    Mat3<T> s2 = mat3_identity<T>();
    s2[1][2] = x.x2;
    Mat3<T> s1 = mat3_identity<T>();
    s1[0][2] = x.x1;
    return mat3_mul(mat3_mul(mat3_mul(mat3_mul(formal, s4), s3), s2), s1);
}

template <typename T>
Mat3<T> rank3_closed_form(const Rank3StokesT<T>& x) {
    Mat3<T> m{};
    m[0][0] = x.x4;
    m[0][2] = x.x1 * x.x4 + T(1);
    m[1][0] = T(1);
    m[1][2] = x.x1;
    m[2][0] = x.x3;
    m[2][1] = T(1);
    m[2][2] = x.x1 * x.x3 + x.x2;
    return m;
}

// Topological monodromy; asserts the product against the closed form.
inline Eigen::Matrix3cd rank3_top_monodromy(const Rank3Stokes& x) {
    Mat3<Complex> p = rank3_stokes_product(x), c = rank3_closed_form(x);
    Eigen::Matrix3cd m;
    double scale = 1.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) scale = std::max(scale, std::abs(c[i][j]));
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            if (std::abs(p[i][j] - c[i][j]) > 1e-13 * scale)
                throw std::runtime_error("Stokes product disagrees with closed form");
            m(i, j) = c[i][j];
        }
    return m;
}

// lambda^3 - e1 lambda^2 + e2 lambda - 1
template <typename T>
struct CharPoly3T {
    T e1, e2;
};

using CharPoly3 = CharPoly3T<Complex>;

template <typename T>
CharPoly3T<T> rank3_charpoly(const Rank3StokesT<T>& x) {
    return {x.x2 + x.x4 + x.x1 * x.x3, T(0) - x.x1 - x.x3 + x.x2 * x.x4};
}

// ---------------------------------------------------------------------------
// Fiber classification: regular / A1 / A2 plus Jordan data.

enum class FiberType { regular, a1, a2, indeterminate };

inline const char* to_string(FiberType t) {
    switch (t) {
        case FiberType::regular: return "regular";
        case FiberType::a1: return "A1";
        case FiberType::a2: return "A2";
        case FiberType::indeterminate: return "indeterminate";
    }
    return "?";
}

namespace detail {

// Numerical rank with the 1e-8 relative threshold; singular values inside the
// [1e-10, 1e-6] relative band make the decision indeterminate.
inline std::pair<int, bool> rank_with_band(const Eigen::MatrixXcd& m) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
    const auto& sv = svd.singularValues();
    double top = std::max(sv(0), 1.0);
    int rank = 0;
    bool band = false;
    for (int i = 0; i < sv.size(); ++i) {
        double rel = sv(i) / top;
        if (rel > 1e-8) ++rank;
        if (rel > 1e-10 && rel < 1e-6) band = true;
    }
    return {rank, band};
}

}  // namespace detail

struct FiberClassification {
    FiberType type = FiberType::regular;
    int jacobian_rank = 2;           // of (e1, e2) with respect to x
    std::vector<Complex> eigenvalues;  // distinct, clustered at 1e-6
    std::vector<int> geometric_mult;   // matching entries of `eigenvalues`
    int jordan_blocks = 3;
};

inline FiberClassification fiber_singularity(const Rank3Stokes& x) {
    FiberClassification out;
    // Jacobian of e1 = x2+x4+x1x3 and e2 = -x1-x3+x2x4.
    Eigen::MatrixXcd jac(2, 4);
    jac << x.x3, 1.0, x.x1, 1.0, -1.0, x.x4, -1.0, x.x2;
    auto [jrank, jband] = detail::rank_with_band(jac);
    out.jacobian_rank = jrank;

    Eigen::Matrix3cd m = rank3_top_monodromy(x);
    Eigen::ComplexEigenSolver<Eigen::Matrix3cd> es(m);
    std::vector<Complex> evs{es.eigenvalues()(0), es.eigenvalues()(1), es.eigenvalues()(2)};
    bool band = jband;
    out.jordan_blocks = 0;
    for (const Complex& ev : evs) {
        bool seen = false;
        for (const Complex& d : out.eigenvalues)
            if (std::abs(d - ev) < 1e-6) seen = true;
        if (seen) continue;
        auto [r, b] = detail::rank_with_band(m - ev * Eigen::Matrix3cd::Identity());
        out.eigenvalues.push_back(ev);
        out.geometric_mult.push_back(3 - r);
        out.jordan_blocks += 3 - r;
        band = band || b;
    }

    if (band) {
        out.type = FiberType::indeterminate;
        return out;
    }
    if (jrank == 2) {
        out.type = FiberType::regular;
        return out;
    }
    // Singular points of the fiber sit at x = (-1/a, a, -1/a, a): type A2 at
    // the triple-root parameters a^3 = 1, type A1 otherwise.
    Complex a = x.x2;
    out.type = std::abs(a * a * a - 1.0) < 1e-8 ? FiberType::a2 : FiberType::a1;
    return out;
}

// ---------------------------------------------------------------------------
// Invariant flags: L1 = C y with M y = mu1 y, L2 = ker z with z M = mu3 z,
// and the incidence sum y_j z_j = 0.

enum class FlagComponents { point, p1, two_p1, indeterminate };

inline const char* to_string(FlagComponents c) {
    switch (c) {
        case FlagComponents::point: return "point";
        case FlagComponents::p1: return "P1";
        case FlagComponents::two_p1: return "two-intersecting-P1s";
        case FlagComponents::indeterminate: return "indeterminate";
    }
    return "?";
}

struct Flag {
    Eigen::Vector3cd y;
    Eigen::RowVector3cd z;
};

struct FlagSet {
    FlagComponents components = FlagComponents::point;
    int right_dim = 1;  // eigenspace of mu1
    int left_dim = 1;   // left eigenspace of mu3
    std::vector<Flag> representatives;
};

namespace detail {

inline Eigen::MatrixXcd kernel_basis(const Eigen::Matrix3cd& m) {
    Eigen::JacobiSVD<Eigen::Matrix3cd> svd(m, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    double top = std::max(sv(0), 1.0);
    int nullity = 0;
    for (int i = 0; i < 3; ++i)
        if (sv(i) / top <= 1e-8) ++nullity;
    return svd.matrixV().rightCols(nullity);
}

}  // namespace detail

inline FlagSet invariant_flags(const Rank3Stokes& x, const std::array<Complex, 3>& mu) {
    Eigen::Matrix3cd m = rank3_top_monodromy(x);
    CharPoly3 cp = rank3_charpoly(x);
    for (const Complex& u : mu) {
        Complex p = u * u * u - cp.e1 * u * u + cp.e2 * u - 1.0;
        if (std::abs(p) > 1e-8 * std::max(1.0, std::pow(std::abs(u), 3)))
            throw std::invalid_argument("mu is not an eigenvalue triple of M(x)");
    }

    Eigen::MatrixXcd right = detail::kernel_basis(m - mu[0] * Eigen::Matrix3cd::Identity());
    Eigen::MatrixXcd left =
        detail::kernel_basis((m - mu[2] * Eigen::Matrix3cd::Identity()).transpose());
    FlagSet out;
    out.right_dim = static_cast<int>(right.cols());
    out.left_dim = static_cast<int>(left.cols());

    if (out.right_dim == 1 && out.left_dim == 1) {
        out.components = FlagComponents::point;
        Flag f{right.col(0), left.col(0).transpose()};
        if (std::abs(Complex(f.z * f.y)) > 1e-9) out.components = FlagComponents::indeterminate;
        out.representatives.push_back(f);
        return out;
    }
    if (out.right_dim >= 2 && out.left_dim >= 2) {
        // Triple eigenvalue, two Jordan blocks: y free in the 2-dim right
        // eigenspace (one line of flags with z fixed by y-orthogonality) and
        // symmetrically for z; the lines meet in one flag.
        out.components = FlagComponents::two_p1;
        for (int i = 0; i < 2; ++i) {
            Eigen::Vector3cd y = right.col(i);
            // unique-up-to-scale z in the left eigenspace with z y = 0
            Eigen::RowVector3cd z0 = left.col(0).transpose(), z1 = left.col(1).transpose();
            Complex c0 = z0 * y, c1 = z1 * y;
            out.representatives.push_back({y, c1 * z0 - c0 * z1});
        }
        return out;
    }
    // Double eigenvalue at the singular point: a P^1 of lines C y inside the
    // 2-dim eigenspace; z is the covector cutting out that eigenspace.
    out.components = FlagComponents::p1;
    if (out.right_dim >= 2) {
        Eigen::RowVector3cd z = left.col(0).transpose();
        for (int i = 0; i < 2; ++i) {
            Eigen::Vector3cd y = right.col(i);
            Complex c = z * y;
            if (std::abs(c) > 1e-9) {
                // project y into ker z within the eigenspace
                Eigen::Vector3cd other = right.col(1 - i);
                Complex co = z * other;
                y = co * y - c * other;
            }
            out.representatives.push_back({y, z});
        }
    } else {
        Eigen::Vector3cd y = right.col(0);
        for (int i = 0; i < 2; ++i) {
            Eigen::RowVector3cd z = left.col(i).transpose();
            Complex c = z * y;
            if (std::abs(c) > 1e-9) {
                Eigen::RowVector3cd other = left.col(1 - i).transpose();
                Complex co = other * y;
                z = co * z - c * other;
            }
            out.representatives.push_back({y, z});
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Singular directions for q_k - q_l: phi = arg(zeta^{2k} - zeta^{2l}) and
// d = 3 pi/2 - (3/2) phi mod 3 pi, on the 3-fold cover (d in [0, 3 pi)).

struct SingularDirection {
    int k, l;
    double phi;  // in [0, 2 pi)
    double d;    // in [0, 3 pi)
};

inline std::vector<SingularDirection> singular_directions() {
    const Complex zeta = std::polar(1.0, 2.0 * kPi / 3.0);
    const std::array<std::pair<int, int>, 6> pairs{
        {{0, 1}, {1, 0}, {0, 2}, {2, 0}, {1, 2}, {2, 1}}};
    std::vector<SingularDirection> rows;
    for (auto [k, l] : pairs) {
        double phi = std::arg(std::pow(zeta, 2 * k) - std::pow(zeta, 2 * l));
        if (phi < 0) phi += 2.0 * kPi;
        double d = std::fmod(1.5 * kPi - 1.5 * phi, 3.0 * kPi);
        if (d < 0) d += 3.0 * kPi;
        rows.push_back({k, l, phi, d});
    }
    return rows;
}

}  // namespace piv
