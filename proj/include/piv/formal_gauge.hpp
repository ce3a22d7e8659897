#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "piv/mat_poly.hpp"

namespace piv {

enum class ExpansionPoint { at_zero, at_infinity };

// Truncated formal gauge series U = U_0 + U_1 w + ... + U_N w^N in the local
// parameter w (w = z at 0, w = 1/z at infinity).
struct GaugeSeries {
    std::vector<Eigen::MatrixXcd> terms;
    ExpansionPoint point = ExpansionPoint::at_zero;
    int order = 0;
    double u0_condition = 0.0;  // condition number of U_0

    MatPoly to_mat_poly() const {
        int n = static_cast<int>(terms.front().rows());
        int sign = point == ExpansionPoint::at_zero ? 1 : -1;
        MatPoly u(n);
        for (size_t k = 0; k < terms.size(); ++k)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    u(i, j) += ThirdPoly::term(terms[k](i, j), sign * 3 * static_cast<int>(k));
        return u;
    }
};

struct FormalGaugeResult {
    std::optional<GaugeSeries> series;
    int obstructed_order = -1;  // first order whose linear system is inconsistent
    bool ok() const { return series.has_value(); }
};

namespace detail {

// Matrix coefficient of w^k, requiring all exponents to be integral multiples
// of the local parameter with the expected sign.
inline std::optional<Eigen::MatrixXcd> series_coeff(const MatPoly& a, ExpansionPoint pt, int k) {
    int n = a.dim();
    int sign = pt == ExpansionPoint::at_zero ? 1 : -1;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = a(i, j).coeff(sign * 3 * k);
    return m;
}

inline bool expandable(const MatPoly& a, ExpansionPoint pt) {
    for (int i = 0; i < a.dim(); ++i)
        for (int j = 0; j < a.dim(); ++j)
            for (const auto& [e, c] : a(i, j).terms()) {
                if (e % 3 != 0) return false;
                if (pt == ExpansionPoint::at_zero && e < 0) return false;
                if (pt == ExpansionPoint::at_infinity && e > 0) return false;
            }
    return true;
}

}  // namespace detail

// Term-by-term solver for U with gauge_transform(A, U) == A2 modulo w^{N+1},
// i.e. U A2 - A U - (z d/dz U) = 0 order by order.  U is seeded with U_0 = I;
// the order-0 equation then requires the constant terms of A and A2 to agree.
// Each higher order is a Sylvester-type linear system; a singular system with
// an incompatible right-hand side is a resonance obstruction and aborts with
// the offending order.
inline FormalGaugeResult formal_gauge_equivalence(const MatPoly& a, const MatPoly& a2,
                                                  ExpansionPoint pt, int order) {
    FormalGaugeResult res;
    if (!detail::expandable(a, pt) || !detail::expandable(a2, pt)) {
        res.obstructed_order = 0;
        return res;
    }
    int n = a.dim();
    double s = pt == ExpansionPoint::at_zero ? 1.0 : -1.0;
    auto A = [&](int k) { return *detail::series_coeff(a, pt, k); };
    auto A2 = [&](int k) { return *detail::series_coeff(a2, pt, k); };

    Eigen::MatrixXcd a0 = A(0), a20 = A2(0);
    double scale = std::max({1.0, a0.cwiseAbs().maxCoeff(), a20.cwiseAbs().maxCoeff()});
    if ((a0 - a20).cwiseAbs().maxCoeff() > 1e-10 * scale) {
        res.obstructed_order = 0;
        return res;
    }

    std::vector<Eigen::MatrixXcd> u;
    u.push_back(Eigen::MatrixXcd::Identity(n, n));

    for (int m = 1; m <= order; ++m) {
        // RHS_m = -(sum_{j<m} U_j A2_{m-j} - A_{m-j} U_j)
        Eigen::MatrixXcd rhs = Eigen::MatrixXcd::Zero(n, n);
        for (int j = 0; j < m; ++j) rhs -= u[j] * A2(m - j) - A(m - j) * u[j];
        // L(U) = U A2_0 - A_0 U - s m U, vectorized column-major:
        // vec(U A2_0) = (A2_0^T ⊗ I) vec U, vec(A_0 U) = (I ⊗ A_0) vec U.
        Eigen::MatrixXcd sys = Eigen::MatrixXcd::Zero(n * n, n * n);
        for (int p = 0; p < n; ++p)
            for (int q = 0; q < n; ++q)
                for (int r = 0; r < n; ++r) {
                    sys(p + q * n, p + r * n) += a20(r, q);   // (A2_0^T ⊗ I)
                    sys(p + q * n, r + q * n) -= a0(p, r);    // -(I ⊗ A_0)
                }
        for (int k = 0; k < n * n; ++k) sys(k, k) -= s * m;
        Eigen::VectorXcd b(n * n);
        for (int q = 0; q < n; ++q)
            for (int p = 0; p < n; ++p) b(p + q * n) = rhs(p, q);
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd> cod(sys);
        Eigen::VectorXcd x = cod.solve(b);
        double resid = (sys * x - b).cwiseAbs().maxCoeff();
        double bscale = std::max(1.0, b.cwiseAbs().maxCoeff());
        if (resid > 1e-9 * bscale) {
            res.obstructed_order = m;
            return res;
        }
        Eigen::MatrixXcd um(n, n);
        for (int q = 0; q < n; ++q)
            for (int p = 0; p < n; ++p) um(p, q) = x(p + q * n);
        u.push_back(um);
    }

    GaugeSeries gs;
    gs.terms = std::move(u);
    gs.point = pt;
    gs.order = order;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(gs.terms.front());
    gs.u0_condition = svd.singularValues()(0) / svd.singularValues()(n - 1);
    res.series = std::move(gs);
    return res;
}

// Residual U A2 - A U - euler(U) truncated at the series order; coefficients up
// to order N below tolerance certify the formal equivalence.
inline MatPoly formal_gauge_residual(const MatPoly& a, const MatPoly& a2, const GaugeSeries& u) {
    MatPoly up = u.to_mat_poly();
    MatPoly r = up * a2 - a * up - up.euler();
    if (u.point == ExpansionPoint::at_zero) return r.truncated_above(3 * u.order);
    return r.truncated_below(-3 * u.order);
}

}  // namespace piv
