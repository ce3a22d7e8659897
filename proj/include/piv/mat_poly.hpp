#pragma once

#include <cassert>
#include <vector>

#include "piv/third_poly.hpp"

namespace piv {

// Square matrix (n = 2 or 3) of ThirdPoly entries.  Carries every connection
// and Lax matrix in the library.  Immutable-by-convention: operations return
// new values.
class MatPoly {
public:
    explicit MatPoly(int n) : n_(n), e_(static_cast<size_t>(n) * n) { assert(n == 2 || n == 3); }

    static MatPoly zero(int n) { return MatPoly(n); }
    static MatPoly identity(int n) {
        MatPoly m(n);
        for (int i = 0; i < n; ++i) m.at(i, i) = ThirdPoly(1.0);
        return m;
    }

    int dim() const { return n_; }

    ThirdPoly& at(int i, int j) { return e_[static_cast<size_t>(i) * n_ + j]; }
    const ThirdPoly& at(int i, int j) const { return e_[static_cast<size_t>(i) * n_ + j]; }
    ThirdPoly& operator()(int i, int j) { return at(i, j); }
    const ThirdPoly& operator()(int i, int j) const { return at(i, j); }

    friend MatPoly operator+(const MatPoly& a, const MatPoly& b) {
        assert(a.n_ == b.n_);
        MatPoly r(a.n_);
        for (size_t k = 0; k < a.e_.size(); ++k) r.e_[k] = a.e_[k] + b.e_[k];
        return r;
    }
    friend MatPoly operator-(const MatPoly& a, const MatPoly& b) {
        assert(a.n_ == b.n_);
        MatPoly r(a.n_);
        for (size_t k = 0; k < a.e_.size(); ++k) r.e_[k] = a.e_[k] - b.e_[k];
        return r;
    }
    MatPoly operator-() const {
        MatPoly r(n_);
        for (size_t k = 0; k < e_.size(); ++k) r.e_[k] = -e_[k];
        return r;
    }
    friend MatPoly operator*(const MatPoly& a, const MatPoly& b) {
        assert(a.n_ == b.n_);
        MatPoly r(a.n_);
        for (int i = 0; i < a.n_; ++i)
            for (int j = 0; j < a.n_; ++j) {
                ThirdPoly s;
                for (int k = 0; k < a.n_; ++k) s += a.at(i, k) * b.at(k, j);
                r.at(i, j) = s;
            }
        return r;
    }
    friend MatPoly operator*(const ThirdPoly& s, const MatPoly& m) {
        MatPoly r(m.n_);
        for (size_t k = 0; k < m.e_.size(); ++k) r.e_[k] = s * m.e_[k];
        return r;
    }
    friend MatPoly operator*(Complex s, const MatPoly& m) { return ThirdPoly(s) * m; }

    MatPoly euler() const {
        MatPoly r(n_);
        for (size_t k = 0; k < e_.size(); ++k) r.e_[k] = e_[k].euler();
        return r;
    }

    ThirdPoly trace() const {
        ThirdPoly s;
        for (int i = 0; i < n_; ++i) s += at(i, i);
        return s;
    }

    ThirdPoly det() const {
        if (n_ == 2) return at(0, 0) * at(1, 1) - at(0, 1) * at(1, 0);
        ThirdPoly s;
        s += at(0, 0) * (at(1, 1) * at(2, 2) - at(1, 2) * at(2, 1));
        s -= at(0, 1) * (at(1, 0) * at(2, 2) - at(1, 2) * at(2, 0));
        s += at(0, 2) * (at(1, 0) * at(2, 1) - at(1, 1) * at(2, 0));
        return s;
    }

    // Inverse over Laurent/Puiseux polynomials: requires det to be a single
    // monomial (unit).  Throws SingularGaugeError otherwise.
    MatPoly inverse() const {
        ThirdPoly d = det();
        if (!d.is_monomial()) throw SingularGaugeError("singular gauge");
        auto [exp3, c] = *d.terms().begin();
        MatPoly adj(n_);
        if (n_ == 2) {
            adj.at(0, 0) = at(1, 1);
            adj.at(0, 1) = -at(0, 1);
            adj.at(1, 0) = -at(1, 0);
            adj.at(1, 1) = at(0, 0);
        } else {
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) {
                    int r0 = (j + 1) % 3, r1 = (j + 2) % 3;
                    int c0 = (i + 1) % 3, c1 = (i + 2) % 3;
                    adj.at(i, j) = at(r0, c0) * at(r1, c1) - at(r0, c1) * at(r1, c0);
                }
        }
        MatPoly r(n_);
        for (size_t k = 0; k < adj.e_.size(); ++k) r.e_[k] = adj.e_[k].divided_by_monomial(c, exp3);
        return r;
    }

    double max_abs_coeff() const {
        double m = 0.0;
        for (const auto& p : e_) m = std::max(m, p.max_abs_coeff());
        return m;
    }

    MatPoly truncated_above(int hi3) const {
        MatPoly r(n_);
        for (size_t k = 0; k < e_.size(); ++k) r.e_[k] = e_[k].truncated_above(hi3);
        return r;
    }
    MatPoly truncated_below(int lo3) const {
        MatPoly r(n_);
        for (size_t k = 0; k < e_.size(); ++k) r.e_[k] = e_[k].truncated_below(lo3);
        return r;
    }

private:
    int n_;
    std::vector<ThirdPoly> e_;
};

inline MatPoly commutator(const MatPoly& a, const MatPoly& b) { return a * b - b * a; }

// Gauge action on the operator z d/dz + A: if (z d/dz + A)v = 0 and v = g w,
// then (z d/dz + A')w = 0 with A' = g^{-1} A g + g^{-1} (z d/dz g).
inline MatPoly gauge_transform(const MatPoly& a, const MatPoly& g) {
    MatPoly gi = g.inverse();
    return gi * a * g + gi * g.euler();
}

}  // namespace piv
