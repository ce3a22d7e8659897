#pragma once

#include <cmath>
#include <map>
#include <ostream>
#include <sstream>

#include "piv/core.hpp"

namespace piv {

// Laurent/Puiseux polynomial in z with complex coefficients and exponents in
// thirds.  The key of a term is the exponent *numerator* over the fixed
// denominator 3, so z^k is stored under 3k and z^{1/3} under 1.  Exponent
// bookkeeping is exact integer arithmetic; only the coefficients are
// approximate.  Stored coefficients are never exactly zero (normal form).
class ThirdPoly {
public:
    using Terms = std::map<int, Complex>;

    ThirdPoly() = default;
    ThirdPoly(Complex c) { add_term(c, 0); }         // NOLINT: implicit constant
    ThirdPoly(double c) { add_term(Complex(c), 0); }  // NOLINT

    // c * z^{num3/3}
    static ThirdPoly term(Complex c, int num3) {
        ThirdPoly p;
        p.add_term(c, num3);
        return p;
    }
    // c * z^k, integer exponent
    static ThirdPoly z_pow(int k, Complex c = 1.0) { return term(c, 3 * k); }

    const Terms& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }

    Complex coeff(int num3) const {
        auto it = terms_.find(num3);
        return it == terms_.end() ? Complex(0.0) : it->second;
    }
    Complex coeff_z(int k) const { return coeff(3 * k); }

    ThirdPoly& operator+=(const ThirdPoly& o) {
        for (const auto& [e, c] : o.terms_) add_term(c, e);
        return *this;
    }
    ThirdPoly& operator-=(const ThirdPoly& o) {
        for (const auto& [e, c] : o.terms_) add_term(-c, e);
        return *this;
    }
    friend ThirdPoly operator+(ThirdPoly a, const ThirdPoly& b) { return a += b; }
    friend ThirdPoly operator-(ThirdPoly a, const ThirdPoly& b) { return a -= b; }
    ThirdPoly operator-() const {
        ThirdPoly r;
        for (const auto& [e, c] : terms_) r.terms_[e] = -c;
        return r;
    }

    friend ThirdPoly operator*(const ThirdPoly& a, const ThirdPoly& b) {
        ThirdPoly r;
        for (const auto& [ea, ca] : a.terms_)
            for (const auto& [eb, cb] : b.terms_) r.add_term(ca * cb, ea + eb);
        return r;
    }
    ThirdPoly& operator*=(const ThirdPoly& o) { return *this = *this * o; }

    friend ThirdPoly operator*(Complex s, const ThirdPoly& p) {
        ThirdPoly r;
        for (const auto& [e, c] : p.terms_) r.add_term(s * c, e);
        return r;
    }
    friend ThirdPoly operator*(const ThirdPoly& p, Complex s) { return s * p; }

    // The Euler operator z d/dz: maps z^e to e z^e.
    ThirdPoly euler() const {
        ThirdPoly r;
        for (const auto& [e, c] : terms_) r.add_term(c * (static_cast<double>(e) / 3.0), e);
        return r;
    }

    // Multiply by z^{num3/3}.
    ThirdPoly shifted(int num3) const {
        ThirdPoly r;
        for (const auto& [e, c] : terms_) r.terms_[e + num3] = c;
        return r;
    }

    // Exact division by the monomial c z^{num3/3}.
    ThirdPoly divided_by_monomial(Complex c, int num3) const {
        ThirdPoly r;
        for (const auto& [e, co] : terms_) r.add_term(co / c, e - num3);
        return r;
    }

    bool is_monomial() const { return terms_.size() == 1; }

    double max_abs_coeff() const {
        double m = 0.0;
        for (const auto& [e, c] : terms_) m = std::max(m, std::abs(c));
        return m;
    }

    int min_exponent3() const { return terms_.empty() ? 0 : terms_.begin()->first; }
    int max_exponent3() const { return terms_.empty() ? 0 : terms_.rbegin()->first; }

    // Drop every term with exponent numerator strictly above hi3 (resp. below lo3).
    ThirdPoly truncated_above(int hi3) const {
        ThirdPoly r;
        for (const auto& [e, c] : terms_)
            if (e <= hi3) r.terms_[e] = c;
        return r;
    }
    ThirdPoly truncated_below(int lo3) const {
        ThirdPoly r;
        for (const auto& [e, c] : terms_)
            if (e >= lo3) r.terms_[e] = c;
        return r;
    }

    std::string str() const {
        std::ostringstream os;
        bool first = true;
        for (const auto& [e, c] : terms_) {
            if (!first) os << " + ";
            os << "(" << c.real() << (c.imag() < 0 ? "" : "+") << c.imag() << "i)";
            if (e != 0) os << "*z^(" << e << "/3)";
            first = false;
        }
        if (first) os << "0";
        return os.str();
    }
    friend std::ostream& operator<<(std::ostream& os, const ThirdPoly& p) { return os << p.str(); }

private:
    void add_term(Complex c, int num3) {
        auto it = terms_.find(num3);
        if (it == terms_.end()) {
            if (std::abs(c) > kPruneThreshold) terms_.emplace(num3, c);
            return;
        }
        it->second += c;
        if (std::abs(it->second) <= kPruneThreshold) terms_.erase(it);
    }

    Terms terms_;
};

}  // namespace piv
