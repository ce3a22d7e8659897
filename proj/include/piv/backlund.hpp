#pragma once

#include <algorithm>
#include <array>
#include <optional>
#include <set>
#include <vector>

#include "piv/isomonodromy.hpp"

namespace piv {

// ---------------------------------------------------------------------------
// The sigma-action on monodromy parameters (beta, alpha) with the t,z scale
// factors tracked exactly as powers of i.

struct MonodromyParamState {
    Complex beta{1.0}, alpha{1.0};
    int t_phase = 0;  // t is multiplied by i^t_phase
    int z_phase = 0;
};

enum class Sigma { s1, s2, s3 };
using GroupWord = std::vector<Sigma>;

// Abstract element of the group generated by the sigma's: acts by
//   beta -> beta_sign * beta^beta_exp, alpha -> alpha_sign * alpha^alpha_exp,
//   t -> i^phase t, z -> i^phase z.
struct SigmaElement {
    int beta_exp = 1, beta_sign = 1;
    int alpha_exp = 1, alpha_sign = 1;
    int phase = 0;  // mod 4

    static SigmaElement generator(Sigma s) {
        switch (s) {
            case Sigma::s1: return {-1, 1, 1, 1, 0};
            case Sigma::s2: return {1, -1, 1, -1, 0};
            case Sigma::s3: return {1, 1, -1, 1, 1};
        }
        return {};
    }

    // this∘other: apply `other` first.
    SigmaElement after(const SigmaElement& o) const {
        SigmaElement r;
        r.beta_exp = beta_exp * o.beta_exp;
        r.beta_sign = beta_sign * o.beta_sign;  // sign survives exponent +-1
        r.alpha_exp = alpha_exp * o.alpha_exp;
        r.alpha_sign = alpha_sign * o.alpha_sign;
        r.phase = (phase + o.phase) % 4;
        return r;
    }

    MonodromyParamState apply(const MonodromyParamState& s) const {
        MonodromyParamState r = s;
        r.beta = static_cast<double>(beta_sign) * (beta_exp == 1 ? s.beta : 1.0 / s.beta);
        r.alpha = static_cast<double>(alpha_sign) * (alpha_exp == 1 ? s.alpha : 1.0 / s.alpha);
        r.t_phase = (s.t_phase + phase) % 4;
        r.z_phase = (s.z_phase + phase) % 4;
        return r;
    }

    auto key() const { return std::array<int, 5>{beta_exp, beta_sign, alpha_exp, alpha_sign, phase}; }
    bool operator==(const SigmaElement& o) const { return key() == o.key(); }
    bool operator<(const SigmaElement& o) const { return key() < o.key(); }
};

inline SigmaElement sigma_word_element(const GroupWord& w) {
    // words act right-to-left
    SigmaElement e;
    for (auto it = w.rbegin(); it != w.rend(); ++it)
        e = SigmaElement::generator(*it).after(e);
    return e;
}

inline MonodromyParamState sigma_apply(const GroupWord& w, const MonodromyParamState& s) {
    return sigma_word_element(w).apply(s);
}

inline std::vector<SigmaElement> enumerate_sigma_group() {
    std::set<SigmaElement> seen{SigmaElement{}};
    std::vector<SigmaElement> frontier{SigmaElement{}};
    while (!frontier.empty()) {
        std::vector<SigmaElement> next;
        for (const auto& e : frontier)
            for (Sigma s : {Sigma::s1, Sigma::s2, Sigma::s3}) {
                SigmaElement f = SigmaElement::generator(s).after(e);
                if (seen.insert(f).second) next.push_back(f);
            }
        frontier = std::move(next);
    }
    return {seen.begin(), seen.end()};
}

inline bool sigma_group_commutative() {
    auto g = enumerate_sigma_group();
    for (const auto& a : g)
        for (const auto& b : g)
            if (!(a.after(b) == b.after(a))) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Lifted action on (theta0, thetainf, t, z).

struct LiftedParamState {
    Complex theta0{}, thetainf{};
    int t_phase = 0;
    int z_phase = 0;
};

inline LiftedParamState tilde_generator_apply(Sigma s, const LiftedParamState& p) {
    LiftedParamState r = p;
    switch (s) {
        case Sigma::s1: r.theta0 = 2.0 - p.theta0; break;
        case Sigma::s2:
            r.theta0 = p.theta0 + 1.0;
            r.thetainf = p.thetainf + 1.0;
            break;
        case Sigma::s3:
            r.thetainf = -p.thetainf;
            r.t_phase = (p.t_phase + 1) % 4;
            r.z_phase = (p.z_phase + 1) % 4;
            break;
    }
    return r;
}

inline LiftedParamState tilde_apply(const GroupWord& w, LiftedParamState p) {
    for (auto it = w.rbegin(); it != w.rend(); ++it) p = tilde_generator_apply(*it, p);
    return p;
}

// Exact affine representation of a lifted word: theta' = M theta + v, phases
// advanced by `phase`.  Integer arithmetic throughout.
struct TildeAffine {
    std::array<std::array<int, 2>, 2> m{{{1, 0}, {0, 1}}};
    std::array<int, 2> v{0, 0};
    int phase = 0;

    static TildeAffine generator(Sigma s) {
        switch (s) {
            case Sigma::s1: return {{{{-1, 0}, {0, 1}}}, {2, 0}, 0};
            case Sigma::s2: return {{{{1, 0}, {0, 1}}}, {1, 1}, 0};
            case Sigma::s3: return {{{{1, 0}, {0, -1}}}, {0, 0}, 1};
        }
        return {};
    }
    TildeAffine after(const TildeAffine& o) const {
        TildeAffine r;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                r.m[i][j] = m[i][0] * o.m[0][j] + m[i][1] * o.m[1][j];
        for (int i = 0; i < 2; ++i) r.v[i] = m[i][0] * o.v[0] + m[i][1] * o.v[1] + v[i];
        r.phase = (phase + o.phase) % 4;
        return r;
    }
    bool is_identity_matrix() const {
        return m[0][0] == 1 && m[0][1] == 0 && m[1][0] == 0 && m[1][1] == 1;
    }
};

// Search over words of the tilde generators for the parameter shift
// theta0 += shift0, thetainf += shiftinf (matrix part trivial; the t,z scale
// factor is allowed to be any power of i).  Returns the shortest witness.
inline std::optional<GroupWord> find_shift_word(int shift0, int shiftinf, int max_len) {
    std::vector<GroupWord> frontier{{}};
    for (int len = 1; len <= max_len; ++len) {
        std::vector<GroupWord> next;
        for (const auto& w : frontier)
            for (Sigma s : {Sigma::s1, Sigma::s2, Sigma::s3}) {
                GroupWord w2 = w;
                w2.push_back(s);
                TildeAffine e;
                for (auto it = w2.rbegin(); it != w2.rend(); ++it)
                    e = TildeAffine::generator(*it).after(e);
                if (e.is_identity_matrix() && e.v[0] == shift0 && e.v[1] == shiftinf) return w2;
                next.push_back(std::move(w2));
            }
        frontier = std::move(next);
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// The explicit Backlund transformation sigma~2 on solutions.

// Complex dual number for forward-mode differentiation along the flow.
struct Dual {
    Complex v{}, d{};
    Dual() = default;
    Dual(Complex value, Complex deriv = 0.0) : v(value), d(deriv) {}
    Dual(double value) : v(value) {}  // NOLINT
    friend Dual operator+(const Dual& a, const Dual& b) { return {a.v + b.v, a.d + b.d}; }
    friend Dual operator-(const Dual& a, const Dual& b) { return {a.v - b.v, a.d - b.d}; }
    friend Dual operator*(const Dual& a, const Dual& b) {
        return {a.v * b.v, a.d * b.v + a.v * b.d};
    }
    friend Dual operator/(const Dual& a, const Dual& b) {
        return {a.v / b.v, (a.d * b.v - a.v * b.d) / (b.v * b.v)};
    }
    friend Dual operator-(const Dual& a) { return {-a.v, -a.d}; }
};

// Denominator 4q(qt - theta0 + 2a + 2q^2) with a = q' + 1/2; vanishes exactly
// on the Riccati leaf q' + q^2 + (t/2)q + (1 - theta0)/2 = 0.
template <typename T>
T backlund_denominator_factor(const T& q, const T& qprime, const T& t, Complex theta0) {
    T a = qprime + T(0.5);
    return q * t - T(theta0) + T(2.0) * a + T(2.0) * q * q;
}

template <typename T>
T backlund_q_impl(const T& q, const T& qprime, const T& t, const ThetaParams& p) {
    T a = qprime + T(0.5);
    T q2 = q * q;
    T num = T(-4.0) * q2 * T(p.thetainf) + T(4.0) * a * a - T(4.0) * q2 * q * t - q2 * t * t -
            T(4.0) * q2 * q2 - T(4.0) * q2 * T(p.theta0) + T(p.theta0 * p.theta0) -
            T(4.0) * a * T(p.theta0);
    T den = T(4.0) * q * backlund_denominator_factor(q, qprime, t, p.theta0);
    return num / den;
}

inline Complex backlund_denominator(Complex q, Complex qprime, Complex t, const ThetaParams& p) {
    return 4.0 * q * backlund_denominator_factor(q, qprime, t, p.theta0);
}

inline Complex backlund_q(Complex q, Complex qprime, Complex t, const ThetaParams& p) {
    if (std::abs(q) < 1e-13) throw PoleError("backlund_q: q = 0");
    Complex a = qprime + 0.5;
    double scale = 4.0 * std::abs(q) *
                   (std::abs(q * t) + std::abs(p.theta0) + 2.0 * std::abs(a) +
                    2.0 * std::abs(q) * std::abs(q) + 1.0);
    Complex den = backlund_denominator(q, qprime, t, p);
    if (std::abs(den) < 1e-12 * scale)
        throw SingularGaugeError("backlund_q: singular locus (Riccati leaf)");
    return backlund_q_impl(q, qprime, t, p);
}

// (q~, q~') with q~' the total t-derivative of the q~ formula along the PIV
// flow, computed with dual numbers and piv_rhs for q''.
inline std::pair<Complex, Complex> backlund_q_qprime(Complex q, Complex qprime, Complex t,
                                                     const ThetaParams& p) {
    Complex qt = backlund_q(q, qprime, t, p);  // validates the locus
    Dual dq(q, qprime), dqp(qprime, piv_rhs(PIVState{t, q, qprime}, p)), dt(t, 1.0);
    Dual r = backlund_q_impl(dq, dqp, dt, p);
    (void)qt;
    return {r.v, r.d};
}

// The `missing' Backlund transformation coming from the Noumi-Yamada cyclic
// permutation.
inline ThetaParams missing_generator(const ThetaParams& p) {
    return {-p.theta0 / 2.0 + p.thetainf / 2.0 + 2.0,
            -1.5 * p.theta0 - p.thetainf / 2.0 + 2.0};
}

}  // namespace piv
