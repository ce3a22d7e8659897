#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "piv/core.hpp"

namespace piv {

enum class Termination { completed, pole_detected, step_underflow };

inline const char* to_string(Termination t) {
    switch (t) {
        case Termination::completed: return "completed";
        case Termination::pole_detected: return "pole-detected";
        case Termination::step_underflow: return "step-underflow";
    }
    return "?";
}

using State = std::vector<Complex>;
using Rhs = std::function<State(Complex, const State&)>;

struct TrajectorySample {
    Complex t;
    State state;
    State deriv;
};

struct Trajectory {
    std::vector<TrajectorySample> samples;
    Termination termination = Termination::completed;
    Complex stop_point{};           // estimated pole location when terminated early
    double max_error_estimate = 0;  // largest accepted per-step local error (scaled by tol)

    const TrajectorySample& back() const { return samples.back(); }
};

struct IntegrateOptions {
    double tol = 1e-10;
    double pole_threshold = 1e6;  // |state component| beyond which a pole is declared
    double max_step = std::numeric_limits<double>::infinity();
    int max_steps = 2000000;
};

// Adaptive Dormand-Prince 5(4) over the straight complex segment t0 -> t1.
// Parametrized by real arclength s; dt/ds is the unit direction.  Stops and
// reports when a state component exceeds the pole threshold or the accepted
// step falls below 1e-12 * |t1 - t0|.
inline Trajectory integrate(const Rhs& rhs, State y, Complex t0, Complex t1,
                            const IntegrateOptions& opt = {}) {
    static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static const double a21 = 1.0 / 5;
    static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
    static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    // 4th-order weights of the embedded pair
    static const double e1 = 5179.0 / 57600, e3 = 7571.0 / 16695, e4 = 393.0 / 640,
                        e5 = -92097.0 / 339200, e6 = 187.0 / 2100, e7 = 1.0 / 40;

    const size_t n = y.size();
    const double len = std::abs(t1 - t0);
    Complex dir = len > 0 ? (t1 - t0) / len : Complex(1.0);
    auto f = [&](double s, const State& v) {
        State d = rhs(t0 + s * dir, v);
        for (auto& x : d) x *= dir;
        return d;
    };
    auto blown = [&](const State& v) {
        for (const auto& x : v)
            if (!(std::abs(x) <= opt.pole_threshold)) return true;
        return false;
    };

    Trajectory traj;
    if (blown(y)) throw PoleError("state beyond pole threshold at start of integration");
    State k1 = f(0.0, y);  // throws on immediate pole
    traj.samples.push_back({t0, y, rhs(t0, y)});
    if (len == 0.0) return traj;

    double s = 0.0;
    double h = std::min({len / 100.0, opt.max_step, std::pow(opt.tol, 0.2)});
    const double hmin = 1e-12 * len;
    State k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), y5(n);

    for (int step = 0; step < opt.max_steps && s < len; ++step) {
        h = std::min({h, len - s, opt.max_step});
        bool rejected_to_underflow = false;
        while (true) {
            try {
                for (size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * a21 * k1[i];
                k2 = f(s + c2 * h, ytmp);
                for (size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
                k3 = f(s + c3 * h, ytmp);
                for (size_t i = 0; i < n; ++i)
                    ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
                k4 = f(s + c4 * h, ytmp);
                for (size_t i = 0; i < n; ++i)
                    ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
                k5 = f(s + c5 * h, ytmp);
                for (size_t i = 0; i < n; ++i)
                    ytmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] +
                                          a65 * k5[i]);
                k6 = f(s + h, ytmp);
                for (size_t i = 0; i < n; ++i)
                    y5[i] = y[i] +
                            h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
                k7 = f(s + h, y5);
            } catch (const PoleError&) {
                h *= 0.5;
                if (h < hmin) { rejected_to_underflow = true; break; }
                continue;
            }
            double err = 0.0;
            for (size_t i = 0; i < n; ++i) {
                Complex y4 = y[i] + h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                                         e6 * k6[i] + e7 * k7[i]);
                double sc = opt.tol * (1.0 + std::max(std::abs(y[i]), std::abs(y5[i])));
                err = std::max(err, std::abs(y5[i] - y4) / sc);
            }
            if (err <= 1.0) {
                s += h;
                y = y5;
                k1 = k7;  // FSAL
                traj.max_error_estimate = std::max(traj.max_error_estimate, err * opt.tol);
                State d(n);
                for (size_t i = 0; i < n; ++i) d[i] = k7[i] / dir;
                traj.samples.push_back({t0 + s * dir, y, std::move(d)});
                h *= std::min(5.0, std::max(0.2, 0.9 * std::pow(err + 1e-300, -0.2)));
                break;
            }
            h *= std::min(5.0, std::max(0.2, 0.9 * std::pow(err, -0.2)));
            if (h < hmin) { rejected_to_underflow = true; break; }
        }
        if (rejected_to_underflow) {
            traj.termination = Termination::step_underflow;
            traj.stop_point = t0 + s * dir;
            return traj;
        }
        if (blown(y)) {
            traj.termination = Termination::pole_detected;
            traj.stop_point = t0 + s * dir;
            return traj;
        }
        if (h < hmin && s < len) {
            traj.termination = Termination::step_underflow;
            traj.stop_point = t0 + s * dir;
            return traj;
        }
    }
    traj.termination = s >= len * (1.0 - 1e-14) ? Termination::completed
                                                : Termination::step_underflow;
    if (traj.termination != Termination::completed) traj.stop_point = t0 + s * dir;
    return traj;
}

// Polygonal path: straight segments through the given waypoints.
inline Trajectory integrate_path(const Rhs& rhs, State y, const std::vector<Complex>& waypoints,
                                 const IntegrateOptions& opt = {}) {
    if (waypoints.size() < 2) throw std::invalid_argument("path needs at least two points");
    Trajectory out;
    for (size_t i = 0; i + 1 < waypoints.size(); ++i) {
        Trajectory seg = integrate(rhs, y, waypoints[i], waypoints[i + 1], opt);
        size_t skip = out.samples.empty() ? 0 : 1;  // shared waypoint sample
        out.samples.insert(out.samples.end(), seg.samples.begin() + skip, seg.samples.end());
        out.termination = seg.termination;
        out.stop_point = seg.stop_point;
        out.max_error_estimate = std::max(out.max_error_estimate, seg.max_error_estimate);
        if (seg.termination != Termination::completed) break;
        y = seg.back().state;
    }
    return out;
}

}  // namespace piv
