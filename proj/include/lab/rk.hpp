#pragma once
// Explicit Runge-Kutta time integrators on flat state vectors:
//  - rk4_step: the classical fixed-step 4th-order scheme,
//  - integrate_adaptive: Dormand-Prince 5(4) with PI step-size control,
//    supporting forward or backward integration and a per-step acceptance
//    guard (used to enforce positivity constraints along trajectories).

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace lab {

using Vec = Eigen::VectorXd;
using OdeRhs = std::function<Vec(double t, const Vec& y)>;

inline Vec rk4_step(const OdeRhs& f, double t, const Vec& y, double h) {
    const Vec k1 = f(t, y);
    const Vec k2 = f(t + 0.5 * h, y + 0.5 * h * k1);
    const Vec k3 = f(t + 0.5 * h, y + 0.5 * h * k2);
    const Vec k4 = f(t + h, y + h * k3);
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

struct AdaptiveOptions {
    double rtol = 1e-10;
    double atol = 1e-12;
    double h_init = 1e-3;
    double h_max = 1e30;
    std::size_t max_steps = 50'000'000;
    // Called on every accepted step; return false to abort integration.
    std::function<bool(double t, const Vec& y)> on_step;
    // Optional state guard evaluated on trial states; a rejected trial
    // forces a step-size reduction instead of accepting a bad state.
    std::function<bool(const Vec& y)> accept_state;
};

// Dormand-Prince 5(4).  Integrates y' = f(t,y) from t0 to t1 (t1 < t0 runs
// backward).  Returns the state at t1.
inline Vec integrate_adaptive(const OdeRhs& f, double t0, double t1, Vec y,
                              const AdaptiveOptions& opt = {}) {
    static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static const double a21 = 1.0 / 5;
    static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                        a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                        a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                        a65 = -5103.0 / 18656;
    static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static const double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    const double dir = (t1 >= t0) ? 1.0 : -1.0;
    double t = t0;
    double h = dir * std::min(std::abs(opt.h_init), std::abs(t1 - t0));
    double err_prev = 1.0;
    Vec k1 = f(t, y);

    for (std::size_t step = 0; step < opt.max_steps; ++step) {
        if (dir * (t - t1) >= 0.0) return y;
        if (dir * (t + h - t1) > 0.0) h = t1 - t;

        const Vec k2 = f(t + c2 * h, y + h * (a21 * k1));
        const Vec k3 = f(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
        const Vec k4 = f(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
        const Vec k5 =
            f(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        const Vec k6 = f(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 +
                                         a64 * k4 + a65 * k5));
        const Vec ynew =
            y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        const Vec k7 = f(t + h, ynew);
        const Vec yerr = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 +
                              e7 * k7);

        double err = 0.0;
        for (Eigen::Index i = 0; i < y.size(); ++i) {
            const double sc =
                opt.atol +
                opt.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            const double r = yerr[i] / sc;
            err += r * r;
        }
        err = std::sqrt(err / static_cast<double>(y.size()));

        const bool ok =
            err <= 1.0 && (!opt.accept_state || opt.accept_state(ynew));
        if (ok) {
            t += h;
            y = ynew;
            k1 = k7;  // FSAL
            if (opt.on_step && !opt.on_step(t, y)) return y;
            // PI controller (order 5 error estimate).
            const double fac = 0.9 * std::pow(err > 0 ? err : 1e-10, -0.7 / 5) *
                               std::pow(err_prev, 0.4 / 5);
            err_prev = std::max(err, 1e-10);
            h *= std::clamp(fac, 0.2, 5.0);
            if (std::abs(h) > opt.h_max) h = dir * opt.h_max;
        } else {
            const double shrink =
                err > 1.0 ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.5;
            h *= shrink;
            if (std::abs(h) < 1e-14 * std::max(1.0, std::abs(t)))
                throw std::runtime_error(
                    "integrate_adaptive: step size underflow (state guard or "
                    "error control cannot be satisfied)");
        }
    }
    throw std::runtime_error("integrate_adaptive: max step count exceeded");
}

}  // namespace lab
