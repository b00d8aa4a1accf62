#pragma once

// Dormand-Prince 5(4) embedded explicit Runge-Kutta integrator with
// adaptive step control, specialised for small fixed-size systems.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

namespace gasflow::ode {

struct Options {
    double rtol = 1e-8;
    double atol = 1e-10;
    std::size_t max_steps = 100000;
    /// Initial step; 0 picks 1% of the interval.
    double initial_step = 0.0;
};

enum class Status { Success, StepBudgetExceeded, StepSizeUnderflow };

template <std::size_t N>
using State = std::array<double, N>;

template <std::size_t N>
struct Trajectory {
    Status status = Status::Success;
    std::vector<double> x;
    std::vector<State<N>> y;
    std::size_t rejected = 0;
};

namespace detail {

inline constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
inline constexpr double a21 = 1.0 / 5.0;
inline constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
inline constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
inline constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                        a54 = -212.0 / 729.0;
inline constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                        a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
inline constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                        a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
// b - b_hat (fifth minus fourth order weights)
inline constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                        e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

template <std::size_t N>
State<N> combine(const State<N>& y, double h, std::initializer_list<std::pair<double, const State<N>*>> terms) {
    State<N> out = y;
    for (const auto& [w, k] : terms) {
        for (std::size_t i = 0; i < N; ++i) {
            out[i] += h * w * (*k)[i];
        }
    }
    return out;
}

}  // namespace detail

/// Integrates y' = rhs(x, y) from x0 to x1 (x1 > x0). `admissible(y)` rejects stage and
/// step states outside the model's domain, which forces a smaller step. Exceptions thrown
/// by `rhs` propagate. The returned trajectory holds every accepted step, endpoints included.
template <std::size_t N, class Rhs, class Admissible>
Trajectory<N> integrate(Rhs&& rhs, Admissible&& admissible, double x0, double x1, const State<N>& y0,
                        const Options& opt) {
    using namespace detail;
    Trajectory<N> out;
    out.x.push_back(x0);
    out.y.push_back(y0);
    const double span = x1 - x0;
    if (!(span > 0.0)) {
        return out;
    }

    double x = x0;
    State<N> y = y0;
    State<N> k1 = rhs(x, y);
    double h = opt.initial_step > 0.0 ? std::min(opt.initial_step, span) : 0.01 * span;
    const double h_min = 1e-14 * std::max(std::abs(x0), std::abs(x1)) + 1e-300;
    std::size_t steps = 0;

    while (x < x1) {
        if (steps++ >= opt.max_steps) {
            out.status = Status::StepBudgetExceeded;
            return out;
        }
        bool last = false;
        if (x + h >= x1 || x + 1.000001 * h >= x1) {
            h = x1 - x;
            last = true;
        }

        bool ok = true;
        State<N> k2, k3, k4, k5, k6, k7, y_new;
        auto stage = [&](const State<N>& ys, double xs, State<N>& k) {
            if (!ok) return;
            if (!admissible(ys)) {
                ok = false;
                return;
            }
            k = rhs(xs, ys);
        };
        stage(combine<N>(y, h, {{a21, &k1}}), x + c2 * h, k2);
        stage(combine<N>(y, h, {{a31, &k1}, {a32, &k2}}), x + c3 * h, k3);
        stage(combine<N>(y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}), x + c4 * h, k4);
        stage(combine<N>(y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}), x + c5 * h, k5);
        stage(combine<N>(y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}), x + h, k6);
        if (ok) {
            y_new = combine<N>(y, h, {{a71, &k1}, {a73, &k3}, {a74, &k4}, {a75, &k5}, {a76, &k6}});
            stage(y_new, x + h, k7);
        }

        double err = 0.0;
        if (ok) {
            for (std::size_t i = 0; i < N; ++i) {
                const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
                const double sc = opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(y_new[i]));
                err += (e / sc) * (e / sc);
            }
            err = std::sqrt(err / static_cast<double>(N));
            if (!std::isfinite(err)) {
                ok = false;
            }
        }

        if (ok && err <= 1.0) {
            x = last ? x1 : x + h;
            y = y_new;
            k1 = k7;  // first-same-as-last
            out.x.push_back(x);
            out.y.push_back(y);
            const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
            h *= factor;
        } else {
            ++out.rejected;
            h *= ok ? std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9) : 0.5;
            if (h < h_min) {
                out.status = Status::StepSizeUnderflow;
                return out;
            }
        }
    }
    return out;
}

}  // namespace gasflow::ode
