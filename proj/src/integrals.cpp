#include "gasflow/integrals.hpp"

#include <algorithm>
#include <boost/math/tools/toms748_solve.hpp>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "gasflow/errors.hpp"

namespace gasflow {

namespace {

double checked_log(double arg, const char* what) {
    if (!(arg > 0.0) || !std::isfinite(arg)) {
        throw BranchViolation(std::string("logarithm of non-positive argument in ") + what + " (" +
                              std::to_string(arg) + ")");
    }
    return std::log(arg);
}

double gamma_of(const IdealCaseParams& p) {
    return 2.0 * p.length * p.r2_hat * p.sin_theta;
}

// Bracketed root on [lo, hi], where f(lo) and f(hi) differ in sign.
template <class F>
double bracketed_root(F&& fn, double lo, double hi, double f_lo, double f_hi) {
    std::uintmax_t iterations = 200;
    auto tol = boost::math::tools::eps_tolerance<double>(std::numeric_limits<double>::digits - 2);
    auto [a, b] = boost::math::tools::toms748_solve(fn, lo, hi, f_lo, f_hi, tol, iterations);
    return std::abs(fn(a)) <= std::abs(fn(b)) ? a : b;
}

// Scans the grid from its last point toward the first and returns the first
// interval with a sign change, skipping points where fn is undefined.
template <class F>
std::optional<double> scan_root(F&& fn, const std::vector<double>& grid) {
    double prev_x = 0.0;
    double prev_v = std::numeric_limits<double>::quiet_NaN();
    for (auto it = grid.rbegin(); it != grid.rend(); ++it) {
        double v;
        try {
            v = fn(*it);
        } catch (const BranchViolation&) {
            v = std::numeric_limits<double>::quiet_NaN();
        }
        if (v == 0.0) {
            return *it;
        }
        if (std::isfinite(v) && std::isfinite(prev_v) && (v < 0.0) != (prev_v < 0.0)) {
            const double lo = std::min(*it, prev_x), hi = std::max(*it, prev_x);
            const double f_lo = lo == *it ? v : prev_v, f_hi = lo == *it ? prev_v : v;
            // A sign change across an excluded branch or a pole is not a root.
            try {
                const double root = bracketed_root(fn, lo, hi, f_lo, f_hi);
                if (std::abs(fn(root)) <= 1e-8 * std::max({1.0, std::abs(f_lo), std::abs(f_hi)})) {
                    return root;
                }
            } catch (const BranchViolation&) {
            }
        }
        prev_x = *it;
        prev_v = v;
    }
    return std::nullopt;
}

}  // namespace

IdealCaseParams ideal_case_params(const PipeGeometry& geom, double euler, const PhysicsOptions& physics) {
    IdealCaseParams p;
    p.length = geom.length;
    p.beta = geom.groups.beta;
    p.r1_hat = geom.groups.r1 / euler;
    p.r2_hat = geom.groups.r2 * euler;
    p.sin_theta = geom.sin_theta;
    p.inertia = physics.inertia;
    p.gravity = physics.gravity;
    return p;
}

IdealCase select_case(const IdealCaseParams& p) {
    const bool gravity = p.gravity && std::abs(gamma_of(p)) >= kGammaLimit;
    if (gravity) {
        return p.inertia ? IdealCase::FrictionGravityInertia : IdealCase::FrictionGravity;
    }
    return p.inertia ? IdealCase::FrictionInertia : IdealCase::Friction;
}

double residual_case(const IdealCaseParams& p, double p0, double pl, double f) {
    if (!(p0 > 0.0) || !(pl > 0.0)) {
        throw BranchViolation("end pressures must be positive");
    }
    const double ff = f * std::abs(f);
    const double friction = 2.0 * p.length * p.r1_hat * p.beta * ff;
    const double p0s = p0 * p0, pls = pl * pl;

    switch (select_case(p)) {
        case IdealCase::Friction:
            return p0s - pls - friction;
        case IdealCase::FrictionInertia:
            return p0s - pls - p.r1_hat * f * f * checked_log(p0s / pls, "inertia term") - friction;
        case IdealCase::FrictionGravity: {
            const double gamma = gamma_of(p);
            const double eg = std::exp(gamma);
            return eg * p0s - pls - friction * std::expm1(gamma) / gamma;
        }
        case IdealCase::FrictionGravityInertia: {
            const double delta = p.beta * p.r1_hat * ff / (p.r2_hat * p.sin_theta);
            const double a0 = p0s - delta, al = pls - delta;
            if ((a0 > 0.0) != (al > 0.0) || a0 == 0.0 || al == 0.0) {
                throw BranchViolation("p^2 - delta changes sign between the pipe ends");
            }
            const double k = p.r1_hat * f * f;
            return (k - delta) * checked_log(a0 / al, "gravity-inertia term") -
                   k * checked_log(p0s / pls, "inertia term") - friction;
        }
    }
    return 0.0;
}

double solve_outlet(const IdealCaseParams& p, double p0, double f) {
    if (!(p0 > 0.0)) {
        throw NoBracket("inlet pressure must be positive");
    }
    double lo = 1e-6;
    if (p.inertia) {
        // Subsonic branch only: p^2 > R1_hat f^2.
        lo = std::max(lo, std::sqrt(p.r1_hat) * std::abs(f) * (1.0 + 1e-9));
    }
    const double hi = 10.0 * p0;
    if (!(lo < hi)) {
        throw NoBracket("no subsonic outlet pressure below 10 p0");
    }
    if (f == 0.0 && select_case(p) == IdealCase::FrictionGravityInertia) {
        // The gravity-inertia integral vanishes identically at zero flow; use its static limit.
        return std::sqrt(std::exp(gamma_of(p))) * p0;
    }
    auto fn = [&](double pl) { return residual_case(p, p0, pl, f); };
    std::vector<double> grid;
    const int n = 400;
    for (int i = 0; i <= n; ++i) {
        grid.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / n));
    }
    if (auto root = scan_root(fn, grid)) {
        return *root;
    }
    throw NoBracket("no sign change of the first integral for outlet pressure in [" + std::to_string(lo) + ", " +
                    std::to_string(hi) + "]");
}

double solve_flow(const IdealCaseParams& p, double p0, double pl, std::optional<double> f_max) {
    double limit;
    if (f_max) {
        limit = *f_max;
    } else {
        const double resistance = 2.0 * p.length * p.r1_hat * p.beta;
        limit = resistance > 0.0 ? 10.0 * std::sqrt((p0 * p0 + pl * pl) / resistance) : 1e6;
    }
    if (p.inertia && p.r1_hat > 0.0) {
        limit = std::min(limit, (1.0 - 1e-9) * std::min(p0, pl) / std::sqrt(p.r1_hat));
    }
    // The gravity-inertia integral scales like f|f| near zero flow, so f = 0 is a
    // spurious root; search its quotient by f|f| instead.
    const bool divide = select_case(p) == IdealCase::FrictionGravityInertia;
    auto fn = [&](double f) {
        if (!divide) {
            return residual_case(p, p0, pl, f);
        }
        return f == 0.0 ? std::numeric_limits<double>::quiet_NaN() : residual_case(p, p0, pl, f) / (f * std::abs(f));
    };
    std::vector<double> grid;
    // An odd count keeps f = 0 off the grid; the quotient is continuous there.
    const int n = divide ? 401 : 400;
    for (int i = 0; i <= n; ++i) {
        grid.push_back(-limit + 2.0 * limit * i / n);
    }
    if (auto root = scan_root(fn, grid)) {
        return *root;
    }
    throw NoBracket("no sign change of the first integral for flow in [" + std::to_string(-limit) + ", " +
                    std::to_string(limit) + "]");
}

}  // namespace gasflow
