#pragma once

#include <optional>

#include "gasflow/pipe.hpp"

namespace gasflow {

/// Which terms of the momentum balance are kept.
enum class IdealCase { Friction, FrictionInertia, FrictionGravity, FrictionGravityInertia };

/// Inputs of the ideal-gas first integrals (nondimensional).
struct IdealCaseParams {
    double length = 1.0;
    double beta = 0.0;
    double r1_hat = 0.0;
    double r2_hat = 0.0;
    double sin_theta = 0.0;
    bool inertia = false;
    bool gravity = false;
};

/// Below this |gamma| = |2 L R2_hat sin(theta)| the gravity forms fall back to their limits.
inline constexpr double kGammaLimit = 1e-8;

IdealCaseParams ideal_case_params(const PipeGeometry& geom, double euler, const PhysicsOptions& physics);

/// Variant actually evaluated for these parameters, after the small-gamma dispatch.
IdealCase select_case(const IdealCaseParams& params);

/// Residual of the closed-form first integral relating inlet p0, outlet pL and flow f.
/// Throws BranchViolation when a logarithm argument is not positive.
double residual_case(const IdealCaseParams& params, double p0, double pl, double f);

/// Subsonic outlet pressure for inlet p0 and flow f. Throws NoBracket when no root
/// exists in the physical branch.
double solve_outlet(const IdealCaseParams& params, double p0, double f);

/// Flow that connects p0 to pL; the search interval is [-f_max, f_max].
double solve_flow(const IdealCaseParams& params, double p0, double pl, std::optional<double> f_max = {});

}  // namespace gasflow
