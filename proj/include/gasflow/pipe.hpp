#pragma once

#include <vector>

#include "gasflow/nondim.hpp"
#include "gasflow/ode.hpp"

namespace gasflow {

/// Model switches. With inertia off the momentum denominator reduces to rho^2;
/// with gravity off the incline is ignored.
struct PhysicsOptions {
    bool inertia = true;
    bool gravity = true;
};

/// Nondimensional pipe data and its groups.
struct PipeGeometry {
    double length = 1.0;
    double diameter = 1.0;
    double area = 1.0;
    double friction = 0.0;
    double sin_theta = 0.0;
    PipeGroups groups;
};

PipeGeometry make_pipe_geometry(const NominalScales& scales, double length, double diameter, double area,
                                double friction, double sin_theta);
void check_geometry(const PipeGeometry& geom);

struct FlowModel {
    ScaledEos eos;
    PhysicsOptions physics;
};

/// Samples at accepted integration steps. Sensitivity vectors are empty for
/// pressure-only integrations.
struct PipeSolution {
    std::vector<double> x;
    std::vector<double> p;
    std::vector<double> s_p;  // dp(x)/dp_in
    std::vector<double> s_f;  // dp(x)/df
    double flow = 0.0;
    double outlet_transformed = 0.0;  // pi(L) = p(L)^3 as integrated

    double outlet() const { return p.back(); }
};

struct Partials {
    double dp = 0.0;
    double df = 0.0;
};

/// Relative threshold on the momentum denominator below which flow counts as choked.
inline constexpr double kChokeThreshold = 1e-12;

/// dp/dx = rho (R2 rho^2 sin(theta) - R1 beta f|f|) / (rho^2 - R1 f^2 rho'(p)).
double rhs_G(double p, double f, const PipeGeometry& geom, const FlowModel& model);
Partials rhs_G_partials(double p, double f, const PipeGeometry& geom, const FlowModel& model);

/// d(pi)/dx for pi = p^3: H = 3 p^2 G(p, f).
double rhs_H(double pi, double f, const PipeGeometry& geom, const FlowModel& model);
/// (dH/dpi, dH/df).
Partials rhs_H_partials(double pi, double f, const PipeGeometry& geom, const FlowModel& model);

ode::Options default_pipe_ode_options();

PipeSolution integrate_pressure(double p_in, double f, const PipeGeometry& geom, const FlowModel& model,
                                const ode::Options& opt = default_pipe_ode_options());

/// Joint integration of pi and the sensitivities of the physical pressure to the
/// inlet pressure and to the flow.
PipeSolution integrate_with_sensitivities(double p_in, double f, const PipeGeometry& geom, const FlowModel& model,
                                          const ode::Options& opt = default_pipe_ode_options());

/// Choice of R(x1, x2) in F(p_i, p_j, f) = R(p(L; p_i, f), p_j).
enum class ResidualForm {
    Cubic,   // x1^3 - x2^3, i.e. mismatch in pi
    Linear,  // x1 - x2
};

struct PipeResidual {
    double value = 0.0;
    double d_inlet = 0.0;   // dF/dp_i
    double d_outlet = 0.0;  // dF/dp_j
    double d_flow = 0.0;    // dF/df
};

PipeResidual residual_F(double p_i, double p_j, double f, const PipeGeometry& geom, const FlowModel& model,
                        const ode::Options& opt = default_pipe_ode_options(),
                        ResidualForm form = ResidualForm::Cubic);

/// Residual value only, from a pressure-only integration.
double residual_value(double p_i, double p_j, double f, const PipeGeometry& geom, const FlowModel& model,
                      const ode::Options& opt = default_pipe_ode_options(),
                      ResidualForm form = ResidualForm::Cubic);

}  // namespace gasflow
