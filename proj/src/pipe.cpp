#include "gasflow/pipe.hpp"

#include <cmath>
#include <string>

#include "gasflow/errors.hpp"

namespace gasflow {

namespace {

struct Terms {
    double rho, drho, d2rho, sin_theta, numerator, denominator;
};

Terms evaluate_terms(double p, double f, const PipeGeometry& geom, const FlowModel& model) {
    if (!(p > 0.0) || !std::isfinite(p)) {
        throw NonPhysicalPressure("pressure left the physical region (p = " + std::to_string(p) + ")");
    }
    const auto& g = geom.groups;
    Terms t{};
    t.rho = model.eos.density(p);
    t.drho = model.eos.drho_dp(p);
    t.d2rho = model.eos.d2rho_dp2(p);
    t.sin_theta = model.physics.gravity ? geom.sin_theta : 0.0;
    t.numerator = g.r2 * t.rho * t.rho * t.sin_theta - g.r1 * g.beta * f * std::abs(f);
    t.denominator = t.rho * t.rho;
    if (model.physics.inertia) {
        t.denominator -= g.r1 * f * f * t.drho;
        if (t.denominator <= kChokeThreshold * t.rho * t.rho) {
            throw ChokedFlow("flow is choked: rho^2 - R1 f^2 rho'(p) = " + std::to_string(t.denominator) +
                             " at p = " + std::to_string(p) + ", f = " + std::to_string(f));
        }
    }
    return t;
}

void check_status(ode::Status status, double p_in, double f) {
    switch (status) {
        case ode::Status::Success:
            return;
        case ode::Status::StepBudgetExceeded:
            throw StiffnessBudgetExceeded("integration step budget exhausted (p_in = " + std::to_string(p_in) +
                                          ", f = " + std::to_string(f) + ")");
        case ode::Status::StepSizeUnderflow:
            throw NonPhysicalPressure("pressure collapses to zero inside the pipe (p_in = " +
                                      std::to_string(p_in) + ", f = " + std::to_string(f) + ")");
    }
}

void check_inlet(double p_in) {
    if (!(p_in > 0.0) || !std::isfinite(p_in)) {
        throw NonPhysicalPressure("inlet pressure must be positive (p_in = " + std::to_string(p_in) + ")");
    }
}

}  // namespace

PipeGeometry make_pipe_geometry(const NominalScales& scales, double length, double diameter, double area,
                                double friction, double sin_theta) {
    PipeGeometry g;
    g.length = length;
    g.diameter = diameter;
    g.area = area;
    g.friction = friction;
    g.sin_theta = sin_theta;
    check_geometry(g);
    g.groups = groups_for_pipe(scales, area, diameter, friction);
    return g;
}

void check_geometry(const PipeGeometry& geom) {
    if (!(geom.length > 0.0) || !(geom.diameter > 0.0) || !(geom.area > 0.0)) {
        throw ConfigError("pipe length, diameter and area must be positive");
    }
    if (!(geom.friction >= 0.0)) {
        throw ConfigError("pipe friction factor must be non-negative");
    }
    if (!(std::abs(geom.sin_theta) <= 1.0)) {
        throw ConfigError("pipe incline must satisfy |sin(theta)| <= 1");
    }
}

double rhs_G(double p, double f, const PipeGeometry& geom, const FlowModel& model) {
    const auto t = evaluate_terms(p, f, geom, model);
    return t.rho * t.numerator / t.denominator;
}

Partials rhs_G_partials(double p, double f, const PipeGeometry& geom, const FlowModel& model) {
    const auto t = evaluate_terms(p, f, geom, model);
    const auto& g = geom.groups;
    const bool inertia = model.physics.inertia;

    const double dnum_dp = 2.0 * g.r2 * t.rho * t.drho * t.sin_theta;
    const double dden_dp = 2.0 * t.rho * t.drho - (inertia ? g.r1 * f * f * t.d2rho : 0.0);
    const double dnum_df = -2.0 * g.r1 * g.beta * std::abs(f);
    const double dden_df = inertia ? -2.0 * g.r1 * f * t.drho : 0.0;

    const double d = t.denominator;
    const double rn = t.rho * t.numerator;
    Partials out;
    out.dp = (t.drho * t.numerator + t.rho * dnum_dp) / d - rn * dden_dp / (d * d);
    out.df = t.rho * dnum_df / d - rn * dden_df / (d * d);
    return out;
}

double rhs_H(double pi, double f, const PipeGeometry& geom, const FlowModel& model) {
    if (!(pi > 0.0)) {
        throw NonPhysicalPressure("transformed pressure left the physical region (pi = " + std::to_string(pi) + ")");
    }
    const double p = std::cbrt(pi);
    return 3.0 * p * p * rhs_G(p, f, geom, model);
}

Partials rhs_H_partials(double pi, double f, const PipeGeometry& geom, const FlowModel& model) {
    if (!(pi > 0.0)) {
        throw NonPhysicalPressure("transformed pressure left the physical region (pi = " + std::to_string(pi) + ")");
    }
    const double p = std::cbrt(pi);
    const double g = rhs_G(p, f, geom, model);
    const auto gp = rhs_G_partials(p, f, geom, model);
    // dH/dpi = (6 p G + 3 p^2 G_p) dp/dpi with dp/dpi = 1 / (3 p^2).
    return Partials{2.0 * g / p + gp.dp, 3.0 * p * p * gp.df};
}

ode::Options default_pipe_ode_options() {
    return ode::Options{};
}

PipeSolution integrate_pressure(double p_in, double f, const PipeGeometry& geom, const FlowModel& model,
                                const ode::Options& opt) {
    check_inlet(p_in);
    auto rhs = [&](double, const ode::State<1>& y) { return ode::State<1>{rhs_H(y[0], f, geom, model)}; };
    auto admissible = [](const ode::State<1>& y) { return y[0] > 0.0; };
    const auto traj = ode::integrate<1>(rhs, admissible, 0.0, geom.length, {p_in * p_in * p_in}, opt);
    check_status(traj.status, p_in, f);

    PipeSolution sol;
    sol.flow = f;
    sol.x = traj.x;
    sol.p.reserve(traj.y.size());
    for (const auto& y : traj.y) {
        sol.p.push_back(std::cbrt(y[0]));
    }
    sol.p.front() = p_in;
    sol.outlet_transformed = traj.y.back()[0];
    return sol;
}

PipeSolution integrate_with_sensitivities(double p_in, double f, const PipeGeometry& geom, const FlowModel& model,
                                          const ode::Options& opt) {
    check_inlet(p_in);
    auto rhs = [&](double, const ode::State<3>& y) {
        const double p = std::cbrt(y[0]);
        const double g = rhs_G(p, f, geom, model);
        const auto d = rhs_G_partials(p, f, geom, model);
        return ode::State<3>{3.0 * p * p * g, d.dp * y[1], d.dp * y[2] + d.df};
    };
    auto admissible = [](const ode::State<3>& y) { return y[0] > 0.0; };
    const auto traj = ode::integrate<3>(rhs, admissible, 0.0, geom.length, {p_in * p_in * p_in, 1.0, 0.0}, opt);
    check_status(traj.status, p_in, f);

    PipeSolution sol;
    sol.flow = f;
    sol.x = traj.x;
    const auto n = traj.y.size();
    sol.p.reserve(n);
    sol.s_p.reserve(n);
    sol.s_f.reserve(n);
    for (const auto& y : traj.y) {
        sol.p.push_back(std::cbrt(y[0]));
        sol.s_p.push_back(y[1]);
        sol.s_f.push_back(y[2]);
    }
    sol.p.front() = p_in;
    sol.outlet_transformed = traj.y.back()[0];
    return sol;
}

PipeResidual residual_F(double p_i, double p_j, double f, const PipeGeometry& geom, const FlowModel& model,
                        const ode::Options& opt, ResidualForm form) {
    if (!(p_j > 0.0)) {
        throw NonPhysicalPressure("outlet pressure must be positive (p_j = " + std::to_string(p_j) + ")");
    }
    const auto sol = integrate_with_sensitivities(p_i, f, geom, model, opt);
    const double p_l = sol.outlet();
    PipeResidual r;
    if (form == ResidualForm::Cubic) {
        const double scale = 3.0 * p_l * p_l;
        r.value = sol.outlet_transformed - p_j * p_j * p_j;
        r.d_inlet = scale * sol.s_p.back();
        r.d_flow = scale * sol.s_f.back();
        r.d_outlet = -3.0 * p_j * p_j;
    } else {
        r.value = p_l - p_j;
        r.d_inlet = sol.s_p.back();
        r.d_flow = sol.s_f.back();
        r.d_outlet = -1.0;
    }
    return r;
}

double residual_value(double p_i, double p_j, double f, const PipeGeometry& geom, const FlowModel& model,
                      const ode::Options& opt, ResidualForm form) {
    if (!(p_j > 0.0)) {
        throw NonPhysicalPressure("outlet pressure must be positive (p_j = " + std::to_string(p_j) + ")");
    }
    const auto sol = integrate_pressure(p_i, f, geom, model, opt);
    if (form == ResidualForm::Cubic) {
        return sol.outlet_transformed - p_j * p_j * p_j;
    }
    return sol.outlet() - p_j;
}

}  // namespace gasflow
