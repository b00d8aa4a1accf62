#pragma once

#include <string>
#include <vector>

#include "gasflow/eos.hpp"
#include "gasflow/network.hpp"
#include "gasflow/solver.hpp"

namespace gasflow {

/// Single pipe fed at a slack inlet and drained at a fixed withdrawal.
struct SinglePipe {
    double length = 122e3;      // m
    double diameter = 1.422;    // m
    double friction = 0.03;
    double inlet_pressure = 8.8e6;  // Pa
    double flow = 400.0;            // kg/s
};

/// Two-node network "in" (slack) -> "out" through pipe "pipe" at the given incline.
Network single_pipe_network(const SinglePipe& pipe, double sin_theta);

struct SweepOptions {
    std::vector<double> angles_deg;  // empty: -4 to 4 in 0.5 steps
    std::vector<EosKind> eos{EosKind::Ideal, EosKind::Cnga};
    std::vector<bool> inertia{false, true};
    EosParameters eos_parameters;  // kind is overridden per row
    SolveOptions solve;            // physics.inertia is overridden per row
};

std::vector<double> default_sweep_angles();

struct SweepRow {
    double angle_deg = 0.0;
    EosKind eos = EosKind::Ideal;
    bool inertia = false;
    double outlet_pressure = 0.0;  // Pa, NaN when the solve failed
    /// (p - p_horizontal) / p_horizontal for the same EoS and inertia flag.
    double relative_change = 0.0;
    std::string error;
};

/// One row per (eos, inertia, angle) in that nesting order. Failed solves are
/// recorded in their row.
std::vector<SweepRow> sweep_incline(const SinglePipe& pipe, const SweepOptions& options = {});

struct NodeDifference {
    std::string node_id;
    double with_gravity = 0.0;     // Pa
    double without_gravity = 0.0;  // Pa
    double relative = 0.0;         // (with - without) / without
};

struct HistogramBin {
    double lower = 0.0;
    double upper = 0.0;
    std::size_t count = 0;
    double density = 0.0;  // count / (total * width); integrates to 1
    double cdf = 0.0;      // fraction of samples <= upper
};

/// Density-normalized histogram with an empirical CDF at the right bin edges.
/// A degenerate sample range [v, v] is widened to [v, v + 1].
std::vector<HistogramBin> histogram(const std::vector<double>& samples, std::size_t bins);

struct GravityEffect {
    std::vector<NodeDifference> nodes;
    /// Histogram of |relative| over all nodes.
    std::vector<HistogramBin> histogram;
    SolveReport with_gravity;
    SolveReport without_gravity;
};

/// Solves with gravity on and off. Either solve failing propagates.
GravityEffect gravity_effect(const Network& network, const EosModel& eos, const SolveOptions& options = {},
                             std::size_t bins = 20);

/// Max over pipes of |first-integral residual| (nondimensional).
struct IntegralResiduals {
    double no_inertia = 0.0;  // friction-only integral
    double inertia = 0.0;     // friction-inertia integral
};

/// Residuals of an SI state (pressures and flows) in the ideal horizontal first integrals.
IntegralResiduals first_integral_residuals(const Network& network, const EosModel& eos, const FlowState& state,
                                           const NominalOverrides& nominal = {});

/// Table-style validation: each integral evaluated at the collocation-stage and the
/// ODE-stage solutions of the matching model (inertia off for the first, on for the second).
struct ValidationTable {
    double no_inertia_collocation = 0.0;
    double no_inertia_ode = 0.0;
    double inertia_collocation = 0.0;
    double inertia_ode = 0.0;
};

/// Throws ConfigError unless the EoS is ideal and every pipe is horizontal.
void require_ideal_horizontal(const Network& network, const EosModel& eos);

ValidationTable validate_first_integrals(const Network& network, const EosModel& eos, SolveOptions options = {});

}  // namespace gasflow
