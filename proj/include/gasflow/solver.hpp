#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <optional>
#include <string>
#include <vector>

#include "gasflow/errors.hpp"
#include "gasflow/network.hpp"
#include "gasflow/nondim.hpp"
#include "gasflow/pipe.hpp"

namespace gasflow {

/// How pipe rows of the network system are evaluated.
enum class PipeRowMode {
    Ode,          // solution-operator residual via integration
    Collocation,  // two-point collocation: pi_i - pi_j + L (H(pi_i) + H(pi_j)) / 2
};

enum class InitMode { Collocation, Flat, Given };

std::string_view to_string(InitMode mode);
InitMode parse_init_mode(std::string_view text);

struct SolveOptions {
    double tol = 1e-8;  // max-norm of the residual in transformed variables
    int max_iter = 50;
    double armijo = 1e-4;
    double backtrack = 0.5;
    double min_step = 1.0 / 1048576.0;  // 2^-20
    /// Each step keeps every pi above this fraction of its current value.
    double positivity = 0.1;
    PhysicsOptions physics;
    ode::Options ode = default_pipe_ode_options();
    ResidualForm form = ResidualForm::Cubic;
    InitMode init = InitMode::Collocation;
    NominalOverrides nominal;
    bool profiles = false;
};

struct NewtonTrace {
    bool converged = false;
    int iterations = 0;
    std::vector<double> residual_norms;  // one per visited iterate
    std::vector<double> step_lengths;    // one per accepted step
};

struct SolveReport {
    bool converged = false;
    int iterations = 0;  // stage-2 (ode) iterations
    double residual_norm = 0.0;
    /// max over pipes of |p(L; p_i, f) - p_j| in nondimensional pressure.
    double pressure_residual_norm = 0.0;
    std::vector<double> residuals;  // per equation, row order of NetworkSystem
    NewtonTrace collocation;
    NewtonTrace ode;
    std::vector<Diagnostic> warnings;
};

class NonConvergence : public Error {
public:
    NonConvergence(const std::string& message, Eigen::VectorXd best_iterate, SolveReport report)
        : Error(message), best_iterate_(std::move(best_iterate)), report_(std::move(report)) {}

    const Eigen::VectorXd& best_iterate() const noexcept { return best_iterate_; }
    const SolveReport& report() const noexcept { return report_; }

private:
    Eigen::VectorXd best_iterate_;
    SolveReport report_;
};

/// Along-pipe pressure samples in SI.
struct PipeProfile {
    std::string pipe_id;
    std::vector<double> x;  // m
    std::vector<double> p;  // Pa
};

/// Solved network in SI, nodes and edges in Network slot order.
struct NetworkSolution {
    std::vector<std::string> node_ids;
    std::vector<double> pressure;     // Pa
    std::vector<double> transformed;  // pi = p_bar^3 (nondimensional)
    std::vector<double> injection;    // kg/s, positive supplies gas
    std::vector<std::string> edge_ids;
    std::vector<EdgeKind> edge_kinds;
    std::vector<double> flow;  // kg/s, positive along the declared direction
    NominalScales scales;
    std::vector<PipeProfile> profiles;

    FlowState state() const;
    double node_pressure(const std::string& id) const;
    double edge_flow(const std::string& id) const;
};

/// The nonlinear system over u = (pi per node, f per edge) for a nondimensional network.
/// Row order: compressors, pipes, non-slack balances, slack pressures.
class NetworkSystem {
public:
    /// `scales` are the physical scales the network was nondimensionalized with.
    NetworkSystem(Network nondim_network, const NominalScales& scales, FlowModel model,
                  ode::Options ode = default_pipe_ode_options(), ResidualForm form = ResidualForm::Cubic);

    std::size_t size() const { return network_.unknown_count(); }
    const Network& network() const noexcept { return network_; }
    const FlowModel& model() const noexcept { return model_; }
    const std::vector<PipeGeometry>& geometries() const noexcept { return geometry_; }
    const ode::Options& ode_options() const noexcept { return ode_; }

    std::size_t pi_slot(std::size_t node) const { return node; }
    std::size_t flow_slot(std::size_t edge_slot) const { return network_.nodes().size() + edge_slot; }
    std::size_t compressor_row(std::size_t c) const { return c; }
    std::size_t pipe_row(std::size_t pipe) const { return network_.compressors().size() + pipe; }
    std::size_t node_row(std::size_t node) const { return node_row_[node]; }

    Eigen::VectorXd residual(const Eigen::VectorXd& u, PipeRowMode mode) const;
    Eigen::SparseMatrix<double> jacobian(const Eigen::VectorXd& u, PipeRowMode mode) const;

    /// pi = (first slack pressure)^3 everywhere; spanning-tree flows balancing every
    /// non-slack injection, zero on chords.
    Eigen::VectorXd initial_guess() const;
    Eigen::VectorXd from_state(const FlowState& nondim_state) const;

    /// max over pipes of |p(L; p_i, f) - p_j|.
    double pressure_residual(const Eigen::VectorXd& u) const;

private:
    Network network_;
    FlowModel model_;
    ode::Options ode_;
    ResidualForm form_;
    std::vector<PipeGeometry> geometry_;
    std::vector<std::size_t> node_row_;
};

/// Damped Newton-Raphson with Armijo backtracking on the max-norm. Updates `u` in place;
/// throws NonConvergence carrying the best iterate.
NewtonTrace newton_solve(const NetworkSystem& system, PipeRowMode mode, Eigen::VectorXd& u,
                         const SolveOptions& options);

/// Coarse stage: Newton on the collocation system.
Eigen::VectorXd solve_collocation(const NetworkSystem& system, const SolveOptions& options,
                                  std::optional<Eigen::VectorXd> u0 = {}, NewtonTrace* trace = nullptr);

struct SolveResult {
    NetworkSolution solution;
    SolveReport report;
    std::optional<NetworkSolution> collocation;  // stage-1 iterate when InitMode::Collocation
};

/// Two-stage solve of an SI network: collocation guess (optional), then the ODE system.
/// `initial` (SI) is used with InitMode::Given.
SolveResult solve_network(const Network& network, const EosModel& eos, const SolveOptions& options = {},
                          const std::optional<FlowState>& initial = {});

NominalScales scales_for(const Network& network, const EosModel& eos, const NominalOverrides& overrides = {});

}  // namespace gasflow
