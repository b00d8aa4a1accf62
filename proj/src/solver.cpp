#include "gasflow/solver.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <queue>
#include <limits>
#include <sstream>

namespace gasflow {

namespace {

double max_norm(const Eigen::VectorXd& v) {
    return v.size() == 0 ? 0.0 : v.lpNorm<Eigen::Infinity>();
}

template <class Fn>
auto with_pipe_context(const std::string& pipe_id, Fn&& fn) {
    try {
        return fn();
    } catch (PipeIntegrationError& e) {
        e.attach_pipe(pipe_id);
        throw;
    }
}

}  // namespace

std::string_view to_string(InitMode mode) {
    switch (mode) {
        case InitMode::Collocation: return "collocation";
        case InitMode::Flat: return "flat";
        case InitMode::Given: return "file";
    }
    return "collocation";
}

InitMode parse_init_mode(std::string_view text) {
    if (text == "collocation") return InitMode::Collocation;
    if (text == "flat") return InitMode::Flat;
    if (text == "file") return InitMode::Given;
    throw ConfigError("unknown init mode '" + std::string(text) + "' (expected collocation, flat or file)");
}

FlowState NetworkSolution::state() const {
    FlowState s;
    s.units = Units::SI;
    s.pressure = pressure;
    s.injection = injection;
    s.flow = flow;
    return s;
}

double NetworkSolution::node_pressure(const std::string& id) const {
    for (std::size_t i = 0; i < node_ids.size(); ++i) {
        if (node_ids[i] == id) return pressure[i];
    }
    throw ConfigError("unknown node id '" + id + "'");
}

double NetworkSolution::edge_flow(const std::string& id) const {
    for (std::size_t i = 0; i < edge_ids.size(); ++i) {
        if (edge_ids[i] == id) return flow[i];
    }
    throw ConfigError("unknown edge id '" + id + "'");
}

NetworkSystem::NetworkSystem(Network nondim_network, const NominalScales& scales, FlowModel model,
                             ode::Options ode, ResidualForm form)
    : network_(std::move(nondim_network)), model_(std::move(model)), ode_(ode), form_(form) {
    if (network_.units() != Units::Nondimensional) {
        throw ConfigError("NetworkSystem requires a nondimensional network");
    }
    geometry_.reserve(network_.pipes().size());
    for (std::size_t i = 0; i < network_.pipes().size(); ++i) {
        const auto& p = network_.pipes()[i];
        PipeGeometry g;
        g.length = p.length;
        g.diameter = p.diameter;
        g.area = p.area;
        g.friction = p.friction;
        g.sin_theta = network_.sin_theta(i);
        check_geometry(g);
        g.groups = groups_for_pipe(scales, g.area, g.diameter, g.friction);
        geometry_.push_back(g);
    }

    const std::size_t base = network_.compressors().size() + network_.pipes().size();
    node_row_.assign(network_.nodes().size(), 0);
    std::size_t next = base;
    for (std::size_t n = 0; n < network_.nodes().size(); ++n) {
        if (network_.nodes()[n].kind == NodeKind::NonSlack) node_row_[n] = next++;
    }
    for (std::size_t n = 0; n < network_.nodes().size(); ++n) {
        if (network_.nodes()[n].kind == NodeKind::Slack) node_row_[n] = next++;
    }
}

Eigen::VectorXd NetworkSystem::residual(const Eigen::VectorXd& u, PipeRowMode mode) const {
    Eigen::VectorXd r(size());
    const auto& nodes = network_.nodes();
    for (std::size_t c = 0; c < network_.compressors().size(); ++c) {
        const double a = network_.compressors()[c].ratio;
        r[compressor_row(c)] =
            a * a * a * u[pi_slot(network_.compressor_from(c))] - u[pi_slot(network_.compressor_to(c))];
    }
    for (std::size_t k = 0; k < network_.pipes().size(); ++k) {
        const double pi_i = u[pi_slot(network_.pipe_from(k))];
        const double pi_j = u[pi_slot(network_.pipe_to(k))];
        const double f = u[flow_slot(network_.pipe_slot(k))];
        const auto& g = geometry_[k];
        r[pipe_row(k)] = with_pipe_context(network_.pipes()[k].id, [&] {
            if (mode == PipeRowMode::Collocation) {
                return pi_i - pi_j + 0.5 * g.length * (rhs_H(pi_i, f, g, model_) + rhs_H(pi_j, f, g, model_));
            }
            if (!(pi_i > 0.0) || !(pi_j > 0.0)) {
                throw NonPhysicalPressure("nodal transformed pressure is not positive");
            }
            return residual_value(std::cbrt(pi_i), std::cbrt(pi_j), f, g, model_, ode_, form_);
        });
    }
    for (std::size_t n = 0; n < nodes.size(); ++n) {
        if (nodes[n].kind == NodeKind::Slack) {
            const double ps = nodes[n].pressure;
            r[node_row(n)] = u[pi_slot(n)] - ps * ps * ps;
        } else {
            const auto& inc = network_.incidence(n);
            double net = -nodes[n].injection;
            for (auto s : inc.outgoing) net += u[flow_slot(s)];
            for (auto s : inc.incoming) net -= u[flow_slot(s)];
            r[node_row(n)] = net;
        }
    }
    return r;
}

Eigen::SparseMatrix<double> NetworkSystem::jacobian(const Eigen::VectorXd& u, PipeRowMode mode) const {
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(3 * network_.edges().size() + 2 * network_.edges().size() + network_.nodes().size());
    const auto& nodes = network_.nodes();

    for (std::size_t c = 0; c < network_.compressors().size(); ++c) {
        const double a = network_.compressors()[c].ratio;
        t.emplace_back(compressor_row(c), pi_slot(network_.compressor_from(c)), a * a * a);
        t.emplace_back(compressor_row(c), pi_slot(network_.compressor_to(c)), -1.0);
    }
    for (std::size_t k = 0; k < network_.pipes().size(); ++k) {
        const auto from = network_.pipe_from(k), to = network_.pipe_to(k);
        const double pi_i = u[pi_slot(from)];
        const double pi_j = u[pi_slot(to)];
        const double f = u[flow_slot(network_.pipe_slot(k))];
        const auto& g = geometry_[k];
        const auto row = pipe_row(k);
        with_pipe_context(network_.pipes()[k].id, [&] {
            if (mode == PipeRowMode::Collocation) {
                const auto hi = rhs_H_partials(pi_i, f, g, model_);
                const auto hj = rhs_H_partials(pi_j, f, g, model_);
                t.emplace_back(row, pi_slot(from), 1.0 + 0.5 * g.length * hi.dp);
                t.emplace_back(row, pi_slot(to), -1.0 + 0.5 * g.length * hj.dp);
                t.emplace_back(row, flow_slot(network_.pipe_slot(k)), 0.5 * g.length * (hi.df + hj.df));
                return 0;
            }
            if (!(pi_i > 0.0) || !(pi_j > 0.0)) {
                throw NonPhysicalPressure("nodal transformed pressure is not positive");
            }
            const double p_i = std::cbrt(pi_i), p_j = std::cbrt(pi_j);
            const auto res = residual_F(p_i, p_j, f, g, model_, ode_, form_);
            // Chain rule to the transformed unknowns: d/dpi = (d/dp) / (3 p^2).
            t.emplace_back(row, pi_slot(from), res.d_inlet / (3.0 * p_i * p_i));
            t.emplace_back(row, pi_slot(to), res.d_outlet / (3.0 * p_j * p_j));
            t.emplace_back(row, flow_slot(network_.pipe_slot(k)), res.d_flow);
            return 0;
        });
    }
    for (std::size_t n = 0; n < nodes.size(); ++n) {
        if (nodes[n].kind == NodeKind::Slack) {
            t.emplace_back(node_row(n), pi_slot(n), 1.0);
        } else {
            const auto& inc = network_.incidence(n);
            for (auto s : inc.outgoing) t.emplace_back(node_row(n), flow_slot(s), 1.0);
            for (auto s : inc.incoming) t.emplace_back(node_row(n), flow_slot(s), -1.0);
        }
    }
    Eigen::SparseMatrix<double> j(size(), size());
    j.setFromTriplets(t.begin(), t.end());
    return j;
}

Eigen::VectorXd NetworkSystem::initial_guess() const {
    const auto& nodes = network_.nodes();
    const auto slack = network_.slack_nodes();
    if (slack.empty()) {
        throw ConfigError("network has no slack node");
    }
    Eigen::VectorXd u = Eigen::VectorXd::Zero(size());
    const double ps = nodes[slack.front()].pressure;
    for (std::size_t n = 0; n < nodes.size(); ++n) {
        u[pi_slot(n)] = ps * ps * ps;
    }

    // Maximum-conductance spanning tree rooted at the first slack node (Prim), so the
    // initial flows travel through the widest, shortest lines. Compressors rank first.
    auto conductance = [&](std::size_t s) {
        const auto& e = network_.edges()[s];
        if (e.kind == EdgeKind::Compressor) return std::numeric_limits<double>::infinity();
        const auto& g = geometry_[e.index];
        return g.friction > 0.0 ? std::pow(g.diameter, 5) / (g.friction * g.length)
                                : std::numeric_limits<double>::infinity();
    };
    const auto none = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> parent_edge(nodes.size(), none);
    std::vector<char> seen(nodes.size(), 0);
    std::vector<std::size_t> order;
    // (conductance, -slot) ordering keeps ties deterministic.
    using Candidate = std::pair<double, std::ptrdiff_t>;
    std::priority_queue<Candidate> heap;
    auto visit = [&](std::size_t v) {
        seen[v] = 1;
        order.push_back(v);
        const auto& inc = network_.incidence(v);
        for (auto lists : {&inc.outgoing, &inc.incoming}) {
            for (auto s : *lists) {
                const auto w = network_.edge_from(s) == v ? network_.edge_to(s) : network_.edge_from(s);
                if (!seen[w]) heap.emplace(conductance(s), -static_cast<std::ptrdiff_t>(s));
            }
        }
    };
    visit(slack.front());
    while (!heap.empty()) {
        const auto s = static_cast<std::size_t>(-heap.top().second);
        heap.pop();
        const auto a = network_.edge_from(s), b = network_.edge_to(s);
        if (seen[a] && seen[b]) continue;
        const auto w = seen[a] ? b : a;
        parent_edge[w] = s;
        visit(w);
    }

    std::vector<double> subtree(nodes.size(), 0.0);
    for (std::size_t n = 0; n < nodes.size(); ++n) {
        if (nodes[n].kind == NodeKind::NonSlack) subtree[n] = nodes[n].injection;
    }
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const auto v = *it;
        const auto s = parent_edge[v];
        if (s == none) continue;
        // Net injection of the subtree leaves v through its parent edge.
        const bool outward = network_.edge_from(s) == v;
        u[flow_slot(s)] = outward ? subtree[v] : -subtree[v];
        const auto parent = outward ? network_.edge_to(s) : network_.edge_from(s);
        subtree[parent] += subtree[v];
    }
    return u;
}

Eigen::VectorXd NetworkSystem::from_state(const FlowState& state) const {
    if (state.units != Units::Nondimensional) {
        throw ConfigError("initial state must be nondimensional");
    }
    if (state.pressure.size() != network_.nodes().size() || state.flow.size() != network_.edges().size()) {
        throw ConfigError("initial state does not match the network size");
    }
    Eigen::VectorXd u(size());
    for (std::size_t n = 0; n < state.pressure.size(); ++n) {
        const double p = state.pressure[n];
        u[pi_slot(n)] = p * p * p;
    }
    for (std::size_t s = 0; s < state.flow.size(); ++s) {
        u[flow_slot(s)] = state.flow[s];
    }
    return u;
}

double NetworkSystem::pressure_residual(const Eigen::VectorXd& u) const {
    double worst = 0.0;
    for (std::size_t k = 0; k < network_.pipes().size(); ++k) {
        const double p_i = std::cbrt(u[pi_slot(network_.pipe_from(k))]);
        const double p_j = std::cbrt(u[pi_slot(network_.pipe_to(k))]);
        const double f = u[flow_slot(network_.pipe_slot(k))];
        const double r = with_pipe_context(network_.pipes()[k].id, [&] {
            return residual_value(p_i, p_j, f, geometry_[k], model_, ode_, ResidualForm::Linear);
        });
        worst = std::max(worst, std::abs(r));
    }
    return worst;
}

namespace {

// Factorizes J; when J is singular because a pipe row has no flow dependence
// (f = 0 makes dF/df vanish), retries with a small flow coefficient on such rows.
bool solve_linear(const NetworkSystem& system, Eigen::SparseMatrix<double> j, const Eigen::VectorXd& rhs,
                  Eigen::VectorXd& out) {
    for (int attempt = 0; attempt < 2; ++attempt) {
        Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
        j.makeCompressed();
        lu.compute(j);
        if (lu.info() == Eigen::Success) {
            out = lu.solve(rhs);
            if (lu.info() == Eigen::Success && out.allFinite()) {
                return true;
            }
        }
        if (attempt == 1) break;
        const auto& net = system.network();
        for (std::size_t k = 0; k < net.pipes().size(); ++k) {
            const auto row = static_cast<Eigen::Index>(system.pipe_row(k));
            const auto col = static_cast<Eigen::Index>(system.flow_slot(net.pipe_slot(k)));
            const double scale = std::max(std::abs(j.coeff(row, system.pi_slot(net.pipe_from(k)))), 1.0);
            if (std::abs(j.coeff(row, col)) < 1e-10 * scale) {
                j.coeffRef(row, col) = -1e-6 * scale;
            }
        }
    }
    return false;
}

}  // namespace

NewtonTrace newton_solve(const NetworkSystem& system, PipeRowMode mode, Eigen::VectorXd& u,
                         const SolveOptions& options) {
    NewtonTrace trace;
    const std::size_t n_pi = system.network().nodes().size();
    Eigen::VectorXd r = system.residual(u, mode);
    double norm = max_norm(r);

    auto fail = [&](const std::string& why) {
        SolveReport report;
        report.residual_norm = norm;
        report.residuals.assign(r.data(), r.data() + r.size());
        (mode == PipeRowMode::Collocation ? report.collocation : report.ode) = trace;
        std::ostringstream msg;
        msg << (mode == PipeRowMode::Collocation ? "collocation" : "ode") << " stage: " << why << " after "
            << trace.iterations << " iterations (residual " << norm << ")";
        throw NonConvergence(msg.str(), u, std::move(report));
    };

    for (;;) {
        trace.residual_norms.push_back(norm);
        if (norm <= options.tol) {
            trace.converged = true;
            return trace;
        }
        if (trace.iterations >= options.max_iter) {
            fail("iteration limit reached");
        }
        Eigen::VectorXd delta;
        if (!solve_linear(system, system.jacobian(u, mode), -r, delta)) {
            fail("singular Jacobian");
        }

        double t = 1.0;
        for (std::size_t i = 0; i < n_pi; ++i) {
            if (delta[i] < 0.0) {
                t = std::min(t, (1.0 - options.positivity) * u[i] / -delta[i]);
            }
        }
        bool accepted = false;
        Eigen::VectorXd trial;
        Eigen::VectorXd r_trial;
        while (t >= options.min_step) {
            trial = u + t * delta;
            try {
                r_trial = system.residual(trial, mode);
                if (r_trial.allFinite() && max_norm(r_trial) <= (1.0 - options.armijo * t) * norm) {
                    accepted = true;
                    break;
                }
            } catch (const PipeIntegrationError&) {
            } catch (const DomainError&) {
            }
            t *= options.backtrack;
        }
        if (!accepted) {
            fail("line search failed");
        }
        u = std::move(trial);
        r = std::move(r_trial);
        norm = max_norm(r);
        trace.step_lengths.push_back(t);
        ++trace.iterations;
    }
}

Eigen::VectorXd solve_collocation(const NetworkSystem& system, const SolveOptions& options,
                                  std::optional<Eigen::VectorXd> u0, NewtonTrace* trace) {
    Eigen::VectorXd u = u0 ? *u0 : system.initial_guess();
    auto result = newton_solve(system, PipeRowMode::Collocation, u, options);
    if (trace) *trace = std::move(result);
    return u;
}

NominalScales scales_for(const Network& network, const EosModel& eos, const NominalOverrides& overrides) {
    return build_scales(default_nominal(network, eos, overrides), eos);
}

namespace {

NetworkSolution make_solution(const NetworkSystem& system, const Eigen::VectorXd& u, const NominalScales& scales) {
    const auto& net = system.network();
    NetworkSolution sol;
    sol.scales = scales;
    std::vector<double> flows_nd(net.edges().size());
    for (std::size_t s = 0; s < net.edges().size(); ++s) {
        flows_nd[s] = u[system.flow_slot(s)];
    }
    const auto q_nd = nodal_injections(net, flows_nd);
    for (std::size_t n = 0; n < net.nodes().size(); ++n) {
        sol.node_ids.push_back(net.nodes()[n].id);
        const double pi = u[system.pi_slot(n)];
        sol.transformed.push_back(pi);
        sol.pressure.push_back(std::cbrt(pi) * scales.pressure);
        sol.injection.push_back(q_nd[n] * scales.mass_flow);
    }
    for (std::size_t s = 0; s < net.edges().size(); ++s) {
        sol.edge_ids.push_back(net.edge_id(s));
        sol.edge_kinds.push_back(net.edges()[s].kind);
        sol.flow.push_back(flows_nd[s] * scales.mass_flow);
    }
    return sol;
}

}  // namespace

SolveResult solve_network(const Network& network, const EosModel& eos, const SolveOptions& options,
                          const std::optional<FlowState>& initial) {
    require_valid(network);
    const auto scales = scales_for(network, eos, options.nominal);
    Network nd = nondimensionalize(network, scales);

    FlowModel model{ScaledEos(eos, scales), options.physics};
    NetworkSystem system(nd, scales, model, options.ode, options.form);

    SolveResult result;
    Eigen::VectorXd u;
    std::optional<Diagnostic> fallback;
    switch (options.init) {
        case InitMode::Given:
            if (!initial) {
                throw ConfigError("init mode 'file' needs an initial state");
            }
            u = system.from_state(nondimensionalize(*initial, scales));
            break;
        case InitMode::Flat:
            u = system.initial_guess();
            break;
        case InitMode::Collocation: {
            u = system.initial_guess();
            try {
                result.report.collocation = newton_solve(system, PipeRowMode::Collocation, u, options);
                result.collocation = make_solution(system, u, scales);
            } catch (const NonConvergence& e) {
                // The two-point rule can lose its positive root on strongly inclined pipes.
                result.report.collocation = e.report().collocation;
                fallback = Diagnostic{Severity::Warning, DiagnosticCode::CollocationFallback, network.name(),
                                      std::string(e.what()) + "; continuing from the flat guess"};
                u = system.initial_guess();
            }
            break;
        }
    }

    try {
        result.report.ode = newton_solve(system, PipeRowMode::Ode, u, options);
    } catch (const NonConvergence& e) {
        SolveReport report = e.report();
        report.collocation = result.report.collocation;
        if (fallback) report.warnings.push_back(*fallback);
        throw NonConvergence(e.what(), e.best_iterate(), std::move(report));
    }

    result.report.converged = true;
    result.report.iterations = result.report.ode.iterations;
    const Eigen::VectorXd r = system.residual(u, PipeRowMode::Ode);
    result.report.residuals.assign(r.data(), r.data() + r.size());
    result.report.residual_norm = max_norm(r);
    result.report.pressure_residual_norm = system.pressure_residual(u);

    result.solution = make_solution(system, u, scales);
    std::vector<double> flows_nd(nd.edges().size());
    for (std::size_t s = 0; s < flows_nd.size(); ++s) flows_nd[s] = u[system.flow_slot(s)];
    result.report.warnings = flow_diagnostics(nd, flows_nd);
    if (fallback) result.report.warnings.insert(result.report.warnings.begin(), *fallback);

    if (options.profiles) {
        for (std::size_t k = 0; k < nd.pipes().size(); ++k) {
            const double p_i = std::cbrt(u[system.pi_slot(nd.pipe_from(k))]);
            const double f = u[system.flow_slot(nd.pipe_slot(k))];
            const auto prof = integrate_pressure(p_i, f, system.geometries()[k], model, options.ode);
            PipeProfile out;
            out.pipe_id = nd.pipes()[k].id;
            for (std::size_t i = 0; i < prof.x.size(); ++i) {
                out.x.push_back(prof.x[i] * scales.length);
                out.p.push_back(prof.p[i] * scales.pressure);
            }
            result.solution.profiles.push_back(std::move(out));
        }
    }
    return result;
}

}  // namespace gasflow
