#include "gasflow/studies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "gasflow/integrals.hpp"

namespace gasflow {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double max_residual(const Network& network, const EosModel& eos, const FlowState& state,
                    const NominalOverrides& nominal, bool inertia) {
    const auto scales = scales_for(network, eos, nominal);
    const Network nd = nondimensionalize(network, scales);
    const FlowState s = nondimensionalize(state, scales);
    const double euler = groups(scales).euler;
    double worst = 0.0;
    for (std::size_t k = 0; k < nd.pipes().size(); ++k) {
        const auto& p = nd.pipes()[k];
        const auto geom = make_pipe_geometry(scales, p.length, p.diameter, p.area, p.friction, nd.sin_theta(k));
        const auto params = ideal_case_params(geom, euler, PhysicsOptions{inertia, false});
        const double f = s.flow[nd.pipe_slot(k)];
        double r;
        try {
            r = residual_case(params, s.pressure[nd.pipe_from(k)], s.pressure[nd.pipe_to(k)], f);
        } catch (const BranchViolation&) {
            return std::numeric_limits<double>::infinity();
        }
        worst = std::max(worst, std::abs(r));
    }
    return worst;
}

}  // namespace

Network single_pipe_network(const SinglePipe& pipe, double sin_theta) {
    std::vector<Node> nodes(2);
    nodes[0].id = "in";
    nodes[0].kind = NodeKind::Slack;
    nodes[0].pressure = pipe.inlet_pressure;
    nodes[1].id = "out";
    nodes[1].injection = -pipe.flow;
    Pipe p;
    p.id = "pipe";
    p.from = "in";
    p.to = "out";
    p.length = pipe.length;
    p.diameter = pipe.diameter;
    p.friction = pipe.friction;
    p.sin_theta = sin_theta;
    return Network("single-pipe", std::move(nodes), {p}, {});
}

std::vector<double> default_sweep_angles() {
    std::vector<double> a;
    for (int k = -8; k <= 8; ++k) a.push_back(0.5 * k);
    return a;
}

std::vector<SweepRow> sweep_incline(const SinglePipe& pipe, const SweepOptions& options) {
    const auto angles = options.angles_deg.empty() ? default_sweep_angles() : options.angles_deg;
    std::vector<SweepRow> rows;
    for (auto kind : options.eos) {
        EosParameters params = options.eos_parameters;
        params.kind = kind;
        const EosModel eos = EosModel::from_parameters(params);
        for (bool inertia : options.inertia) {
            SolveOptions solve = options.solve;
            solve.physics.inertia = inertia;
            auto outlet = [&](double deg, std::string& error) {
                try {
                    const double s = deg == 0.0 ? 0.0 : std::sin(deg * std::numbers::pi / 180.0);
                    return solve_network(single_pipe_network(pipe, s), eos, solve).solution.node_pressure("out");
                } catch (const Error& e) {
                    error = e.what();
                    return kNaN;
                }
            };
            std::string base_error;
            const double horizontal = outlet(0.0, base_error);
            for (double deg : angles) {
                SweepRow row;
                row.angle_deg = deg;
                row.eos = kind;
                row.inertia = inertia;
                row.outlet_pressure = deg == 0.0 ? horizontal : outlet(deg, row.error);
                if (deg == 0.0) row.error = base_error;
                row.relative_change = (row.outlet_pressure - horizontal) / horizontal;
                rows.push_back(row);
            }
        }
    }
    return rows;
}

std::vector<HistogramBin> histogram(const std::vector<double>& samples, std::size_t bins) {
    if (bins == 0) throw ConfigError("histogram needs at least one bin");
    if (samples.empty()) return {};
    auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
    double lo = *lo_it, hi = *hi_it;
    if (!(hi > lo)) hi = lo + 1.0;
    const double width = (hi - lo) / static_cast<double>(bins);
    std::vector<HistogramBin> out(bins);
    for (std::size_t b = 0; b < bins; ++b) {
        out[b].lower = lo + width * static_cast<double>(b);
        out[b].upper = b + 1 == bins ? hi : lo + width * static_cast<double>(b + 1);
    }
    for (double v : samples) {
        auto b = static_cast<std::size_t>((v - lo) / width);
        out[std::min(b, bins - 1)].count++;
    }
    const double total = static_cast<double>(samples.size());
    std::size_t running = 0;
    for (auto& bin : out) {
        running += bin.count;
        bin.density = static_cast<double>(bin.count) / (total * width);
        bin.cdf = static_cast<double>(running) / total;
    }
    return out;
}

GravityEffect gravity_effect(const Network& network, const EosModel& eos, const SolveOptions& options,
                             std::size_t bins) {
    SolveOptions on = options, off = options;
    on.physics.gravity = true;
    off.physics.gravity = false;
    auto with = solve_network(network, eos, on);
    auto without = solve_network(network, eos, off);

    GravityEffect out;
    std::vector<double> magnitudes;
    for (std::size_t i = 0; i < with.solution.node_ids.size(); ++i) {
        NodeDifference d;
        d.node_id = with.solution.node_ids[i];
        d.with_gravity = with.solution.pressure[i];
        d.without_gravity = without.solution.pressure[i];
        d.relative = (d.with_gravity - d.without_gravity) / d.without_gravity;
        magnitudes.push_back(std::abs(d.relative));
        out.nodes.push_back(d);
    }
    out.histogram = histogram(magnitudes, bins);
    out.with_gravity = std::move(with.report);
    out.without_gravity = std::move(without.report);
    return out;
}

IntegralResiduals first_integral_residuals(const Network& network, const EosModel& eos, const FlowState& state,
                                           const NominalOverrides& nominal) {
    require_ideal_horizontal(network, eos);
    if (state.units != Units::SI) throw ConfigError("state must be in SI units");
    if (state.pressure.size() != network.nodes().size() || state.flow.size() != network.edges().size()) {
        throw ConfigError("state does not match the network size");
    }
    return {max_residual(network, eos, state, nominal, false), max_residual(network, eos, state, nominal, true)};
}

void require_ideal_horizontal(const Network& network, const EosModel& eos) {
    if (eos.kind() != EosKind::Ideal) {
        throw ConfigError("first integrals exist only for the ideal EoS; rerun with --eos ideal");
    }
    for (std::size_t k = 0; k < network.pipes().size(); ++k) {
        if (network.sin_theta(k) != 0.0) {
            throw ConfigError("pipe '" + network.pipes()[k].id +
                              "' is inclined; validation uses the horizontal first integrals");
        }
    }
}

ValidationTable validate_first_integrals(const Network& network, const EosModel& eos, SolveOptions options) {
    require_ideal_horizontal(network, eos);
    options.init = InitMode::Collocation;
    ValidationTable t;
    for (bool inertia : {false, true}) {
        options.physics.inertia = inertia;
        const auto result = solve_network(network, eos, options);
        const double ode = max_residual(network, eos, result.solution.state(), options.nominal, inertia);
        const double colloc = result.collocation
                                  ? max_residual(network, eos, result.collocation->state(), options.nominal, inertia)
                                  : kNaN;
        (inertia ? t.inertia_ode : t.no_inertia_ode) = ode;
        (inertia ? t.inertia_collocation : t.no_inertia_collocation) = colloc;
    }
    return t;
}

}  // namespace gasflow
