#include "gasflow/nondim.hpp"

#include <cmath>
#include <string>

#include "gasflow/errors.hpp"

namespace gasflow {

namespace {

void require_scale(double value, const char* name) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw ConfigError(std::string("nominal ") + name + " must be positive and finite");
    }
}

Network rescale(const Network& network, const NominalScales& s, bool forward) {
    auto length = [&](double v) { return forward ? v / s.length : v * s.length; };
    auto pressure = [&](double v) { return forward ? v / s.pressure : v * s.pressure; };
    auto flow = [&](double v) { return forward ? v / s.mass_flow : v * s.mass_flow; };
    auto area = [&](double v) { return forward ? v / s.area : v * s.area; };

    auto nodes = network.nodes();
    for (auto& n : nodes) {
        n.pressure = pressure(n.pressure);
        n.injection = flow(n.injection);
        if (n.elevation) {
            n.elevation = length(*n.elevation);
        }
    }
    auto pipes = network.pipes();
    for (std::size_t i = 0; i < pipes.size(); ++i) {
        auto& p = pipes[i];
        p.length = length(p.length);
        p.diameter = length(p.diameter);
        p.area = area(p.area);
        p.sin_theta = network.sin_theta(i);
    }
    // Inclines are invariant; scaled elevations reproduce the same resolved value.
    return Network(network.name(), std::move(nodes), std::move(pipes), network.compressors(),
                   forward ? Units::Nondimensional : Units::SI);
}

}  // namespace

NominalScales build_scales(const NominalInputs& in, const EosModel& model) {
    require_scale(in.length, "length");
    require_scale(in.velocity, "velocity");
    require_scale(in.pressure, "pressure");
    require_scale(in.density, "density");
    NominalScales s;
    s.length = in.length;
    s.velocity = in.velocity;
    s.pressure = in.pressure;
    s.density = in.density;
    s.sound_speed = model.sound_speed(in.density);
    s.area = 1.0;
    s.mass_flow = s.density * s.velocity * s.area;
    return s;
}

NominalInputs default_nominal(const Network& network, const EosModel& model, const NominalOverrides& o) {
    NominalInputs in;
    double longest = 0.0;
    for (const auto& p : network.pipes()) {
        longest = std::max(longest, p.length);
    }
    in.length = o.length.value_or(longest);
    in.velocity = o.velocity.value_or(1.0);
    if (o.pressure) {
        in.pressure = *o.pressure;
    } else {
        const auto slack = network.slack_nodes();
        if (slack.empty()) {
            throw ConfigError("no slack node to define the nominal pressure");
        }
        in.pressure = network.nodes()[slack.front()].pressure;
    }
    in.density = o.density.value_or(model.standard_density());
    return in;
}

DimensionlessGroups groups(const NominalScales& s) {
    DimensionlessGroups g;
    g.mach = s.velocity / s.sound_speed;
    g.euler = s.pressure / (s.density * s.sound_speed * s.sound_speed);
    g.froude = s.velocity / std::sqrt(s.gravity * s.length);
    g.r2 = g.mach * g.mach / (g.euler * g.froude * g.froude);
    return g;
}

PipeGroups groups_for_pipe(const NominalScales& scales, double area, double diameter, double friction) {
    if (!(area > 0.0) || !(diameter > 0.0)) {
        throw ConfigError("pipe area and diameter must be positive");
    }
    if (!(friction >= 0.0)) {
        throw ConfigError("pipe friction factor must be non-negative");
    }
    const auto g = groups(scales);
    return PipeGroups{g.r1(area), g.r2, friction / (2.0 * diameter)};
}

Network nondimensionalize(const Network& network, const NominalScales& scales) {
    if (network.units() != Units::SI) {
        throw ConfigError("network is not in SI units");
    }
    return rescale(network, scales, true);
}

Network redimensionalize(const Network& network, const NominalScales& scales) {
    if (network.units() != Units::Nondimensional) {
        throw ConfigError("network is not nondimensional");
    }
    return rescale(network, scales, false);
}

FlowState nondimensionalize(const FlowState& state, const NominalScales& s) {
    if (state.units != Units::SI) {
        throw ConfigError("flow state is not in SI units");
    }
    FlowState out = state;
    out.units = Units::Nondimensional;
    for (auto& v : out.pressure) v /= s.pressure;
    for (auto& v : out.injection) v /= s.mass_flow;
    for (auto& v : out.flow) v /= s.mass_flow;
    return out;
}

FlowState redimensionalize(const FlowState& state, const NominalScales& s) {
    if (state.units != Units::Nondimensional) {
        throw ConfigError("flow state is not nondimensional");
    }
    FlowState out = state;
    out.units = Units::SI;
    for (auto& v : out.pressure) v *= s.pressure;
    for (auto& v : out.injection) v *= s.mass_flow;
    for (auto& v : out.flow) v *= s.mass_flow;
    return out;
}

}  // namespace gasflow
