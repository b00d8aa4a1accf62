#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "gasflow/network.hpp"
#include "gasflow/nondim.hpp"
#include "gasflow/pipe.hpp"

namespace fixtures {

inline double rel_err(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

inline double deg(double degrees) {
    return std::sin(degrees * std::numbers::pi / 180.0);
}

inline gasflow::Node slack(const std::string& id, double p, std::optional<double> z = {}) {
    gasflow::Node n;
    n.id = id;
    n.kind = gasflow::NodeKind::Slack;
    n.pressure = p;
    n.elevation = z;
    return n;
}

inline gasflow::Node demand(const std::string& id, double q, std::optional<double> z = {}) {
    gasflow::Node n;
    n.id = id;
    n.injection = q;
    n.elevation = z;
    return n;
}

inline gasflow::Pipe pipe(const std::string& id, const std::string& from, const std::string& to, double length,
                          double diameter, double friction, std::optional<double> sin_theta = 0.0) {
    gasflow::Pipe p;
    p.id = id;
    p.from = from;
    p.to = to;
    p.length = length;
    p.diameter = diameter;
    p.friction = friction;
    p.sin_theta = sin_theta;
    return p;
}

/// The Yamal-Europe style single pipe: 122 km, 1.422 m, lambda 0.03, 8.8 MPa inlet, 400 kg/s.
inline gasflow::Network yamal(double sin_theta = 0.0) {
    return gasflow::Network("yamal", {slack("in", 8.8e6), demand("out", -400.0)},
                            {pipe("pipe", "in", "out", 122e3, 1.422, 0.03, sin_theta)}, {});
}

/// 5 nodes, 4 pipes and one compressor, with a loop and an inclined pipe.
inline gasflow::Network five_node() {
    using namespace gasflow;
    std::vector<Node> nodes{slack("a", 6e6), demand("b", -20.0), demand("c", -35.0), demand("d", 10.0),
                            demand("e", -15.0)};
    std::vector<Pipe> pipes{pipe("p1", "a", "b", 40e3, 0.6, 0.012, 0.0),
                            pipe("p2", "b", "c", 25e3, 0.5, 0.011, 0.004),
                            pipe("p3", "c", "d", 30e3, 0.45, 0.013, -0.003),
                            pipe("p4", "e", "c", 20e3, 0.4, 0.012, 0.0)};
    std::vector<Compressor> comps{{"k1", "b", "e", 1.2}};
    return Network("five", nodes, pipes, comps);
}

inline gasflow::Network five_node_flat() {
    const auto five = five_node();
    auto pipes = five.pipes();
    for (auto& p : pipes) p.sin_theta = 0.0;
    return gasflow::Network("five-flat", five.nodes(), pipes, five.compressors());
}

/// Yamal scales: L0 = 122 km, p0 = 8.8 MPa and v0 chosen so that f0 = 400 kg/s.
inline gasflow::NominalScales yamal_scales(const gasflow::EosModel& eos) {
    const double rho0 = eos.standard_density();
    return gasflow::build_scales({122e3, 400.0 / rho0, 8.8e6, rho0}, eos);
}

inline gasflow::EosModel ideal_eos() {
    return gasflow::EosModel::from_parameters({gasflow::EosKind::Ideal});
}

inline gasflow::EosModel cnga_eos() {
    return gasflow::EosModel::from_parameters({gasflow::EosKind::Cnga});
}

inline gasflow::PipeGeometry geometry(const gasflow::NominalScales& sc, const gasflow::Network& nd, std::size_t k) {
    const auto& p = nd.pipes()[k];
    return gasflow::make_pipe_geometry(sc, p.length, p.diameter, p.area, p.friction, nd.sin_theta(k));
}

}  // namespace fixtures
