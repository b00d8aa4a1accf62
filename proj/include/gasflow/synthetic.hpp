#pragma once

#include <cstddef>
#include <cstdint>

#include "gasflow/network.hpp"

namespace gasflow {

/// Random test networks: a geometric spanning tree plus short chords.
/// Node 0 ("n0") is the only slack node; every other node withdraws gas.
struct SyntheticOptions {
    std::size_t nodes = 100;
    /// Chords added, as a fraction of the tree edge count.
    double chord_fraction = 0.1;
    /// Tree edges turned into compressors, oriented away from the slack node.
    std::size_t compressors = 2;
    /// Attach a smooth elevation field in [0, 3000] m; otherwise pipes are horizontal.
    bool elevations = false;
    std::uint64_t seed = 1;
    double slack_pressure = 7e6;        // Pa
    double min_withdrawal = 0.5;        // kg/s
    double max_withdrawal = 2.0;        // kg/s
    double extent = 300e3;              // m, side of the square the nodes are scattered in
    double friction = 0.01;
    /// Fraction of p_slack^2 an ideal-gas friction drop may consume along the longest
    /// root-to-leaf path; tree pipes are sized from their flows to meet it.
    double pressure_budget = 0.5;
    double gas_constant = 518.3;        // J/(kg K), used only for sizing
    double temperature = 288.706;       // K
    double min_compressor_ratio = 1.05;
    double max_compressor_ratio = 1.25;
};

/// Deterministic for a given options value. Throws ConfigError for impossible requests.
Network generate_network(const SyntheticOptions& options);

}  // namespace gasflow
