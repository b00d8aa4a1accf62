#include "gasflow/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace gasflow {

namespace {

struct Point {
    double x, y;
};

double distance(const Point& a, const Point& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

// Sum of a few random plane waves, mapped into [0, 3000] m.
class ElevationField {
public:
    ElevationField(std::mt19937_64& rng, double extent) {
        std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
        std::uniform_real_distribution<double> wavelength(0.5 * extent, 2.0 * extent);
        for (int k = 0; k < 4; ++k) {
            const double a = angle(rng), w = 2.0 * std::numbers::pi / wavelength(rng);
            waves_.push_back({w * std::cos(a), w * std::sin(a), angle(rng)});
        }
    }

    double operator()(const Point& p) const {
        double s = 0.0;
        for (const auto& w : waves_) s += std::sin(w.kx * p.x + w.ky * p.y + w.phase);
        return 1500.0 + 1500.0 * s / static_cast<double>(waves_.size());
    }

private:
    struct Wave {
        double kx, ky, phase;
    };
    std::vector<Wave> waves_;
};

}  // namespace

Network generate_network(const SyntheticOptions& o) {
    if (o.nodes < 2) throw ConfigError("synthetic network needs at least 2 nodes");
    if (o.compressors > o.nodes - 1) throw ConfigError("more compressors than tree edges");
    if (o.chord_fraction < 0.0) throw ConfigError("chord fraction must be non-negative");

    std::mt19937_64 rng(o.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::size_t n = o.nodes;
    const double extent = o.extent;

    // Euclidean minimum spanning tree grown from node 0 (Prim); `order` lists nodes
    // as they join, so every parent precedes its children.
    std::vector<Point> pos(n);
    pos[0] = {0.5 * extent, 0.5 * extent};
    for (std::size_t i = 1; i < n; ++i) pos[i] = {extent * unit(rng), extent * unit(rng)};
    std::vector<std::size_t> parent(n, 0), order{0};
    std::vector<double> best(n, std::numeric_limits<double>::infinity());
    std::vector<char> joined(n, 0);
    joined[0] = 1;
    std::size_t last = 0;
    while (order.size() < n) {
        std::size_t next = 0;
        double next_d = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) {
            if (joined[i]) continue;
            const double d = distance(pos[i], pos[last]);
            if (d < best[i]) {
                best[i] = d;
                parent[i] = last;
            }
            if (best[i] < next_d) {
                next_d = best[i];
                next = i;
            }
        }
        joined[next] = 1;
        order.push_back(next);
        last = next;
    }

    std::vector<double> withdrawal(n, 0.0);
    std::uniform_real_distribution<double> q(o.min_withdrawal, o.max_withdrawal);
    for (std::size_t i = 1; i < n; ++i) withdrawal[i] = q(rng);
    std::vector<double> carried = withdrawal;  // flow on the edge parent[i] -> i
    for (std::size_t k = n - 1; k >= 1; --k) carried[parent[order[k]]] += carried[order[k]];

    auto node_id = [](std::size_t i) { return "n" + std::to_string(i); };
    auto pipe_length = [&](std::size_t a, std::size_t b) {
        // Routes run longer than the straight line.
        return std::max(1e3, distance(pos[a], pos[b]) * (1.0 + 0.2 * unit(rng)));
    };
    std::vector<double> lengths(n, 0.0), depth(n, 0.0);
    for (std::size_t k = 1; k < n; ++k) {
        const auto i = order[k];
        lengths[i] = pipe_length(parent[i], i);
        depth[i] = depth[parent[i]] + lengths[i];
    }
    // Ideal horizontal friction drop: p_i^2 - p_j^2 = 16 lambda L R T f^2 / (pi^2 D^5).
    const double slope = o.pressure_budget * o.slack_pressure * o.slack_pressure /
                         *std::max_element(depth.begin(), depth.end());
    auto size_diameter = [&](double flow) {
        const double k = 16.0 * o.friction * o.gas_constant * o.temperature * flow * flow /
                         (std::numbers::pi * std::numbers::pi * slope);
        return std::max(0.1, std::pow(k, 0.2));
    };

    // Chords join a random node to one of its nearest non-adjacent neighbours.
    std::set<std::pair<std::size_t, std::size_t>> linked;
    for (std::size_t i = 1; i < n; ++i) linked.insert(std::minmax(i, parent[i]));
    struct Chord {
        std::size_t a, b;
        double length;
    };
    std::vector<Chord> chord_list;
    const auto chords = static_cast<std::size_t>(std::lround(o.chord_fraction * static_cast<double>(n - 1)));
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (std::size_t attempt = 0; chord_list.size() < chords && attempt < 100 * (chords + 1); ++attempt) {
        const std::size_t a = pick(rng);
        std::vector<std::pair<double, std::size_t>> near;
        for (std::size_t b = 0; b < n; ++b) {
            if (b != a && !linked.count(std::minmax(a, b))) near.emplace_back(distance(pos[a], pos[b]), b);
        }
        if (near.empty()) continue;
        const std::size_t k = std::min<std::size_t>(3, near.size());
        std::partial_sort(near.begin(), near.begin() + static_cast<long>(k), near.end());
        const std::size_t b = near[std::uniform_int_distribution<std::size_t>(0, k - 1)(rng)].second;
        linked.insert(std::minmax(a, b));
        chord_list.push_back({std::min(a, b), std::max(a, b), pipe_length(a, b)});
    }
    if (chord_list.size() < chords) throw ConfigError("could not place the requested number of chords");

    // Compressors go on tree edges outside every chord cycle: a boost inside a loop
    // would have to be dissipated by a recirculating flow.
    std::vector<std::size_t> hops(n, 0);
    for (std::size_t k = 1; k < n; ++k) hops[order[k]] = hops[parent[order[k]]] + 1;
    std::vector<char> on_cycle(n, 0);  // indexed by the child end of a tree edge
    for (const auto& ch : chord_list) {
        std::size_t a = ch.a, b = ch.b;
        while (a != b) {
            auto& deeper = hops[a] >= hops[b] ? a : b;
            on_cycle[deeper] = 1;
            deeper = parent[deeper];
        }
    }
    std::vector<std::size_t> tree_edges;
    for (std::size_t i = 1; i < n; ++i)
        if (!on_cycle[i]) tree_edges.push_back(i);
    if (o.compressors > tree_edges.size()) throw ConfigError("more compressors than tree edges outside loops");
    std::shuffle(tree_edges.begin(), tree_edges.end(), rng);
    std::set<std::size_t> compressed(tree_edges.begin(), tree_edges.begin() + static_cast<long>(o.compressors));

    std::optional<ElevationField> field;
    if (o.elevations) field.emplace(rng, extent);

    std::vector<Node> nodes;
    for (std::size_t i = 0; i < n; ++i) {
        Node node;
        node.id = node_id(i);
        if (i == 0) {
            node.kind = NodeKind::Slack;
            node.pressure = o.slack_pressure;
        } else {
            node.injection = -withdrawal[i];
        }
        if (field) node.elevation = std::clamp((*field)(pos[i]), 0.0, 3000.0);
        nodes.push_back(node);
    }

    std::vector<Pipe> pipes;
    std::vector<Compressor> compressors;
    for (std::size_t i = 1; i < n; ++i) {
        if (compressed.count(i)) {
            std::uniform_real_distribution<double> ratio(o.min_compressor_ratio, o.max_compressor_ratio);
            compressors.push_back({"c" + std::to_string(i), node_id(parent[i]), node_id(i), ratio(rng)});
            continue;
        }
        Pipe p;
        p.id = "p" + std::to_string(i);
        p.from = node_id(parent[i]);
        p.to = node_id(i);
        p.length = lengths[i];
        p.diameter = size_diameter(carried[i]);
        p.friction = o.friction;
        if (!field) p.sin_theta = 0.0;
        pipes.push_back(p);
    }

    for (std::size_t k = 0; k < chord_list.size(); ++k) {
        const auto& ch = chord_list[k];
        Pipe p;
        p.id = "x" + std::to_string(k);
        p.from = node_id(ch.a);
        p.to = node_id(ch.b);
        p.length = ch.length;
        p.diameter = size_diameter(std::max(carried[ch.a], carried[ch.b]));
        p.friction = o.friction;
        if (!field) p.sin_theta = 0.0;
        pipes.push_back(p);
    }

    return Network("synthetic-" + std::to_string(n) + "-" + std::to_string(o.seed), std::move(nodes),
                   std::move(pipes), std::move(compressors));
}

}  // namespace gasflow
