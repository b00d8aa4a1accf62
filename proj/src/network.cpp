#include "gasflow/network.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "gasflow/errors.hpp"

namespace gasflow {

std::string to_string(DiagnosticCode code) {
    switch (code) {
        case DiagnosticCode::NoPipes: return "NoPipes";
        case DiagnosticCode::NoSlackNode: return "NoSlackNode";
        case DiagnosticCode::Disconnected: return "Disconnected";
        case DiagnosticCode::NonPositiveGeometry: return "NonPositiveGeometry";
        case DiagnosticCode::NonPositiveSlackPressure: return "NonPositiveSlackPressure";
        case DiagnosticCode::BadCompressorRatio: return "BadCompressorRatio";
        case DiagnosticCode::InclineOutOfRange: return "InclineOutOfRange";
        case DiagnosticCode::ParallelEdge: return "ParallelEdge";
        case DiagnosticCode::CountMismatch: return "CountMismatch";
        case DiagnosticCode::NegativeCompressorFlow: return "NegativeCompressorFlow";
        case DiagnosticCode::CollocationFallback: return "CollocationFallback";
    }
    return "Unknown";
}

Network::Network(std::string name, std::vector<Node> nodes, std::vector<Pipe> pipes,
                 std::vector<Compressor> compressors, Units units)
    : name_(std::move(name)),
      units_(units),
      nodes_(std::move(nodes)),
      pipes_(std::move(pipes)),
      compressors_(std::move(compressors)) {
    auto by_id = [](const auto& a, const auto& b) { return a.id < b.id; };
    std::sort(nodes_.begin(), nodes_.end(), by_id);
    std::sort(pipes_.begin(), pipes_.end(), by_id);
    std::sort(compressors_.begin(), compressors_.end(), by_id);

    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (!node_lookup_.emplace(nodes_[i].id, i).second) {
            throw ConfigError("duplicate node id '" + nodes_[i].id + "'");
        }
    }

    std::set<std::string> edge_ids;
    auto resolve = [&](const std::string& edge, const std::string& from, const std::string& to) {
        if (!edge_ids.insert(edge).second) {
            throw ConfigError("duplicate edge id '" + edge + "'");
        }
        auto f = node_lookup_.find(from);
        if (f == node_lookup_.end()) {
            throw ConfigError("edge '" + edge + "' references unknown node '" + from + "'");
        }
        auto t = node_lookup_.find(to);
        if (t == node_lookup_.end()) {
            throw ConfigError("edge '" + edge + "' references unknown node '" + to + "'");
        }
        if (f->second == t->second) {
            throw ConfigError("edge '" + edge + "' connects node '" + from + "' to itself");
        }
        return std::make_pair(f->second, t->second);
    };

    for (auto& pipe : pipes_) {
        pipe_ends_.push_back(resolve(pipe.id, pipe.from, pipe.to));
        if (pipe.area == 0.0 && units_ == Units::SI) {
            pipe.area = std::numbers::pi * pipe.diameter * pipe.diameter / 4.0;
        }
    }
    for (const auto& c : compressors_) {
        compressor_ends_.push_back(resolve(c.id, c.from, c.to));
    }

    // Edge slots in id order across both kinds.
    for (std::size_t i = 0; i < pipes_.size(); ++i) {
        edges_.push_back({EdgeKind::Pipe, i});
    }
    for (std::size_t i = 0; i < compressors_.size(); ++i) {
        edges_.push_back({EdgeKind::Compressor, i});
    }
    std::sort(edges_.begin(), edges_.end(),
              [this](const EdgeRef& a, const EdgeRef& b) { return edge_id_of(a) < edge_id_of(b); });
    pipe_slot_.assign(pipes_.size(), 0);
    compressor_slot_.assign(compressors_.size(), 0);
    for (std::size_t s = 0; s < edges_.size(); ++s) {
        (edges_[s].kind == EdgeKind::Pipe ? pipe_slot_ : compressor_slot_)[edges_[s].index] = s;
    }

    sin_theta_.resize(pipes_.size(), 0.0);
    for (std::size_t i = 0; i < pipes_.size(); ++i) {
        const auto& from = nodes_[pipe_ends_[i].first];
        const auto& to = nodes_[pipe_ends_[i].second];
        if (from.elevation && to.elevation && pipes_[i].length > 0.0) {
            // Gravity component along from -> to: descending pipes get a positive value.
            sin_theta_[i] = std::clamp((*from.elevation - *to.elevation) / pipes_[i].length, -1.0, 1.0);
        } else if (pipes_[i].sin_theta) {
            sin_theta_[i] = *pipes_[i].sin_theta;
        }
    }

    incidence_.resize(nodes_.size());
    for (std::size_t s = 0; s < edges_.size(); ++s) {
        incidence_[edge_from(s)].outgoing.push_back(s);
        incidence_[edge_to(s)].incoming.push_back(s);
    }
}

const std::string& Network::edge_id_of(const EdgeRef& ref) const {
    return ref.kind == EdgeKind::Pipe ? pipes_[ref.index].id : compressors_[ref.index].id;
}

std::size_t Network::node_index(const std::string& id) const {
    auto it = node_lookup_.find(id);
    if (it == node_lookup_.end()) {
        throw ConfigError("unknown node id '" + id + "'");
    }
    return it->second;
}

std::size_t Network::edge_from(std::size_t slot) const {
    const auto& e = edges_.at(slot);
    return e.kind == EdgeKind::Pipe ? pipe_ends_[e.index].first : compressor_ends_[e.index].first;
}

std::size_t Network::edge_to(std::size_t slot) const {
    const auto& e = edges_.at(slot);
    return e.kind == EdgeKind::Pipe ? pipe_ends_[e.index].second : compressor_ends_[e.index].second;
}

const std::string& Network::edge_id(std::size_t slot) const {
    return edge_id_of(edges_.at(slot));
}

std::vector<std::size_t> Network::slack_nodes() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (nodes_[i].kind == NodeKind::Slack) {
            out.push_back(i);
        }
    }
    return out;
}

std::vector<Diagnostic> validate(const Network& network) {
    std::vector<Diagnostic> out;
    auto error = [&](DiagnosticCode code, std::string entity, std::string message) {
        out.push_back({Severity::Error, code, std::move(entity), std::move(message)});
    };

    if (network.pipes().empty()) {
        error(DiagnosticCode::NoPipes, network.name(), "network has no pipes");
    }
    if (network.slack_nodes().empty()) {
        error(DiagnosticCode::NoSlackNode, network.name(), "network has no slack node");
    }
    for (const auto& node : network.nodes()) {
        if (node.kind == NodeKind::Slack && !(node.pressure > 0.0)) {
            error(DiagnosticCode::NonPositiveSlackPressure, node.id, "slack pressure must be positive");
        }
    }
    for (std::size_t i = 0; i < network.pipes().size(); ++i) {
        const auto& p = network.pipes()[i];
        if (!(p.length > 0.0) || !(p.diameter > 0.0) || !(p.area > 0.0) || !(p.friction >= 0.0)) {
            error(DiagnosticCode::NonPositiveGeometry, p.id,
                  "pipe needs length > 0, diameter > 0, area > 0 and friction >= 0");
        }
        if (p.sin_theta && std::abs(*p.sin_theta) > 1.0) {
            error(DiagnosticCode::InclineOutOfRange, p.id, "|sin_theta| must not exceed 1");
        }
    }
    for (const auto& c : network.compressors()) {
        if (!(c.ratio >= 1.0)) {
            error(DiagnosticCode::BadCompressorRatio, c.id, "compressor ratio must be >= 1");
        }
    }

    // Parallel edges are legal but worth flagging.
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (std::size_t s = 0; s < network.edges().size(); ++s) {
        auto a = network.edge_from(s);
        auto b = network.edge_to(s);
        if (!seen.insert({std::min(a, b), std::max(a, b)}).second) {
            out.push_back({Severity::Warning, DiagnosticCode::ParallelEdge, network.edge_id(s),
                           "another edge already joins these nodes"});
        }
    }

    // Connectivity of the underlying undirected graph.
    const std::size_t n = network.nodes().size();
    if (n > 0) {
        std::vector<char> visited(n, 0);
        std::vector<std::size_t> stack{0};
        visited[0] = 1;
        while (!stack.empty()) {
            auto v = stack.back();
            stack.pop_back();
            const auto& inc = network.incidence(v);
            for (auto lists : {&inc.incoming, &inc.outgoing}) {
                for (auto s : *lists) {
                    auto w = network.edge_from(s) == v ? network.edge_to(s) : network.edge_from(s);
                    if (!visited[w]) {
                        visited[w] = 1;
                        stack.push_back(w);
                    }
                }
            }
        }
        for (std::size_t v = 0; v < n; ++v) {
            if (!visited[v]) {
                error(DiagnosticCode::Disconnected, network.nodes()[v].id,
                      "node is not connected to node '" + network.nodes()[0].id + "'");
            }
        }
    }

    const auto stats = statistics(network);
    if (stats.unknowns != stats.equations) {
        std::ostringstream msg;
        msg << stats.equations << " equations for " << stats.unknowns << " unknowns";
        error(DiagnosticCode::CountMismatch, network.name(), msg.str());
    }
    return out;
}

bool has_errors(const std::vector<Diagnostic>& diagnostics) {
    return std::any_of(diagnostics.begin(), diagnostics.end(),
                       [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

void require_valid(const Network& network) {
    auto diagnostics = validate(network);
    if (!has_errors(diagnostics)) {
        return;
    }
    std::string message = "network '" + network.name() + "' is invalid:";
    for (const auto& d : diagnostics) {
        if (d.severity == Severity::Error) {
            message += "\n  " + to_string(d.code) + " (" + d.entity + "): " + d.message;
        }
    }
    throw ValidationFailed(message, std::move(diagnostics));
}

std::vector<double> nodal_injections(const Network& network, const std::vector<double>& edge_flows) {
    if (edge_flows.size() != network.edges().size()) {
        throw ConfigError("edge flow vector has wrong length");
    }
    std::vector<double> q(network.nodes().size(), 0.0);
    for (std::size_t s = 0; s < edge_flows.size(); ++s) {
        q[network.edge_from(s)] += edge_flows[s];
        q[network.edge_to(s)] -= edge_flows[s];
    }
    return q;
}

std::vector<Diagnostic> flow_diagnostics(const Network& network, const std::vector<double>& edge_flows) {
    std::vector<Diagnostic> out;
    for (std::size_t c = 0; c < network.compressors().size(); ++c) {
        if (edge_flows.at(network.compressor_slot(c)) < 0.0) {
            out.push_back({Severity::Warning, DiagnosticCode::NegativeCompressorFlow, network.compressors()[c].id,
                           "compressor carries flow against its boost direction"});
        }
    }
    return out;
}

NetworkStatistics statistics(const Network& network) {
    NetworkStatistics s;
    s.nodes = network.nodes().size();
    s.slack_nodes = network.slack_nodes().size();
    s.pipes = network.pipes().size();
    s.compressors = network.compressors().size();
    for (const auto& p : network.pipes()) {
        s.total_pipe_length += p.length;
        s.longest_pipe = std::max(s.longest_pipe, p.length);
    }
    s.unknowns = network.unknown_count();
    // One row per compressor, pipe, non-slack balance and slack pressure.
    s.equations = s.compressors + s.pipes + (s.nodes - s.slack_nodes) + s.slack_nodes;
    return s;
}

Network with_reversed_edge(const Network& network, const std::string& edge_id) {
    auto nodes = network.nodes();
    auto pipes = network.pipes();
    auto compressors = network.compressors();
    bool found = false;
    for (auto& p : pipes) {
        if (p.id == edge_id) {
            std::swap(p.from, p.to);
            if (p.sin_theta) {
                p.sin_theta = -*p.sin_theta;
            }
            found = true;
        }
    }
    for (auto& c : compressors) {
        if (c.id == edge_id) {
            throw ConfigError("compressor '" + edge_id + "' cannot be reversed without changing its ratio");
        }
    }
    if (!found) {
        throw ConfigError("unknown edge id '" + edge_id + "'");
    }
    return Network(network.name(), std::move(nodes), std::move(pipes), std::move(compressors), network.units());
}

}  // namespace gasflow
