#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "gasflow/errors.hpp"

namespace gasflow {

enum class NodeKind { Slack, NonSlack };

/// Unit system of the numbers stored in a Network.
enum class Units { SI, Nondimensional };

struct Node {
    std::string id;
    NodeKind kind = NodeKind::NonSlack;
    double pressure = 0.0;   // slack only: specified pressure
    double injection = 0.0;  // non-slack only: specified injection, positive supplies gas
    std::optional<double> elevation;
};

struct Pipe {
    std::string id;
    std::string from;
    std::string to;
    double length = 0.0;
    double diameter = 0.0;
    /// Cross-sectional area. Derived as pi D^2 / 4 for SI input when left at zero.
    double area = 0.0;
    double friction = 0.0;
    /// Component of the unit gravity vector along from -> to. Positive means the
    /// flow direction points downhill and gravity raises pressure along the pipe.
    std::optional<double> sin_theta;
};

struct Compressor {
    std::string id;
    std::string from;
    std::string to;
    double ratio = 1.0;
};

enum class EdgeKind { Pipe, Compressor };

/// Slot of an edge in the unknown vector; `index` points into pipes() or compressors().
struct EdgeRef {
    EdgeKind kind;
    std::size_t index;
};

struct Incidence {
    std::vector<std::size_t> incoming;  // edge slots
    std::vector<std::size_t> outgoing;
};

enum class Severity { Error, Warning };

enum class DiagnosticCode {
    NoPipes,
    NoSlackNode,
    Disconnected,
    NonPositiveGeometry,
    NonPositiveSlackPressure,
    BadCompressorRatio,
    InclineOutOfRange,
    ParallelEdge,
    CountMismatch,
    NegativeCompressorFlow,
    CollocationFallback,
};

struct Diagnostic {
    Severity severity;
    DiagnosticCode code;
    std::string entity;
    std::string message;
};

std::string to_string(DiagnosticCode code);

struct NetworkStatistics {
    std::size_t nodes = 0;
    std::size_t slack_nodes = 0;
    std::size_t pipes = 0;
    std::size_t compressors = 0;
    double total_pipe_length = 0.0;
    double longest_pipe = 0.0;
    std::size_t unknowns = 0;
    std::size_t equations = 0;
};

/// Graph of nodes, pipes and compressors. Entities are kept sorted by id, which
/// fixes the slot order of the unknown vector: nodes first, then all edges.
/// Construction resolves node references and per-pipe incline; it throws
/// ConfigError on duplicate ids or dangling references. Semantic checks are in validate().
class Network {
public:
    Network() = default;
    Network(std::string name, std::vector<Node> nodes, std::vector<Pipe> pipes,
            std::vector<Compressor> compressors, Units units = Units::SI);

    const std::string& name() const noexcept { return name_; }
    Units units() const noexcept { return units_; }

    const std::vector<Node>& nodes() const noexcept { return nodes_; }
    const std::vector<Pipe>& pipes() const noexcept { return pipes_; }
    const std::vector<Compressor>& compressors() const noexcept { return compressors_; }
    const std::vector<EdgeRef>& edges() const noexcept { return edges_; }

    std::size_t node_index(const std::string& id) const;
    std::size_t pipe_from(std::size_t pipe) const { return pipe_ends_[pipe].first; }
    std::size_t pipe_to(std::size_t pipe) const { return pipe_ends_[pipe].second; }
    std::size_t compressor_from(std::size_t c) const { return compressor_ends_[c].first; }
    std::size_t compressor_to(std::size_t c) const { return compressor_ends_[c].second; }
    std::size_t edge_from(std::size_t slot) const;
    std::size_t edge_to(std::size_t slot) const;
    const std::string& edge_id(std::size_t slot) const;
    /// Slot in edges() of a pipe / compressor index.
    std::size_t pipe_slot(std::size_t pipe) const { return pipe_slot_[pipe]; }
    std::size_t compressor_slot(std::size_t c) const { return compressor_slot_[c]; }

    /// Resolved incline of a pipe (elevations take precedence over the declared field).
    double sin_theta(std::size_t pipe) const { return sin_theta_[pipe]; }

    const Incidence& incidence(std::size_t node) const { return incidence_[node]; }
    const Incidence& incidence(const std::string& node_id) const { return incidence_[node_index(node_id)]; }

    std::vector<std::size_t> slack_nodes() const;
    std::size_t unknown_count() const { return nodes_.size() + edges_.size(); }

private:
    const std::string& edge_id_of(const EdgeRef& ref) const;

    std::string name_;
    Units units_ = Units::SI;
    std::vector<Node> nodes_;
    std::vector<Pipe> pipes_;
    std::vector<Compressor> compressors_;
    std::vector<EdgeRef> edges_;
    std::unordered_map<std::string, std::size_t> node_lookup_;
    std::vector<std::pair<std::size_t, std::size_t>> pipe_ends_;
    std::vector<std::pair<std::size_t, std::size_t>> compressor_ends_;
    std::vector<std::size_t> pipe_slot_;
    std::vector<std::size_t> compressor_slot_;
    std::vector<double> sin_theta_;
    std::vector<Incidence> incidence_;
};

class ValidationFailed : public ConfigError {
public:
    ValidationFailed(const std::string& message, std::vector<Diagnostic> diagnostics)
        : ConfigError(message), diagnostics_(std::move(diagnostics)) {}
    const std::vector<Diagnostic>& diagnostics() const noexcept { return diagnostics_; }

private:
    std::vector<Diagnostic> diagnostics_;
};

/// Throws ValidationFailed listing every error-severity diagnostic.
void require_valid(const Network& network);

/// Structural checks; an empty result (or warnings only) means the network is well posed.
std::vector<Diagnostic> validate(const Network& network);
bool has_errors(const std::vector<Diagnostic>& diagnostics);

/// q_j = sum of outgoing minus incoming edge flows at every node (injection positive).
/// `edge_flows` is indexed by edge slot.
std::vector<double> nodal_injections(const Network& network, const std::vector<double>& edge_flows);

/// Warnings for compressors carrying flow against their boost direction.
std::vector<Diagnostic> flow_diagnostics(const Network& network, const std::vector<double>& edge_flows);

NetworkStatistics statistics(const Network& network);

/// Copy of the network with edge `edge_id` declared in the opposite direction.
/// Reversing a pipe also negates its declared incline.
Network with_reversed_edge(const Network& network, const std::string& edge_id);

}  // namespace gasflow
