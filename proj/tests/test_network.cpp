#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "fixtures.hpp"
#include "gasflow/network.hpp"

using namespace gasflow;
using fixtures::demand;
using fixtures::pipe;
using fixtures::slack;

namespace {

bool has_code(const std::vector<Diagnostic>& ds, DiagnosticCode code, const std::string& entity = {}) {
    return std::any_of(ds.begin(), ds.end(),
                       [&](const Diagnostic& d) { return d.code == code && (entity.empty() || d.entity == entity); });
}

}  // namespace

TEST_SUITE("network") {
    TEST_CASE("counts and slot order") {
        const auto net = fixtures::five_node();
        const auto s = statistics(net);
        CHECK(s.nodes == 5);
        CHECK(s.slack_nodes == 1);
        CHECK(s.pipes == 4);
        CHECK(s.compressors == 1);
        CHECK(s.unknowns == 10);
        CHECK(s.equations == 10);
        CHECK(s.longest_pipe == 40e3);
        CHECK(s.total_pipe_length == 115e3);
        CHECK(validate(net).empty());
        // Edges sorted by id across kinds.
        std::vector<std::string> ids;
        for (std::size_t e = 0; e < net.edges().size(); ++e) ids.push_back(net.edge_id(e));
        CHECK(ids == std::vector<std::string>{"k1", "p1", "p2", "p3", "p4"});
        CHECK(net.edges()[0].kind == EdgeKind::Compressor);
        CHECK(net.pipe_slot(0) == 1);
        CHECK(net.compressor_slot(0) == 0);
    }

    TEST_CASE("nodes are sorted by id") {
        const Network net("n", {demand("z", -1.0), slack("a", 5e6)}, {pipe("p", "a", "z", 1e3, 0.5, 0.01)}, {});
        CHECK(net.nodes()[0].id == "a");
        CHECK(net.node_index("z") == 1);
        CHECK(net.pipe_from(0) == 0);
        CHECK(net.pipe_to(0) == 1);
        CHECK_THROWS_AS(net.node_index("q"), ConfigError);
    }

    TEST_CASE("incidence lists") {
        const auto net = fixtures::five_node();
        const auto& b = net.incidence("b");
        // b receives p1 and feeds p2 and k1.
        REQUIRE(b.incoming.size() == 1);
        CHECK(net.edge_id(b.incoming[0]) == "p1");
        std::vector<std::string> out;
        for (auto s : b.outgoing) out.push_back(net.edge_id(s));
        std::sort(out.begin(), out.end());
        CHECK(out == std::vector<std::string>{"k1", "p2"});
        const auto& c = net.incidence("c");
        CHECK(c.incoming.size() == 2);
        CHECK(c.outgoing.size() == 1);
    }

    TEST_CASE("area derived from diameter") {
        const auto net = fixtures::yamal();
        CHECK(net.pipes()[0].area == doctest::Approx(std::numbers::pi * 1.422 * 1.422 / 4.0).epsilon(1e-15));
    }

    TEST_CASE("construction errors") {
        CHECK_THROWS_AS(Network("n", {slack("a", 1e6), slack("a", 1e6)}, {}, {}), ConfigError);
        CHECK_THROWS_AS(Network("n", {slack("a", 1e6)}, {pipe("p", "a", "b", 1.0, 1.0, 0.0)}, {}), ConfigError);
        CHECK_THROWS_AS(Network("n", {slack("a", 1e6)}, {pipe("p", "a", "a", 1.0, 1.0, 0.0)}, {}), ConfigError);
        CHECK_THROWS_AS(Network("n", {slack("a", 1e6), demand("b", 0.0)},
                                {pipe("p", "a", "b", 1.0, 1.0, 0.0), pipe("p", "b", "a", 1.0, 1.0, 0.0)}, {}),
                        ConfigError);
        try {
            Network("n", {slack("a", 1e6)}, {pipe("edge7", "a", "nowhere", 1.0, 1.0, 0.0)}, {});
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("edge7") != std::string::npos);
        }
    }

    TEST_CASE("missing slack node") {
        const Network net("n", {demand("a", 1.0), demand("b", -1.0)}, {pipe("p", "a", "b", 1e3, 0.5, 0.01)}, {});
        const auto ds = validate(net);
        CHECK(has_code(ds, DiagnosticCode::NoSlackNode));
        CHECK(has_errors(ds));
        CHECK_THROWS_AS(require_valid(net), ValidationFailed);
    }

    TEST_CASE("disconnected component") {
        const Network net("n", {slack("a", 5e6), demand("b", -1.0), demand("c", 0.0), demand("d", 0.0)},
                          {pipe("p", "a", "b", 1e3, 0.5, 0.01), pipe("q", "c", "d", 1e3, 0.5, 0.01)}, {});
        const auto ds = validate(net);
        CHECK(has_code(ds, DiagnosticCode::Disconnected, "c"));
        CHECK(has_code(ds, DiagnosticCode::Disconnected, "d"));
        CHECK_FALSE(has_code(ds, DiagnosticCode::Disconnected, "b"));
        try {
            require_valid(net);
            FAIL("expected ValidationFailed");
        } catch (const ValidationFailed& e) {
            CHECK(e.diagnostics().size() == ds.size());
        }
    }

    TEST_CASE("semantic errors") {
        auto bad = pipe("p", "a", "b", -1.0, 0.5, 0.01, 2.0);
        const Network net("n", {slack("a", 0.0), demand("b", -1.0)}, {bad}, {{"k", "b", "a", 0.5}});
        const auto ds = validate(net);
        CHECK(has_code(ds, DiagnosticCode::NonPositiveSlackPressure, "a"));
        CHECK(has_code(ds, DiagnosticCode::NonPositiveGeometry, "p"));
        CHECK(has_code(ds, DiagnosticCode::InclineOutOfRange, "p"));
        CHECK(has_code(ds, DiagnosticCode::BadCompressorRatio, "k"));
        const Network empty("e", {slack("a", 1e6)}, {}, {});
        CHECK(has_code(validate(empty), DiagnosticCode::NoPipes));
    }

    TEST_CASE("parallel edges only warn") {
        const Network net("n", {slack("a", 5e6), demand("b", -1.0)},
                          {pipe("p", "a", "b", 1e3, 0.5, 0.01), pipe("q", "b", "a", 1e3, 0.5, 0.01)}, {});
        const auto ds = validate(net);
        CHECK(has_code(ds, DiagnosticCode::ParallelEdge, "q"));
        CHECK_FALSE(has_errors(ds));
    }

    TEST_CASE("elevations override declared incline") {
        const Network net("n", {slack("a", 5e6, 100.0), demand("b", -1.0, 40.0)},
                          {pipe("p", "a", "b", 1e3, 0.5, 0.01, -0.9)}, {});
        CHECK(net.sin_theta(0) == doctest::Approx(0.06).epsilon(1e-14));
        const Network none("n", {slack("a", 5e6), demand("b", -1.0)}, {pipe("p", "a", "b", 1e3, 0.5, 0.01, {})}, {});
        CHECK(none.sin_theta(0) == 0.0);
    }

    TEST_CASE("slack injection closes the global balance") {
        // Yamal: a single pipe carrying 400 kg/s means the slack supplies +400.
        const auto net = fixtures::yamal();
        const auto q = nodal_injections(net, {400.0});
        CHECK(q[net.node_index("in")] == 400.0);
        CHECK(q[net.node_index("out")] == -400.0);

        const auto five = fixtures::five_node();
        const std::vector<double> flows{3.0, -7.5, 11.0, 0.25, 2.0};
        const auto q5 = nodal_injections(five, flows);
        CHECK(std::abs(std::accumulate(q5.begin(), q5.end(), 0.0)) < 1e-14);
        CHECK_THROWS_AS(nodal_injections(five, {1.0}), ConfigError);
    }

    TEST_CASE("reversing an edge") {
        const auto net = fixtures::five_node();
        const auto rev = with_reversed_edge(net, "p2");
        const auto k = rev.pipe_slot(1);
        CHECK(rev.edge_id(k) == "p2");
        CHECK(rev.edge_from(k) == net.edge_to(k));
        CHECK(rev.edge_to(k) == net.edge_from(k));
        CHECK(rev.sin_theta(1) == -net.sin_theta(1));
        CHECK_THROWS_AS(with_reversed_edge(net, "k1"), ConfigError);
        CHECK_THROWS_AS(with_reversed_edge(net, "zz"), ConfigError);
    }

    TEST_CASE("compressor flow direction warning") {
        const auto net = fixtures::five_node();
        const auto ds = flow_diagnostics(net, {-1.0, 1.0, 1.0, 1.0, 1.0});
        CHECK(has_code(ds, DiagnosticCode::NegativeCompressorFlow, "k1"));
        CHECK(flow_diagnostics(net, {1.0, 1.0, 1.0, 1.0, 1.0}).empty());
    }

    TEST_CASE("diagnostic names") {
        CHECK(to_string(DiagnosticCode::Disconnected) == "Disconnected");
        CHECK(to_string(DiagnosticCode::CollocationFallback) == "CollocationFallback");
    }
}
