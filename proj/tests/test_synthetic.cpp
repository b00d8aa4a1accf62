#include <doctest.h>

#include <sstream>

#include "fixtures.hpp"
#include "gasflow/io.hpp"
#include "gasflow/synthetic.hpp"

using namespace gasflow;

TEST_SUITE("synthetic") {
    TEST_CASE("sizes follow the options") {
        for (std::size_t n : {10, 100, 1000}) {
            SyntheticOptions o;
            o.nodes = n;
            o.compressors = n / 25 + 1;
            const auto net = generate_network(o);
            const auto s = statistics(net);
            CHECK(s.nodes == n);
            CHECK(s.slack_nodes == 1);
            CHECK(s.compressors == o.compressors);
            CHECK(s.pipes + s.compressors == n - 1 + static_cast<std::size_t>(std::lround(0.1 * (n - 1))));
            CHECK_FALSE(has_errors(validate(net)));
            CHECK(net.nodes()[net.node_index("n0")].kind == NodeKind::Slack);
            for (const auto& node : net.nodes())
                if (node.kind == NodeKind::NonSlack) CHECK((node.injection >= -2.0 && node.injection <= -0.5));
            for (std::size_t k = 0; k < net.pipes().size(); ++k) {
                CHECK(net.pipes()[k].length >= 1e3);
                CHECK(net.pipes()[k].diameter >= 0.1);
                CHECK(net.sin_theta(k) == 0.0);
            }
            for (const auto& c : net.compressors()) CHECK((c.ratio >= 1.05 && c.ratio <= 1.25));
        }
    }

    TEST_CASE("same seed gives the same network") {
        SyntheticOptions o;
        o.nodes = 80;
        o.elevations = true;
        auto text = [](const Network& net) {
            std::ostringstream out;
            write_network(out, NetworkDocument{net, {}, {}, {}});
            return out.str();
        };
        CHECK(text(generate_network(o)) == text(generate_network(o)));
        auto other = o;
        other.seed = 2;
        CHECK(text(generate_network(o)) != text(generate_network(other)));
    }

    TEST_CASE("elevations stay in range and set inclines") {
        SyntheticOptions o;
        o.nodes = 300;
        o.elevations = true;
        const auto net = generate_network(o);
        bool inclined = false;
        for (const auto& node : net.nodes()) {
            REQUIRE(node.elevation.has_value());
            CHECK((*node.elevation >= 0.0 && *node.elevation <= 3000.0));
        }
        for (std::size_t k = 0; k < net.pipes().size(); ++k) {
            const auto& p = net.pipes()[k];
            const double dz = *net.nodes()[net.pipe_from(k)].elevation - *net.nodes()[net.pipe_to(k)].elevation;
            CHECK(net.sin_theta(k) == doctest::Approx(dz / p.length).epsilon(1e-14));
            inclined = inclined || net.sin_theta(k) != 0.0;
        }
        CHECK(inclined);
    }

    TEST_CASE("generated networks solve") {
        for (bool elevations : {false, true}) {
            SyntheticOptions o;
            o.nodes = 50;
            o.compressors = 3;
            o.elevations = elevations;
            o.seed = 5;
            const auto res = solve_network(generate_network(o), fixtures::cnga_eos());
            CHECK(res.report.converged);
            for (double p : res.solution.pressure) CHECK(p > 0.0);
        }
    }

    TEST_CASE("impossible requests") {
        SyntheticOptions o;
        o.nodes = 1;
        CHECK_THROWS_AS(generate_network(o), ConfigError);
        o.nodes = 5;
        o.compressors = 5;
        CHECK_THROWS_AS(generate_network(o), ConfigError);
        o.compressors = 0;
        o.chord_fraction = -1.0;
        CHECK_THROWS_AS(generate_network(o), ConfigError);
    }
}
