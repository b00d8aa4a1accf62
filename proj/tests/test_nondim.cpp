#include <doctest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "gasflow/nondim.hpp"
#include "gasflow/synthetic.hpp"

using namespace gasflow;
using fixtures::rel_err;

namespace {

EosModel ideal() {
    return EosModel::from_parameters(EosParameters{});
}

// Yamal scales: L0 = 122 km, p0 = 8.8 MPa, v0 chosen so that f0 = 400 kg/s.
NominalScales yamal_scales(const EosModel& eos) {
    const double rho0 = eos.standard_density();
    return build_scales({122e3, 400.0 / rho0, 8.8e6, rho0}, eos);
}

}  // namespace

TEST_SUITE("nondim") {
    TEST_CASE("build_scales definitions") {
        // rho0 chosen so the ideal sound speed is 400 m/s.
        const auto eos = EosModel::ideal(1.0, 160000.0);
        const auto s = build_scales({1e5, 1.0, 5e6, 31.25}, eos);
        CHECK(s.sound_speed == doctest::Approx(400.0).epsilon(1e-15));
        CHECK(s.mass_flow == s.density * 1.0 * 1.0);
        CHECK(s.area == 1.0);
        CHECK_THROWS_AS(build_scales({0.0, 1.0, 5e6, 1.0}, eos), ConfigError);
        CHECK_THROWS_AS(build_scales({1.0, -1.0, 5e6, 1.0}, eos), ConfigError);
        CHECK_THROWS_AS(build_scales({1.0, 1.0, 0.0, 1.0}, eos), ConfigError);
        CHECK_THROWS_AS(build_scales({1.0, 1.0, 1.0, 0.0}, eos), ConfigError);
    }

    TEST_CASE("Yamal groups match direct evaluation") {
        // Frozen from M = v0/c0, Eu = p0/(rho0 c0^2), Fr = v0/sqrt(g L0), R2 = M^2/(Eu Fr^2),
        // R1 = M^2/(Eu A^2), beta = lambda L0/(2 D), evaluated independently.
        const auto eos = ideal();
        const auto s = yamal_scales(eos);
        const auto g = groups(s);
        CHECK(rel_err(s.density, 0.67730882539387338) < 1e-14);
        CHECK(rel_err(s.sound_speed, 386.82854057062542) < 1e-14);
        CHECK(rel_err(s.mass_flow, 400.0) < 1e-14);
        CHECK(rel_err(g.mach, 1.5267036628342396) < 1e-13);
        CHECK(rel_err(g.euler, 86.827824370991607) < 1e-13);
        CHECK(rel_err(g.froude, 0.53992446132094274) < 1e-13);
        CHECK(rel_err(g.r2, 0.092084083214881485) < 1e-13);
        const double d = 1.422 / 122e3;
        const double a = std::numbers::pi * 1.422 * 1.422 / 4.0;
        const auto pg = groups_for_pipe(s, a, d, 0.03);
        CHECK(rel_err(pg.r1, 0.010643205010585742) < 1e-13);
        CHECK(rel_err(pg.r2, 0.092084083214881485) < 1e-13);
        CHECK(rel_err(pg.beta, 1286.9198312236288) < 1e-13);
        CHECK(rel_err(g.r1_hat(a), pg.r1 / g.euler) < 1e-15);
        CHECK(rel_err(g.r2_hat(), g.r2 * g.euler) < 1e-15);
    }

    TEST_CASE("CNGA Yamal groups") {
        const auto eos = EosModel::from_parameters({EosKind::Cnga});
        const auto s = yamal_scales(eos);
        const auto g = groups(s);
        CHECK(rel_err(s.density, 0.68061650807546459) < 1e-14);
        CHECK(rel_err(s.sound_speed, 385.41945024866777) < 1e-13);
        CHECK(rel_err(g.euler, 87.038808741444413) < 1e-13);
        CHECK(rel_err(g.r2, 0.092533781957730321) < 1e-13);
    }

    TEST_CASE("R2 does not depend on v0 and R1 scales with v0^2") {
        const auto eos = ideal();
        const auto a = build_scales({5e4, 1.0, 6e6, 0.7}, eos);
        const auto b = build_scales({5e4, 2.0, 6e6, 0.7}, eos);
        CHECK(rel_err(groups(b).mach, 2.0 * groups(a).mach) < 1e-15);
        CHECK(rel_err(groups(b).froude, 2.0 * groups(a).froude) < 1e-15);
        CHECK(rel_err(groups(b).r2, groups(a).r2) < 1e-14);
        CHECK(rel_err(groups(b).r1(1.0), 4.0 * groups(a).r1(1.0)) < 1e-14);
    }

    TEST_CASE("pipe groups") {
        const auto s = yamal_scales(ideal());
        const auto p1 = groups_for_pipe(s, 1.0, 1e-5, 0.02);
        const auto p2 = groups_for_pipe(s, 2.0, 1e-5, 0.02);
        CHECK(rel_err(p2.r1, p1.r1 / 4.0) < 1e-15);
        CHECK(groups_for_pipe(s, 1.0, 1e-5, 0.0).beta == 0.0);
        CHECK_THROWS_AS(groups_for_pipe(s, 0.0, 1e-5, 0.02), ConfigError);
        CHECK_THROWS_AS(groups_for_pipe(s, 1.0, 0.0, 0.02), ConfigError);
    }

    TEST_CASE("groups are positive and finite") {
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> l(1e2, 1e6), v(0.1, 20.0), p(1e5, 1e7), r(0.1, 10.0);
        for (int i = 0; i < 50; ++i) {
            const auto g = groups(build_scales({l(rng), v(rng), p(rng), r(rng)}, ideal()));
            for (double x : {g.mach, g.euler, g.froude, g.r2, g.r1(0.5), g.r1_hat(0.5), g.r2_hat()}) {
                CHECK(std::isfinite(x));
                CHECK(x > 0.0);
            }
        }
    }

    TEST_CASE("default nominal values") {
        const auto net = fixtures::five_node();
        const auto eos = ideal();
        const auto in = default_nominal(net, eos);
        CHECK(in.length == 40e3);
        CHECK(in.pressure == 6e6);
        CHECK(in.velocity == 1.0);
        CHECK(in.density == eos.standard_density());
        NominalOverrides o;
        o.length = 7.0;
        o.velocity = 3.0;
        const auto in2 = default_nominal(net, eos, o);
        CHECK(in2.length == 7.0);
        CHECK(in2.velocity == 3.0);
        CHECK(in2.pressure == 6e6);
    }

    TEST_CASE("nondimensional density reduces to Eu p for the ideal law") {
        const auto eos = ideal();
        const auto s = yamal_scales(eos);
        const ScaledEos se(eos, s);
        const double eu = groups(s).euler;
        for (double p : {0.2, 1.0, 1.7}) {
            CHECK(rel_err(se.density(p), eu * p) < 1e-14);
            CHECK(rel_err(se.drho_dp(p), eu) < 1e-14);
        }
        CHECK(se.d2rho_dp2(1.0) == 0.0);
        // p = p0 maps to 1.
        const auto nd = nondimensionalize(fixtures::yamal(), s);
        CHECK(nd.nodes()[0].pressure == 1.0);
    }

    TEST_CASE("identity scales leave a network unchanged") {
        NominalScales unit;
        const auto net = fixtures::five_node();
        const auto nd = nondimensionalize(net, unit);
        CHECK(nd.units() == Units::Nondimensional);
        for (std::size_t i = 0; i < net.pipes().size(); ++i) {
            CHECK(nd.pipes()[i].length == net.pipes()[i].length);
            CHECK(nd.pipes()[i].diameter == net.pipes()[i].diameter);
            CHECK(nd.sin_theta(i) == net.sin_theta(i));
        }
        for (std::size_t i = 0; i < net.nodes().size(); ++i) {
            CHECK(nd.nodes()[i].pressure == net.nodes()[i].pressure);
            CHECK(nd.nodes()[i].injection == net.nodes()[i].injection);
        }
    }

    TEST_CASE("round trip of a random network") {
        SyntheticOptions o;
        o.nodes = 40;
        o.elevations = true;
        o.seed = 9;
        const auto net = generate_network(o);
        const auto eos = ideal();
        const auto s = build_scales(default_nominal(net, eos), eos);
        const auto back = redimensionalize(nondimensionalize(net, s), s);
        REQUIRE(back.pipes().size() == net.pipes().size());
        for (std::size_t i = 0; i < net.pipes().size(); ++i) {
            CHECK(rel_err(back.pipes()[i].length, net.pipes()[i].length) < 1e-12);
            CHECK(rel_err(back.pipes()[i].diameter, net.pipes()[i].diameter) < 1e-12);
            CHECK(rel_err(back.pipes()[i].area, net.pipes()[i].area) < 1e-12);
            CHECK(std::abs(back.sin_theta(i) - net.sin_theta(i)) < 1e-12);
        }
        for (std::size_t i = 0; i < net.nodes().size(); ++i) {
            CHECK(rel_err(back.nodes()[i].injection, net.nodes()[i].injection) < 1e-12);
            CHECK(rel_err(*back.nodes()[i].elevation, *net.nodes()[i].elevation) < 1e-12);
        }
        CHECK_THROWS_AS(redimensionalize(net, s), ConfigError);
        CHECK_THROWS_AS(nondimensionalize(nondimensionalize(net, s), s), ConfigError);
    }

    TEST_CASE("flow state round trip") {
        const auto eos = ideal();
        const auto s = yamal_scales(eos);
        FlowState st{Units::SI, {8.8e6, 7e6}, {400.0, -400.0}, {400.0}};
        const auto nd = nondimensionalize(st, s);
        CHECK(nd.pressure[0] == 1.0);
        CHECK(rel_err(nd.flow[0], 1.0) < 1e-14);
        const auto back = redimensionalize(nd, s);
        CHECK(rel_err(back.pressure[1], 7e6) < 1e-15);
        CHECK(rel_err(back.injection[1], -400.0) < 1e-15);
        CHECK_THROWS_AS(redimensionalize(st, s), ConfigError);
    }
}
