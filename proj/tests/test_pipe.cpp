#include <doctest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "gasflow/integrals.hpp"
#include "gasflow/pipe.hpp"

using namespace gasflow;
using fixtures::rel_err;

namespace {

struct Setup {
    NominalScales scales;
    PipeGeometry geom;
    FlowModel model;
};

Setup yamal_setup(const EosModel& eos, double sin_theta, PhysicsOptions physics = {}) {
    const auto sc = fixtures::yamal_scales(eos);
    const auto nd = nondimensionalize(fixtures::yamal(sin_theta), sc);
    return {sc, fixtures::geometry(sc, nd, 0), FlowModel{ScaledEos(eos, sc), physics}};
}

// Dimensional steady momentum balance solved for dp/dx, then scaled by L0 / p0.
double dimensional_slope(const EosModel& eos, const NominalScales& sc, double p_bar, double f_bar, double sin_theta,
                         bool inertia) {
    const double d = 1.422, a = std::numbers::pi * d * d / 4.0, lambda = 0.03;
    const double p = p_bar * sc.pressure, f = f_bar * sc.mass_flow;
    const double rho = eos.density(p), drho = eos.drho_dp(p);
    const double source = rho * kGravity * sin_theta - lambda * f * std::abs(f) / (2.0 * d * a * a * rho);
    const double factor = inertia ? 1.0 - f * f * drho / (a * a * rho * rho) : 1.0;
    return source / factor * sc.length / sc.pressure;
}

ode::Options tight() {
    ode::Options o;
    o.rtol = 1e-13;
    o.atol = 1e-15;
    o.max_steps = 1000000;
    return o;
}

}  // namespace

TEST_SUITE("pipe") {
    TEST_CASE("Yamal right-hand side at p = 1, f = 1, 2 degrees") {
        // Frozen from the nondimensional formula evaluated independently.
        const auto si = yamal_setup(fixtures::ideal_eos(), fixtures::deg(2.0));
        CHECK(rel_err(rhs_G(1.0, 1.0, si.geom, si.model), 0.1213040061275155) < 1e-12);
        CHECK(rel_err(rhs_H(1.0, 1.0, si.geom, si.model), 0.3639120183825465) < 1e-12);
        const auto sc = yamal_setup(fixtures::cnga_eos(), fixtures::deg(2.0));
        CHECK(rel_err(rhs_G(1.0, 1.0, sc.geom, sc.model), 0.20901156060752354) < 1e-12);
        CHECK(rel_err(rhs_H(1.0, 1.0, sc.geom, sc.model), 0.62703468182257061) < 1e-12);
    }

    TEST_CASE("nondimensional slope equals the scaled dimensional momentum balance") {
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> up(0.3, 1.2), uf(-1.5, 1.5), us(-0.07, 0.07);
        for (const auto& eos : {fixtures::ideal_eos(), fixtures::cnga_eos()}) {
            for (bool inertia : {false, true}) {
                for (int i = 0; i < 50; ++i) {
                    const double p = up(rng), f = uf(rng), s = us(rng);
                    const auto st = yamal_setup(eos, s, {inertia, true});
                    const double g = rhs_G(p, f, st.geom, st.model);
                    CHECK(std::abs(g - dimensional_slope(eos, st.scales, p, f, s, inertia)) <
                          1e-12 * std::max(1.0, std::abs(g)));
                }
            }
        }
    }

    TEST_CASE("partial derivatives match finite differences") {
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> up(0.3, 1.2), uf(-1.5, 1.5), us(-0.07, 0.07);
        for (int i = 0; i < 100; ++i) {
            const auto& eos = i % 2 ? fixtures::cnga_eos() : fixtures::ideal_eos();
            const auto st = yamal_setup(eos, us(rng), {i % 4 < 2, true});
            const double p = up(rng), f = uf(rng), h = 1e-6;
            const auto d = rhs_G_partials(p, f, st.geom, st.model);
            const double fd_p =
                (rhs_G(p + h, f, st.geom, st.model) - rhs_G(p - h, f, st.geom, st.model)) / (2.0 * h);
            const double fd_f =
                (rhs_G(p, f + h, st.geom, st.model) - rhs_G(p, f - h, st.geom, st.model)) / (2.0 * h);
            CHECK(std::abs(d.dp - fd_p) < 1e-6 * std::max(1.0, std::abs(fd_p)));
            CHECK(std::abs(d.df - fd_f) < 1e-6 * std::max(1.0, std::abs(fd_f)));

            const double pi = p * p * p;
            const auto dh = rhs_H_partials(pi, f, st.geom, st.model);
            const double fh_p =
                (rhs_H(pi + h, f, st.geom, st.model) - rhs_H(pi - h, f, st.geom, st.model)) / (2.0 * h);
            const double fh_f =
                (rhs_H(pi, f + h, st.geom, st.model) - rhs_H(pi, f - h, st.geom, st.model)) / (2.0 * h);
            CHECK(std::abs(dh.dp - fh_p) < 1e-6 * std::max(1.0, std::abs(fh_p)));
            CHECK(std::abs(dh.df - fh_f) < 1e-6 * std::max(1.0, std::abs(fh_f)));
        }
    }

    TEST_CASE("zero flow in a horizontal pipe keeps the pressure constant") {
        const auto st = yamal_setup(fixtures::cnga_eos(), 0.0);
        const auto sol = integrate_with_sensitivities(0.9, 0.0, st.geom, st.model);
        for (double p : sol.p) CHECK(p == doctest::Approx(0.9).epsilon(1e-14));
        CHECK(sol.s_p.back() == doctest::Approx(1.0).epsilon(1e-14));
    }

    TEST_CASE("integrating two halves equals integrating the whole") {
        for (const auto& eos : {fixtures::ideal_eos(), fixtures::cnga_eos()}) {
            auto st = yamal_setup(eos, fixtures::deg(1.5));
            const double whole = integrate_pressure(1.0, 1.0, st.geom, st.model, tight()).outlet();
            auto half = st.geom;
            half.length /= 2.0;
            const double mid = integrate_pressure(1.0, 1.0, half, st.model, tight()).outlet();
            const double two = integrate_pressure(mid, 1.0, half, st.model, tight()).outlet();
            CHECK(rel_err(whole, two) < 1e-11);
        }
    }

    TEST_CASE("frictionless static column returns to its start when reversed") {
        auto st = yamal_setup(fixtures::cnga_eos(), fixtures::deg(3.0));
        const double down = integrate_pressure(0.8, 0.0, st.geom, st.model, tight()).outlet();
        CHECK(down > 0.8);
        st.geom.sin_theta = -st.geom.sin_theta;
        const double back = integrate_pressure(down, 0.0, st.geom, st.model, tight()).outlet();
        CHECK(rel_err(back, 0.8) < 1e-11);
    }

    TEST_CASE("outlet pressure increases with inlet pressure") {
        std::mt19937_64 rng(8);
        std::uniform_real_distribution<double> us(-0.07, 0.07), uf(-1.0, 1.0);
        for (int i = 0; i < 20; ++i) {
            const auto st = yamal_setup(i % 2 ? fixtures::cnga_eos() : fixtures::ideal_eos(), us(rng));
            const auto sol = integrate_with_sensitivities(1.0, uf(rng), st.geom, st.model);
            for (double s : sol.s_p) CHECK(s > 0.0);
        }
    }

    TEST_CASE("sensitivities match finite differences of the solution operator") {
        std::mt19937_64 rng(21);
        std::uniform_real_distribution<double> us(-0.07, 0.07), uf(-1.2, 1.2), up(0.8, 1.2);
        const auto opt = tight();
        const double h = 1e-5;
        for (int i = 0; i < 20; ++i) {
            const auto st = yamal_setup(i % 2 ? fixtures::cnga_eos() : fixtures::ideal_eos(), us(rng));
            const double p = up(rng), f = uf(rng);
            const auto sol = integrate_with_sensitivities(p, f, st.geom, st.model, opt);
            auto out = [&](double pp, double ff) { return integrate_pressure(pp, ff, st.geom, st.model, opt).outlet(); };
            const double fd_p = (out(p + h, f) - out(p - h, f)) / (2.0 * h);
            const double fd_f = (out(p, f + h) - out(p, f - h)) / (2.0 * h);
            CHECK(rel_err(sol.s_p.back(), fd_p) < 1e-5);
            CHECK(rel_err(sol.s_f.back(), fd_f) < 1e-5);
        }
    }

    TEST_CASE("short pipe follows the local slope") {
        auto st = yamal_setup(fixtures::ideal_eos(), fixtures::deg(1.0));
        st.geom.length = 1e-7;
        const double g = rhs_G(1.0, 0.7, st.geom, st.model);
        const double out = integrate_pressure(1.0, 0.7, st.geom, st.model).outlet();
        CHECK(std::abs(out - (1.0 + st.geom.length * g)) < 1e-14);
    }

    TEST_CASE("zero length is rejected") {
        auto st = yamal_setup(fixtures::ideal_eos(), 0.0);
        st.geom.length = 0.0;
        CHECK_THROWS_AS(check_geometry(st.geom), ConfigError);
        st.geom.length = 1.0;
        st.geom.sin_theta = 1.5;
        CHECK_THROWS_AS(check_geometry(st.geom), ConfigError);
    }

    TEST_CASE("ideal horizontal outlet zeroes the friction first integral") {
        const auto st = yamal_setup(fixtures::ideal_eos(), 0.0, {false, false});
        const auto params = ideal_case_params(st.geom, groups(st.scales).euler, st.model.physics);
        for (double f : {0.2, 0.6, 1.0}) {
            const double pl = integrate_pressure(1.0, f, st.geom, st.model).outlet();
            CHECK(std::abs(residual_case(params, 1.0, pl, f)) < 1e-8);
        }
    }

    TEST_CASE("residual derivatives") {
        const auto st = yamal_setup(fixtures::cnga_eos(), fixtures::deg(-1.0));
        const auto opt = tight();
        const double pi = 1.0, pj = 0.8, f = 0.9, h = 1e-6;
        for (auto form : {ResidualForm::Cubic, ResidualForm::Linear}) {
            const auto r = residual_F(pi, pj, f, st.geom, st.model, opt, form);
            CHECK(r.value == doctest::Approx(residual_value(pi, pj, f, st.geom, st.model, opt, form)).epsilon(1e-10));
            auto v = [&](double a, double b, double c) { return residual_value(a, b, c, st.geom, st.model, opt, form); };
            CHECK(rel_err(r.d_inlet, (v(pi + h, pj, f) - v(pi - h, pj, f)) / (2 * h)) < 1e-6);
            CHECK(rel_err(r.d_outlet, (v(pi, pj + h, f) - v(pi, pj - h, f)) / (2 * h)) < 1e-6);
            CHECK(rel_err(r.d_flow, (v(pi, pj, f + h) - v(pi, pj, f - h)) / (2 * h)) < 1e-6);
        }
        const auto cubic = residual_F(pi, pj, f, st.geom, st.model, opt, ResidualForm::Cubic);
        const double pl = integrate_pressure(pi, f, st.geom, st.model, opt).outlet();
        CHECK(std::abs(cubic.value - (pl * pl * pl - pj * pj * pj)) < 1e-12);
    }

    TEST_CASE("choked and non-physical flows raise") {
        const auto st = yamal_setup(fixtures::ideal_eos(), 0.0);
        // rho^2 = R1 f^2 rho' at p = 1 for f = sqrt(Eu / R1).
        const double f_sonic = std::sqrt(groups(st.scales).euler / st.geom.groups.r1);
        CHECK_THROWS_AS(rhs_G(1.0, 1.01 * f_sonic, st.geom, st.model), ChokedFlow);
        CHECK_THROWS_AS(integrate_pressure(1.0, 3.0, st.geom, st.model), PipeIntegrationError);
        CHECK_THROWS_AS(rhs_G(-1.0, 0.0, st.geom, st.model), NonPhysicalPressure);
        CHECK_THROWS_AS(integrate_pressure(0.0, 0.0, st.geom, st.model), NonPhysicalPressure);
        CHECK_THROWS_AS(residual_value(1.0, 0.0, 0.0, st.geom, st.model), NonPhysicalPressure);
        const FlowModel no_inertia{st.model.eos, {false, true}};
        CHECK_THROWS_AS(integrate_pressure(1.0, 5.0, st.geom, no_inertia), NonPhysicalPressure);
    }
}
