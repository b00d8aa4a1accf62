#pragma once

#include <optional>
#include <vector>

#include "gasflow/eos.hpp"
#include "gasflow/network.hpp"

namespace gasflow {

inline constexpr double kGravity = 9.80665;  // m/s^2

/// Nominal values used to scale lengths, velocities, pressures and densities.
struct NominalInputs {
    double length = 0.0;    // m
    double velocity = 0.0;  // m/s
    double pressure = 0.0;  // Pa
    double density = 0.0;   // kg/m^3
};

/// Optional overrides read from a network file; unset fields fall back to defaults.
struct NominalOverrides {
    std::optional<double> length;
    std::optional<double> velocity;
    std::optional<double> pressure;
    std::optional<double> density;
};

struct NominalScales {
    double length = 1.0;    // L0
    double velocity = 1.0;  // v0
    double pressure = 1.0;  // p0
    double density = 1.0;   // rho0
    double sound_speed = 1.0;  // c0 = c(rho0)
    double area = 1.0;      // A0, fixed at 1 m^2
    double mass_flow = 1.0;  // f0 = rho0 v0 A0
    double gravity = kGravity;
};

struct DimensionlessGroups {
    double mach = 0.0;
    double euler = 0.0;
    double froude = 0.0;
    double r2 = 0.0;

    double r1(double area) const { return mach * mach / (euler * area * area); }
    double r1_hat(double area) const { return r1(area) / euler; }
    double r2_hat() const { return r2 * euler; }
};

struct PipeGroups {
    double r1 = 0.0;
    double r2 = 0.0;
    double beta = 0.0;
};

NominalScales build_scales(const NominalInputs& inputs, const EosModel& model);

/// L0 = longest pipe, p0 = first slack pressure, rho0 = standard density, v0 = 1 m/s,
/// each replaced by the corresponding override when present.
NominalInputs default_nominal(const Network& network, const EosModel& model,
                              const NominalOverrides& overrides = {});

DimensionlessGroups groups(const NominalScales& scales);

/// R1 = M^2 / (Eu A^2), R2 = M^2 / (Eu Fr^2), beta = lambda / (2 D), all nondimensional inputs.
PipeGroups groups_for_pipe(const NominalScales& scales, double area, double diameter, double friction);

/// EoS in nondimensional variables: rho_bar(p_bar) = rho(p0 p_bar) / rho0.
class ScaledEos {
public:
    ScaledEos(EosModel model, double p0, double rho0) : model_(std::move(model)), p0_(p0), rho0_(rho0) {}
    ScaledEos(EosModel model, const NominalScales& scales)
        : ScaledEos(std::move(model), scales.pressure, scales.density) {}

    double density(double p) const { return model_.density(p0_ * p) / rho0_; }
    double drho_dp(double p) const { return model_.drho_dp(p0_ * p) * p0_ / rho0_; }
    double d2rho_dp2(double p) const { return model_.d2rho_dp2(p0_ * p) * p0_ * p0_ / rho0_; }

    const EosModel& model() const noexcept { return model_; }
    double p0() const noexcept { return p0_; }
    double rho0() const noexcept { return rho0_; }

private:
    EosModel model_;
    double p0_;
    double rho0_;
};

/// Values attached to a network solve: nodal pressure and injection, edge flow.
struct FlowState {
    Units units = Units::SI;
    std::vector<double> pressure;   // per node
    std::vector<double> injection;  // per node
    std::vector<double> flow;       // per edge slot
};

Network nondimensionalize(const Network& network, const NominalScales& scales);
Network redimensionalize(const Network& network, const NominalScales& scales);
FlowState nondimensionalize(const FlowState& state, const NominalScales& scales);
FlowState redimensionalize(const FlowState& state, const NominalScales& scales);

}  // namespace gasflow
