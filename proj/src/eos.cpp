#include "gasflow/eos.hpp"

#include <cmath>
#include <string>

#include "gasflow/errors.hpp"

namespace gasflow {

namespace {

constexpr double kA1 = 344400.0;
constexpr double kA2 = 1.785;
constexpr double kA3 = 3.825;

void require_positive(double value, const char* name) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw DomainError(std::string(name) + " must be positive and finite, got " + std::to_string(value));
    }
}

}  // namespace

std::string_view to_string(EosKind kind) {
    return kind == EosKind::Ideal ? "ideal" : "cnga";
}

EosKind parse_eos_kind(std::string_view text) {
    if (text == "ideal") {
        return EosKind::Ideal;
    }
    if (text == "cnga") {
        return EosKind::Cnga;
    }
    throw ConfigError("unknown equation of state '" + std::string(text) + "' (expected ideal or cnga)");
}

CngaCoefficients cnga_coefficients(double temperature, double specific_gravity, double p_atm) {
    require_positive(temperature, "temperature");
    require_positive(specific_gravity, "specific_gravity");
    require_positive(p_atm, "p_atm");

    const double gravity_factor = std::pow(10.0, kA2 * specific_gravity);
    if (!std::isfinite(gravity_factor)) {
        throw DomainError("10^(a2*G) overflows for specific_gravity = " + std::to_string(specific_gravity));
    }
    const double temperature_factor = std::pow(1.8 * temperature, kA3);
    if (!std::isfinite(temperature_factor)) {
        throw DomainError("(1.8*T)^a3 overflows for temperature = " + std::to_string(temperature));
    }
    const double shared = kA1 * gravity_factor / temperature_factor;
    if (!std::isfinite(shared)) {
        throw DomainError("CNGA coefficient is not finite for specific_gravity = " +
                          std::to_string(specific_gravity) + ", temperature = " + std::to_string(temperature));
    }
    CngaCoefficients out;
    out.b2 = shared / kPaPerPsi;
    out.b1 = 1.0 + p_atm * out.b2;
    return out;
}

EosModel::EosModel(EosKind kind, double b1, double b2, double gas_constant, double temperature,
                   double specific_gravity, double p_atm)
    : kind_(kind),
      b1_(b1),
      b2_(b2),
      gas_constant_(gas_constant),
      temperature_(temperature),
      specific_gravity_(specific_gravity),
      p_atm_(p_atm),
      rgt_(gas_constant * temperature) {}

EosModel EosModel::ideal(double gas_constant, double temperature) {
    require_positive(gas_constant, "gas_constant");
    require_positive(temperature, "temperature");
    return EosModel(EosKind::Ideal, 1.0, 0.0, gas_constant, temperature, EosParameters{}.specific_gravity,
                    EosParameters{}.p_atm);
}

EosModel EosModel::cnga(double gas_constant, double temperature, double specific_gravity, double p_atm) {
    require_positive(gas_constant, "gas_constant");
    const auto coeffs = cnga_coefficients(temperature, specific_gravity, p_atm);
    return EosModel(EosKind::Cnga, coeffs.b1, coeffs.b2, gas_constant, temperature, specific_gravity, p_atm);
}

EosModel EosModel::from_parameters(const EosParameters& params) {
    if (params.kind == EosKind::Ideal) {
        require_positive(params.p_atm, "p_atm");
        require_positive(params.specific_gravity, "specific_gravity");
        EosModel model = ideal(params.gas_constant, params.temperature);
        model.specific_gravity_ = params.specific_gravity;
        model.p_atm_ = params.p_atm;
        return model;
    }
    return cnga(params.gas_constant, params.temperature, params.specific_gravity, params.p_atm);
}

EosParameters EosModel::parameters() const {
    return EosParameters{kind_, temperature_, specific_gravity_, p_atm_, gas_constant_};
}

double EosModel::density(double p) const {
    if (!(p > 0.0)) {
        throw DomainError("density requested at non-positive pressure " + std::to_string(p) + " Pa");
    }
    return (b1_ * p + b2_ * p * p) / rgt_;
}

double EosModel::drho_dp(double p) const {
    if (!(p > 0.0)) {
        throw DomainError("drho_dp requested at non-positive pressure " + std::to_string(p) + " Pa");
    }
    return (b1_ + 2.0 * b2_ * p) / rgt_;
}

double EosModel::d2rho_dp2(double p) const {
    if (!(p > 0.0)) {
        throw DomainError("d2rho_dp2 requested at non-positive pressure " + std::to_string(p) + " Pa");
    }
    return 2.0 * b2_ / rgt_;
}

double EosModel::pressure(double rho) const {
    if (!(rho > 0.0)) {
        throw DomainError("pressure requested at non-positive density " + std::to_string(rho));
    }
    const double c = rho * rgt_;
    if (b2_ == 0.0) {
        return c / b1_;
    }
    // 2c / (b1 + sqrt(b1^2 + 4 b2 c)) avoids cancellation as b2 -> 0.
    return 2.0 * c / (b1_ + std::sqrt(b1_ * b1_ + 4.0 * b2_ * c));
}

double EosModel::sound_speed(double rho) const {
    if (!(rho > 0.0)) {
        throw DomainError("sound speed requested at non-positive density " + std::to_string(rho));
    }
    if (kind_ == EosKind::Ideal) {
        return std::sqrt(rgt_);
    }
    return std::sqrt(1.0 / drho_dp(pressure(rho)));
}

}  // namespace gasflow
