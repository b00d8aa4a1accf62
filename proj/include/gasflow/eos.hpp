#pragma once

#include <string>
#include <string_view>

namespace gasflow {

enum class EosKind { Ideal, Cnga };

std::string_view to_string(EosKind kind);
EosKind parse_eos_kind(std::string_view text);

/// Conversion factor between psi and Pa used by the CNGA correlation.
inline constexpr double kPaPerPsi = 6894.75729;

struct CngaCoefficients {
    double b1 = 1.0;
    double b2 = 0.0;  // 1/Pa
};

/// b1 = 1 + p_atm * b2, b2 = a1 10^(a2 G) / ((1.8 T)^a3 * 6894.75729).
/// Throws DomainError when an intermediate overflows or an input is non-positive.
CngaCoefficients cnga_coefficients(double temperature, double specific_gravity, double p_atm);

/// Configuration of the gas. Defaults are repository choices for pipeline natural gas.
struct EosParameters {
    EosKind kind = EosKind::Ideal;
    double temperature = 288.706;    // K
    double specific_gravity = 0.6;   // -
    double p_atm = 101350.0;         // Pa, also the standard-condition pressure
    double gas_constant = 518.3;     // J/(kg K)
};

/// Isothermal equation of state rho(p) = (b1 p + b2 p^2) / (Rg T), SI units.
/// Immutable; all members are pure.
class EosModel {
public:
    static EosModel ideal(double gas_constant, double temperature);
    static EosModel cnga(double gas_constant, double temperature, double specific_gravity, double p_atm);
    static EosModel from_parameters(const EosParameters& params);

    EosKind kind() const noexcept { return kind_; }
    double b1() const noexcept { return b1_; }
    double b2() const noexcept { return b2_; }
    double gas_constant() const noexcept { return gas_constant_; }
    double temperature() const noexcept { return temperature_; }
    double specific_gravity() const noexcept { return specific_gravity_; }
    double p_atm() const noexcept { return p_atm_; }
    EosParameters parameters() const;

    double density(double p) const;
    double drho_dp(double p) const;
    double d2rho_dp2(double p) const;
    /// Positive root of b2 p^2 + b1 p - rho Rg T = 0.
    double pressure(double rho) const;
    /// c = sqrt(dp/drho) at the given density.
    double sound_speed(double rho) const;
    /// Density at (p_atm, T).
    double standard_density() const { return density(p_atm_); }

private:
    EosModel(EosKind kind, double b1, double b2, double gas_constant, double temperature,
             double specific_gravity, double p_atm);

    EosKind kind_;
    double b1_;
    double b2_;
    double gas_constant_;
    double temperature_;
    double specific_gravity_;
    double p_atm_;
    double rgt_;
};

}  // namespace gasflow
