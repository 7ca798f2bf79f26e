#pragma once

#include <cmath>
#include <numbers>

// Physical constants (CODATA 2018, exact where SI defines them) and the unit
// conversions used across the toolkit. Internally lengths are nm unless a
// name says otherwise; rates are s^-1 or Hz.
namespace spskit::constants {

inline constexpr double kSpeedOfLight = 299'792'458.0;  // m/s
inline constexpr double kPi = std::numbers::pi;

inline constexpr double kNmPerM = 1e9;
inline constexpr double kNmPerUm = 1e3;
inline constexpr double kPsPerS = 1e12;

// Linewidth conversion dnu = c * dlambda / lambda^2 (narrow-line limit).
constexpr double linewidth_nm_to_hz(double linewidth_nm, double wavelength_nm)
{
    return kSpeedOfLight * (linewidth_nm / kNmPerM) / ((wavelength_nm / kNmPerM) * (wavelength_nm / kNmPerM));
}

constexpr double linewidth_hz_to_nm(double linewidth_hz, double wavelength_nm)
{
    return linewidth_hz * (wavelength_nm / kNmPerM) * (wavelength_nm / kNmPerM) / kSpeedOfLight * kNmPerM;
}

constexpr double rate_from_lifetime_ps(double lifetime_ps) { return kPsPerS / lifetime_ps; }

inline double db_to_transmittance(double loss_db) { return std::pow(10.0, -loss_db / 10.0); }
inline double transmittance_to_db(double transmittance) { return -10.0 * std::log10(transmittance); }

}  // namespace spskit::constants
