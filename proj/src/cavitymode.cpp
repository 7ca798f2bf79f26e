#include "spskit/cavitymode.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "spskit/constants.hpp"
#include "spskit/error.hpp"

namespace spskit::cavitymode {

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

void CavityConfig::validate() const
{
    require(q >= 1, fmt::format("longitudinal order q must be >= 1, got {}", q));
    require(std::isfinite(design_wavelength_nm) && design_wavelength_nm > 0.0,
            "design wavelength must be positive");
    require(std::isfinite(radius_of_curvature_um) && radius_of_curvature_um > 0.0,
            "radius of curvature must be positive");
    require(std::isfinite(penetration_depth_nm) && penetration_depth_nm >= 0.0,
            "penetration depth must be non-negative");
    require(mirror_reflectivity > 0.0 && mirror_reflectivity < 1.0,
            fmt::format("mirror reflectivity must lie in (0, 1), got {}", mirror_reflectivity));
    require(tuning_slope_nm_per_v > 0.0, "tuning slope must be positive");
    require(min_voltage_v <= max_voltage_v, "voltage range is empty");
    const double rc_nm = radius_of_curvature_um * constants::kNmPerUm;
    require(geometric_length_nm() < rc_nm,
            fmt::format("unstable cavity: length {:.1f} nm is not shorter than the radius of curvature {:.1f} nm",
                        geometric_length_nm(), rc_nm));
}

double CavityConfig::geometric_length_nm() const
{
    return q * design_wavelength_nm / 2.0;
}

double CavityConfig::effective_length_nm() const
{
    return geometric_length_nm() + (include_penetration ? 2.0 * penetration_depth_nm : 0.0);
}

double waist_nm(const CavityConfig& config)
{
    config.validate();
    const double lambda = config.design_wavelength_nm;
    const double length = config.geometric_length_nm();
    const double rc = config.radius_of_curvature_um * constants::kNmPerUm;
    return std::sqrt(lambda / kPi * std::sqrt(length * (rc - length)));
}

double mode_volume(const CavityConfig& config)
{
    const double w0 = waist_nm(config);
    const double lambda = config.design_wavelength_nm;
    const double volume = kPi / 4.0 * w0 * w0 * config.geometric_length_nm();
    return volume / (lambda * lambda * lambda);
}

double finesse(double reflectivity)
{
    require(std::isfinite(reflectivity) && reflectivity >= 0.0, "reflectivity must be non-negative");
    if (reflectivity >= 1.0) {
        throw ValidationError("reflectivity of 1 gives infinite finesse");
    }
    return kPi * std::sqrt(reflectivity) / (1.0 - reflectivity);
}

ModeSpacing fsr_finesse_linewidth(const CavityConfig& config)
{
    config.validate();
    ModeSpacing out;
    const double length_m = config.effective_length_nm() / constants::kNmPerM;
    const double fsr_hz = constants::kSpeedOfLight / (2.0 * length_m);
    out.fsr_ghz = fsr_hz * 1e-9;
    out.finesse = finesse(config.mirror_reflectivity);
    out.linewidth_hz = fsr_hz / out.finesse;
    out.quality_factor = out.finesse * 2.0 * config.effective_length_nm() / config.design_wavelength_nm;
    return out;
}

double fsr_for_linewidth_ghz(double reflectivity, double linewidth_hz)
{
    require(linewidth_hz > 0.0, "linewidth must be positive");
    return linewidth_hz * finesse(reflectivity) * 1e-9;
}

Tuning tune(const CavityConfig& config, double voltage_v)
{
    config.validate();
    require(std::isfinite(voltage_v) && voltage_v >= config.min_voltage_v && voltage_v <= config.max_voltage_v,
            fmt::format("voltage {} V outside the safe range [{}, {}] V", voltage_v, config.min_voltage_v,
                        config.max_voltage_v));
    Tuning out;
    out.delta_length_nm = config.tuning_slope_nm_per_v * voltage_v;
    out.delta_wavelength_nm = 2.0 * out.delta_length_nm / config.q;
    return out;
}

double spectral_overlap(const Lorentzian& cavity_line, const Lorentzian& emitter_line)
{
    require(cavity_line.fwhm_nm > 0.0 && emitter_line.fwhm_nm > 0.0, "line widths must be positive");
    require(std::isfinite(cavity_line.center_nm) && std::isfinite(emitter_line.center_nm),
            "line centers must be finite");
    const double x = 2.0 * (cavity_line.center_nm - emitter_line.center_nm) /
                     (cavity_line.fwhm_nm + emitter_line.fwhm_nm);
    return 1.0 / (1.0 + x * x);
}

}  // namespace spskit::cavitymode
