#pragma once

// Gaussian-mode geometry of a plano-concave microcavity and the linear
// piezo/PDMS length tuning.
namespace spskit::cavitymode {

struct CavityConfig
{
    double radius_of_curvature_um = 2.7;
    int q = 8;
    double design_wavelength_nm = 565.85;
    double penetration_depth_nm = 122.0;
    double mirror_reflectivity = 0.992;
    double tuning_slope_nm_per_v = 102.0;
    double min_voltage_v = -5.0;
    double max_voltage_v = 5.0;
    // Add 2 xi to the geometric length q lambda/2 for FSR, linewidth and Q.
    bool include_penetration = true;

    void validate() const;
    // q lambda / 2, in nm.
    double geometric_length_nm() const;
    double effective_length_nm() const;
};

// Mode volume (pi/4) w0^2 L in units of lambda^3.
double mode_volume(const CavityConfig& config);
// Waist radius on the planar mirror, nm.
double waist_nm(const CavityConfig& config);

double finesse(double reflectivity);

struct ModeSpacing
{
    double fsr_ghz = 0.0;
    double finesse = 0.0;
    double linewidth_hz = 0.0;
    double quality_factor = 0.0;
};

ModeSpacing fsr_finesse_linewidth(const CavityConfig& config);

// FSR that a cavity with the given mirror reflectivity needs for a linewidth
// target: FSR = linewidth * finesse.
double fsr_for_linewidth_ghz(double reflectivity, double linewidth_hz);

struct Tuning
{
    double delta_length_nm = 0.0;
    double delta_wavelength_nm = 0.0;
};

Tuning tune(const CavityConfig& config, double voltage_v);

struct Lorentzian
{
    double center_nm = 0.0;
    double fwhm_nm = 0.0;
};

// Overlap integral of two area-normalized Lorentzians relative to its value at
// zero detuning. The convolution of two Lorentzians is a Lorentzian of summed
// width, so this is 1 / (1 + (2 delta / (w1 + w2))^2).
double spectral_overlap(const Lorentzian& cavity_line, const Lorentzian& emitter_line);

}  // namespace spskit::cavitymode
