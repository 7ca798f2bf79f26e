#pragma once

#include <complex>
#include <optional>
#include <span>
#include <vector>

// Normal-incidence thin-film optics: characteristic-matrix reflectance of
// dielectric stacks, Fabry-Perot composition of two mirrors, and the 1-D
// standing-wave field used to locate resonances and the mirror penetration
// depth.
namespace spskit::optics {

// Measured at 565 nm by ellipsometry.
inline constexpr double kIndexSiO2 = 1.521;
inline constexpr double kIndexTiO2 = 2.135;
inline constexpr double kIndexMgF2 = 1.390;
// Glass substrate, from the 4.33 % bare air/glass reflectance.
inline constexpr double kIndexSubstrate = 1.5255;

struct Layer
{
    double index = 1.0;
    double thickness_nm = 0.0;
};

// Layers are ordered from the ambient side towards the substrate.
struct LayerStack
{
    double ambient_index = 1.0;
    std::vector<Layer> layers;
    double substrate_index = kIndexSubstrate;

    void validate() const;
    // Same films seen from the substrate side.
    LayerStack reversed() const;
    double total_thickness_nm() const;
};

// Which material of a quarter-wave pair sits against the substrate. The other
// one faces the ambient (the cavity gap for a mirror).
enum class Termination
{
    low_index_at_substrate,
    high_index_at_substrate,
};

LayerStack make_quarter_wave_stack(double n_high, double n_low, int pairs, double design_wavelength_nm,
                                   Termination termination = Termination::low_index_at_substrate,
                                   double ambient_index = 1.0, double substrate_index = kIndexSubstrate);

// Single quarter-wave antireflection layer on the substrate.
LayerStack make_quarter_wave_coating(double n_film, double design_wavelength_nm, double ambient_index = 1.0,
                                     double substrate_index = kIndexSubstrate);

struct SpectralSample
{
    double wavelength_nm = 0.0;
    double value = 0.0;
};

struct SpectralCurve
{
    std::vector<SpectralSample> samples;

    std::vector<double> wavelengths() const;
    std::vector<double> values() const;
};

// Complex amplitude coefficients for light incident from the ambient side.
struct Response
{
    std::complex<double> r;
    std::complex<double> t;
    double reflectance = 0.0;
    double transmittance = 0.0;
};

Response response(const LayerStack& stack, double wavelength_nm);
SpectralCurve reflectance(const LayerStack& stack, std::span<const double> wavelengths_nm);
SpectralCurve transmittance(const LayerStack& stack, std::span<const double> wavelengths_nm);

std::vector<double> wavelength_grid(double start_nm, double stop_nm, double step_nm);

struct Band
{
    double lower_nm = 0.0;
    double upper_nm = 0.0;

    double width_nm() const { return upper_nm - lower_nm; }
    // Width in optical frequency relative to the given center.
    double fractional_frequency_width(double center_nm) const;
};

// Contiguous interval around center_nm where R >= threshold. Edges are
// bracketed on a scan grid and refined by bisection. nullopt when R at the
// center is already below threshold.
std::optional<Band> stopband(const LayerStack& stack, double threshold, double center_nm,
                             double scan_step_nm = 0.05);

// A mirror is a coating seen from its ambient side, which faces the cavity
// gap. `loss` is the fraction of power removed on every reflection and
// transmission (scattering); zero means the ideal lossless coating.
struct Mirror
{
    LayerStack coating;
    double loss = 0.0;

    void validate() const;
};

// Loss that brings the mirror reflectance at wavelength_nm down to target_R.
double loss_for_reflectance(const LayerStack& coating, double wavelength_nm, double target_reflectance);

// Two-port description of a mirror at one wavelength, loss included.
struct MirrorPort
{
    std::complex<double> r_gap;        // reflection seen from the gap
    std::complex<double> t_into_gap;   // substrate -> gap amplitude transmission
    std::complex<double> t_out_of_gap; // gap -> substrate amplitude transmission
};

MirrorPort mirror_port(const Mirror& mirror, double wavelength_nm);

// Band where the cavity blocks light even off resonance: the anti-resonant
// reflectance (|ra| + |rb|)^2 / (1 + |ra||rb|)^2 stays above threshold.
std::optional<Band> cavity_stopband(const Mirror& a, const Mirror& b, double threshold, double center_nm,
                                    double scan_step_nm = 0.05);

struct Resonance
{
    double center_nm = 0.0;
    double fwhm_nm = 0.0;
    double quality_factor = 0.0;
    double peak_transmission = 0.0;
};

struct CavitySpectrum
{
    SpectralCurve transmission;
    SpectralCurve reflection;
    // Peak nearest the design wavelength; empty when no peak lies in range.
    std::optional<Resonance> resonance;
};

// Power transmission of mirror_a | gap | mirror_b, light incident from the
// substrate of mirror_a.
double cavity_transmission(const Mirror& a, double gap_nm, const Mirror& b, double wavelength_nm,
                           double gap_index = 1.0);

CavitySpectrum cavity_spectrum(const Mirror& a, double gap_nm, const Mirror& b,
                               std::span<const double> wavelengths_nm, double design_wavelength_nm,
                               double gap_index = 1.0);

// Lossless cavity flattened into one stack: substrate_a | reversed(a) | gap |
// b | substrate_b. Used for the field profile and as a second route to the
// transmission.
LayerStack cavity_as_stack(const LayerStack& a, double gap_nm, const LayerStack& b, double gap_index = 1.0);

// Peak |E|^2 of the standing wave in the gap for unit incident intensity.
double intracavity_peak_intensity(const Mirror& a, double gap_nm, const Mirror& b, double wavelength_nm,
                                  double gap_index = 1.0);

struct FieldSample
{
    double position_nm = 0.0;  // 0 at the surface of mirror a, gap spans [0, L']
    double intensity = 0.0;    // |E|^2, normalized to peak 1
};

struct FieldProfile
{
    std::vector<FieldSample> samples;
    double gap_nm = 0.0;

    // Local intensity maxima strictly inside the gap.
    int antinodes_in_gap() const;
};

FieldProfile intracavity_field(const LayerStack& a, double gap_nm, const LayerStack& b, double wavelength_nm,
                               double sample_step_nm = 0.5, double gap_index = 1.0);

struct GapSearch
{
    double lower_nm = 0.0;
    double upper_nm = 0.0;
    double tolerance_nm = 0.01;
};

// Search window for longitudinal order q. The mirrors' outer quarter-wave
// layers each hold a quarter wave of the mode, so order q has q - 1 half waves
// in the physical gap: the window is (q - 1) lambda/2 +- lambda/4.
GapSearch gap_search_window(int q, double wavelength_nm, double gap_index = 1.0);

// Physical gap L' that maximizes the peak intracavity intensity (golden
// section). Throws NumericalError when the maximum sits on a bracket edge.
double resonant_gap(const Mirror& a, const Mirror& b, int q, double wavelength_nm, double gap_index = 1.0);
double resonant_gap(const Mirror& a, const Mirror& b, double wavelength_nm, const GapSearch& search,
                    double gap_index = 1.0);

// xi = (q lambda/2 - L') / 2
double penetration_depth(int q, double wavelength_nm, double resonant_gap_nm);

}  // namespace spskit::optics
