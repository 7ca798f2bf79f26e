#pragma once

#include <optional>
#include <string>
#include <vector>

// Fitting of measured photophysics data: spectra, lifetime decays, g2(tau)
// correlations, polarization scans, saturation curves.
namespace spskit::specfit {

enum class SeriesKind
{
    spectrum,
    decay,
    correlation,
    polarization,
    saturation,
};

std::string to_string(SeriesKind kind);
SeriesKind series_kind_from_string(const std::string& name);

struct MeasurementSeries
{
    SeriesKind kind = SeriesKind::spectrum;
    std::vector<double> x;
    std::vector<double> y;

    // x strictly increasing, equal lengths, finite values.
    void validate() const;
};

struct Parameter
{
    std::string name;
    double value = 0.0;
    double uncertainty = 0.0;
};

struct FitReport
{
    std::vector<Parameter> parameters;
    double chi_squared = 0.0;
    double reduced_chi_squared = 0.0;
    double residual_norm = 0.0;
    int iterations = 0;
    std::vector<std::string> warnings;

    const Parameter& at(const std::string& name) const;
};

// Normalized sinc^2 instrument line of an interferometer with finite scan.
// first_zero_nm is the distance from the line center to the first zero.
struct Sinc2Instrument
{
    double first_zero_nm = 0.0;
};

// First zero of the sinc^2 line for a triangularly apodized scan of maximum
// optical path difference opd_mm: lambda^2 / OPD.
Sinc2Instrument sinc2_from_scan_range(double opd_mm, double wavelength_nm);

// Peak-normalized Lorentzian (value 1 at the center) convolved with the
// unit-area sinc^2 kernel, evaluated at detuning x - center.
double lorentzian_sinc2(double detuning_nm, double fwhm_nm, const Sinc2Instrument& instrument);

struct LorentzianFit
{
    double center_nm = 0.0;
    double fwhm_nm = 0.0;
    double amplitude = 0.0;  // peak height above offset, before the instrument
    double offset = 0.0;
    FitReport report;

    double evaluate(double x_nm, const std::optional<Sinc2Instrument>& instrument = std::nullopt) const;
};

LorentzianFit fit_lorentzian(const MeasurementSeries& spectrum,
                             const std::optional<Sinc2Instrument>& instrument = std::nullopt);

struct DecayFit
{
    double lifetime_ps = 0.0;
    double amplitude = 0.0;
    FitReport report;
};

// A exp(-t/tau) starting at each IRF sample, weighted by the unit-sum IRF.
// Count data: Poisson weights 1 / max(y, 1). The IRF is linearly
// interpolated onto the decay grid when the grids differ; the decay grid
// must be uniform.
DecayFit fit_decay_with_irf(const MeasurementSeries& decay, const MeasurementSeries& irf);

// Model values A sum_j w_j exp(-(t_i - t_j)/tau) on a uniform grid.
std::vector<double> convolved_decay(const std::vector<double>& irf_weights, double step, double lifetime,
                                    double amplitude);

enum class G2Model
{
    automatic,
    antibunching,
    bunching,
};

struct G2Options
{
    G2Model model = G2Model::automatic;
    // Fraction of the largest |tau| beyond which points count as tails.
    double tail_fraction = 0.75;
    int min_tail_points = 4;
    // Largest tolerated departure of the fitted curve from 1 at the tails.
    double tail_tolerance = 0.05;
};

struct G2Fit
{
    double a = 0.0;
    double b = 0.0;
    double t1_ps = 0.0;
    double t2_ps = 0.0;
    double g2_0 = 0.0;
    double g2_0_uncertainty = 0.0;
    double normalization = 1.0;  // raw coincidences at g2 = 1
    bool bunching = false;
    FitReport report;

    // Normalized model 1 - A exp(-|tau|/t1) + B exp(-|tau|/t2).
    double evaluate(double tau_ps) const;
};

G2Fit fit_g2(const MeasurementSeries& correlation, const G2Options& options = {});

// rho = snr / (snr + 1); g2_c = (g2 - (1 - rho^2)) / rho^2.
double correct_g2_background(double g2, double snr);

struct PolarizationFit
{
    double dop = 0.0;
    double dop_uncertainty = 0.0;
    double axis_deg = 0.0;
    double a = 0.0;  // a cos^2(theta - theta0) + b
    double b = 0.0;
    bool flat = false;
    FitReport report;
};

// Linear least squares in (1, cos 2 theta, sin 2 theta); theta in degrees.
PolarizationFit fit_polarization(const MeasurementSeries& scan);

struct ZplOptions
{
    // Integration band; lower bound defaults to the first sample.
    std::optional<double> lower_nm;
    double upper_nm = 580.0;
    // ZPL area is the fitted line integrated over center +- window * FWHM.
    double window_fwhm = 10.0;
};

double zpl_fraction(const MeasurementSeries& spectrum, const LorentzianFit& zpl, const ZplOptions& options = {});

struct SaturationFit
{
    double saturation_power = 0.0;
    double max_rate = 0.0;
    FitReport report;
};

SaturationFit fit_saturation(const MeasurementSeries& series);

// Parenthetical notation: 897(8), 5.76(34), 0.051(23). Uncertainties whose
// leading digit is 1-3 keep two significant digits, otherwise one.
std::string format_with_uncertainty(double value, double uncertainty);

}  // namespace spskit::specfit
