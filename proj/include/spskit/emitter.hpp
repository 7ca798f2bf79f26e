#pragma once

#include <vector>

// Weak-coupling cavity QED for a single broadband emitter: effective Purcell
// factor, quantum efficiency, two-photon indistinguishability and saturation.
namespace spskit::emitter {

struct EmitterPhotophysics
{
    double zpl_wavelength_nm = 565.85;
    double free_linewidth_nm = 5.76;
    double free_lifetime_ps = 897.0;
    double zpl_fraction = 0.632;
    double dop = 0.904;

    void validate() const;
    // gamma = 1 / tau, s^-1.
    double emission_rate() const;
    // Free-space FWHM converted to Hz.
    double dephasing_rate_hz() const;
};

// How linewidths map onto the rates in the indistinguishability formulas.
// plain_frequency: rates are FWHM in Hz. angular: FWHM multiplied by 2 pi.
// The emission rate 1/tau is the same in both.
enum class RateConvention
{
    plain_frequency,
    angular,
};

double convention_factor(RateConvention convention);

struct CoupledRates
{
    double gamma = 0.0;
    double gamma_star = 0.0;
    double kappa = 0.0;
    double g = 0.0;

    void validate() const;
    // R = 4 g^2 / (kappa + gamma + gamma*)
    double transfer_rate() const;
};

struct PurcellEstimate
{
    double q_eff = 0.0;
    double purcell = 0.0;
};

// Q_eff = lambda / (dlambda_cav + dlambda_em), F = 3 Q_eff / (4 pi^2 V), V in
// lambda^3.
PurcellEstimate effective_purcell(double wavelength_nm, double cavity_linewidth_nm, double emitter_linewidth_nm,
                                  double mode_volume_lambda3);

// eta = (f - 1) / (f + F - eps f); f is the free/cavity lifetime ratio, eps
// the Purcell factor of the bare mirror.
double quantum_efficiency(double lifetime_ratio, double purcell, double mirror_purcell);

double indistinguishability_free(double gamma, double gamma_star);
double indistinguishability_cavity(const CoupledRates& rates);

struct KappaSearch
{
    double lower_hz = 1.0;
    double upper_hz = 1e16;
    int scan_points = 400;
};

// Smallest kappa at which I(kappa) falls through target_I, found by bisection
// in log kappa after a log-spaced scan for the first sign change.
double kappa_for_target_indistinguishability(double gamma, double gamma_star, double g, double target_i,
                                             const KappaSearch& search = {});

// F = 4 g^2 / (kappa gamma)  ->  g = sqrt(F kappa gamma) / 2
double coupling_from_purcell(double purcell, double kappa, double gamma);

struct ConventionComparison
{
    RateConvention convention = RateConvention::plain_frequency;
    CoupledRates rates;
    double indistinguishability = 0.0;
};

// Cavity indistinguishability for a Purcell factor and cavity linewidth,
// evaluated once per rate convention.
std::vector<ConventionComparison> compare_conventions(const EmitterPhotophysics& emitter, double purcell,
                                                      double cavity_linewidth_hz, double dephasing_hz);

double saturation_rate(double power, double saturation_power, double max_rate);

struct MapPoint
{
    double g_hz = 0.0;
    double kappa_hz = 0.0;
    double indistinguishability = 0.0;
};

struct MapGrid
{
    double g_min_hz = 1e6;
    double g_max_hz = 1e12;
    double kappa_min_hz = 1e6;
    double kappa_max_hz = 1e12;
    int g_points = 200;
    int kappa_points = 200;
};

// Log-spaced (g, kappa) grid, g-major order.
std::vector<MapPoint> indistinguishability_map(double gamma, double gamma_star, const MapGrid& grid = {});

}  // namespace spskit::emitter
