#include "spskit/emitter.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "spskit/constants.hpp"
#include "spskit/error.hpp"
#include "spskit/numeric.hpp"

namespace spskit::emitter {

namespace {

bool positive(double x) { return std::isfinite(x) && x > 0.0; }
bool non_negative(double x) { return std::isfinite(x) && x >= 0.0; }

std::vector<double> log_space(double lo, double hi, int n)
{
    std::vector<double> out(static_cast<std::size_t>(n));
    const double a = std::log10(lo);
    const double b = std::log10(hi);
    for (int i = 0; i < n; ++i) {
        out[static_cast<std::size_t>(i)] = n == 1 ? lo : std::pow(10.0, a + (b - a) * i / (n - 1));
    }
    return out;
}

}  // namespace

void EmitterPhotophysics::validate() const
{
    require(positive(zpl_wavelength_nm), "ZPL wavelength must be positive");
    require(positive(free_linewidth_nm), "free-space linewidth must be positive");
    require(positive(free_lifetime_ps), "free-space lifetime must be positive");
    require(zpl_fraction > 0.0 && zpl_fraction <= 1.0, "ZPL fraction must lie in (0, 1]");
    require(dop > 0.0 && dop <= 1.0, "degree of polarization must lie in (0, 1]");
}

double EmitterPhotophysics::emission_rate() const
{
    validate();
    return constants::rate_from_lifetime_ps(free_lifetime_ps);
}

double EmitterPhotophysics::dephasing_rate_hz() const
{
    validate();
    return constants::linewidth_nm_to_hz(free_linewidth_nm, zpl_wavelength_nm);
}

double convention_factor(RateConvention convention)
{
    return convention == RateConvention::angular ? 2.0 * std::numbers::pi : 1.0;
}

void CoupledRates::validate() const
{
    require(positive(gamma), "emission rate gamma must be positive");
    require(non_negative(gamma_star), "dephasing rate must be non-negative");
    require(non_negative(kappa), "cavity rate kappa must be non-negative");
    require(non_negative(g), "coupling g must be non-negative");
}

double CoupledRates::transfer_rate() const
{
    return 4.0 * g * g / (kappa + gamma + gamma_star);
}

PurcellEstimate effective_purcell(double wavelength_nm, double cavity_linewidth_nm, double emitter_linewidth_nm,
                                  double mode_volume_lambda3)
{
    require(positive(wavelength_nm), "wavelength must be positive");
    require(positive(cavity_linewidth_nm) && positive(emitter_linewidth_nm), "linewidths must be positive");
    require(positive(mode_volume_lambda3), "mode volume must be positive");
    PurcellEstimate out;
    out.q_eff = wavelength_nm / (cavity_linewidth_nm + emitter_linewidth_nm);
    out.purcell = 3.0 / (4.0 * std::numbers::pi * std::numbers::pi) * out.q_eff / mode_volume_lambda3;
    return out;
}

double quantum_efficiency(double lifetime_ratio, double purcell, double mirror_purcell)
{
    require(positive(lifetime_ratio), "lifetime ratio must be positive");
    require(non_negative(purcell) && non_negative(mirror_purcell), "Purcell factors must be non-negative");
    const double denom = lifetime_ratio + purcell - mirror_purcell * lifetime_ratio;
    if (!(denom > 0.0)) {
        throw ValidationError(fmt::format("quantum efficiency undefined: f + F - eps f = {} is not positive", denom));
    }
    return (lifetime_ratio - 1.0) / denom;
}

double indistinguishability_free(double gamma, double gamma_star)
{
    require(positive(gamma), "emission rate gamma must be positive");
    require(non_negative(gamma_star), "dephasing rate must be non-negative");
    return gamma / (gamma + gamma_star);
}

double indistinguishability_cavity(const CoupledRates& rates)
{
    rates.validate();
    const double r = rates.transfer_rate();
    const double sum = rates.kappa + r;
    const double filtered = sum > 0.0 ? rates.kappa * r / sum : 0.0;
    return (rates.gamma + filtered) / (rates.gamma + rates.kappa + 2.0 * r);
}

double kappa_for_target_indistinguishability(double gamma, double gamma_star, double g, double target_i,
                                             const KappaSearch& search)
{
    require(target_i > 0.0 && target_i < 1.0, "target indistinguishability must lie in (0, 1)");
    require(positive(search.lower_hz) && search.upper_hz > search.lower_hz && search.scan_points >= 2,
            "kappa search range is invalid");
    auto excess = [&](double log_kappa) {
        return indistinguishability_cavity({gamma, gamma_star, std::pow(10.0, log_kappa), g}) - target_i;
    };
    const auto grid = log_space(search.lower_hz, search.upper_hz, search.scan_points);
    double prev = std::log10(grid.front());
    double f_prev = excess(prev);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double x = std::log10(grid[i]);
        const double fx = excess(x);
        if (f_prev > 0.0 && fx <= 0.0) {
            return std::pow(10.0, numeric::bisect(excess, prev, x, 1e-12));
        }
        prev = x;
        f_prev = fx;
    }
    throw NumericalError(fmt::format("no kappa in [{:g}, {:g}] Hz where I falls through {}", search.lower_hz,
                                     search.upper_hz, target_i));
}

double coupling_from_purcell(double purcell, double kappa, double gamma)
{
    require(non_negative(purcell) && non_negative(kappa) && non_negative(gamma),
            "Purcell factor and rates must be non-negative");
    return std::sqrt(purcell * kappa * gamma) / 2.0;
}

std::vector<ConventionComparison> compare_conventions(const EmitterPhotophysics& emitter, double purcell,
                                                      double cavity_linewidth_hz, double dephasing_hz)
{
    std::vector<ConventionComparison> out;
    for (auto convention : {RateConvention::plain_frequency, RateConvention::angular}) {
        const double factor = convention_factor(convention);
        ConventionComparison c;
        c.convention = convention;
        c.rates.gamma = emitter.emission_rate();
        c.rates.gamma_star = dephasing_hz * factor;
        c.rates.kappa = cavity_linewidth_hz * factor;
        c.rates.g = coupling_from_purcell(purcell, c.rates.kappa, c.rates.gamma);
        c.indistinguishability = indistinguishability_cavity(c.rates);
        out.push_back(c);
    }
    return out;
}

double saturation_rate(double power, double saturation_power, double max_rate)
{
    require(non_negative(power), "excitation power must be non-negative");
    require(positive(saturation_power), "saturation power must be positive");
    return max_rate * power / (power + saturation_power);
}

std::vector<MapPoint> indistinguishability_map(double gamma, double gamma_star, const MapGrid& grid)
{
    require(grid.g_points >= 1 && grid.kappa_points >= 1, "map needs at least one point per axis");
    require(positive(grid.g_min_hz) && grid.g_max_hz >= grid.g_min_hz, "g range is invalid");
    require(positive(grid.kappa_min_hz) && grid.kappa_max_hz >= grid.kappa_min_hz, "kappa range is invalid");
    const auto gs = log_space(grid.g_min_hz, grid.g_max_hz, grid.g_points);
    const auto ks = log_space(grid.kappa_min_hz, grid.kappa_max_hz, grid.kappa_points);
    std::vector<MapPoint> out;
    out.reserve(gs.size() * ks.size());
    for (double g : gs) {
        for (double k : ks) {
            out.push_back({g, k, indistinguishability_cavity({gamma, gamma_star, k, g})});
        }
    }
    return out;
}

}  // namespace spskit::emitter
