#include "spskit/specfit.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <numeric>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "spskit/error.hpp"
#include "spskit/levenberg_marquardt.hpp"

namespace spskit::specfit {

namespace {

using Eigen::VectorXd;

FitReport make_report(const fit::LmResult& lm, const std::vector<std::string>& names)
{
    FitReport out;
    for (std::size_t i = 0; i < names.size(); ++i) {
        const auto k = static_cast<Eigen::Index>(i);
        out.parameters.push_back({names[i], lm.parameters[k], lm.standard_errors[k]});
    }
    out.chi_squared = lm.chi_squared;
    out.reduced_chi_squared = lm.reduced_chi_squared;
    out.residual_norm = std::sqrt(lm.chi_squared);
    out.iterations = lm.iterations;
    return out;
}

VectorXd vec(std::initializer_list<double> values)
{
    VectorXd v(static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (double x : values) {
        v[i++] = x;
    }
    return v;
}

// Width at half of (peak - floor), linearly interpolated on both flanks.
double half_max_width(const std::vector<double>& x, const std::vector<double>& y, std::size_t peak, double floor)
{
    const double half = floor + 0.5 * (y[peak] - floor);
    double left = x.front();
    for (std::size_t i = peak; i > 0; --i) {
        if (y[i - 1] < half) {
            left = x[i - 1] + (half - y[i - 1]) / (y[i] - y[i - 1]) * (x[i] - x[i - 1]);
            break;
        }
    }
    double right = x.back();
    for (std::size_t i = peak; i + 1 < x.size(); ++i) {
        if (y[i + 1] < half) {
            right = x[i] + (y[i] - half) / (y[i] - y[i + 1]) * (x[i + 1] - x[i]);
            break;
        }
    }
    return std::max(right - left, 1e-9);
}

bool uniform_grid(const std::vector<double>& x)
{
    if (x.size() < 2) {
        return false;
    }
    const double step = (x.back() - x.front()) / static_cast<double>(x.size() - 1);
    for (std::size_t i = 1; i < x.size(); ++i) {
        if (std::abs(x[i] - x[i - 1] - step) > 1e-6 * step) {
            return false;
        }
    }
    return true;
}

double interpolate(const std::vector<double>& x, const std::vector<double>& y, double at)
{
    if (at < x.front() || at > x.back()) {
        return 0.0;
    }
    const auto it = std::upper_bound(x.begin(), x.end(), at);
    if (it == x.end()) {
        return y.back();
    }
    const auto i = static_cast<std::size_t>(it - x.begin());
    const double f = (at - x[i - 1]) / (x[i] - x[i - 1]);
    return y[i - 1] + f * (y[i] - y[i - 1]);
}

}  // namespace

std::string to_string(SeriesKind kind)
{
    switch (kind) {
    case SeriesKind::spectrum: return "spectrum";
    case SeriesKind::decay: return "decay";
    case SeriesKind::correlation: return "correlation";
    case SeriesKind::polarization: return "polarization";
    case SeriesKind::saturation: return "saturation";
    }
    return "unknown";
}

SeriesKind series_kind_from_string(const std::string& name)
{
    for (auto k : {SeriesKind::spectrum, SeriesKind::decay, SeriesKind::correlation, SeriesKind::polarization,
                   SeriesKind::saturation}) {
        if (to_string(k) == name) {
            return k;
        }
    }
    throw ValidationError(fmt::format("unknown series kind '{}'", name));
}

void MeasurementSeries::validate() const
{
    require(x.size() == y.size(), fmt::format("series lengths differ: {} x values, {} y values", x.size(), y.size()));
    require(!x.empty(), "series is empty");
    for (std::size_t i = 0; i < x.size(); ++i) {
        require(std::isfinite(x[i]) && std::isfinite(y[i]), fmt::format("non-finite value at row {}", i));
        if (i > 0) {
            require(x[i] > x[i - 1], fmt::format("x not strictly increasing at row {}", i));
        }
    }
}

const Parameter& FitReport::at(const std::string& name) const
{
    for (const auto& p : parameters) {
        if (p.name == name) {
            return p;
        }
    }
    throw ValidationError(fmt::format("fit report has no parameter '{}'", name));
}

Sinc2Instrument sinc2_from_scan_range(double opd_mm, double wavelength_nm)
{
    require(opd_mm > 0.0 && wavelength_nm > 0.0, "scan range and wavelength must be positive");
    return {wavelength_nm * wavelength_nm / (opd_mm * 1e6)};
}

double lorentzian_sinc2(double detuning_nm, double fwhm_nm, const Sinc2Instrument& instrument)
{
    const double a = fwhm_nm / 2.0;
    if (instrument.first_zero_nm <= 0.0) {
        return a * a / (a * a + detuning_nm * detuning_nm);
    }
    // Lorentzian spectrum a pi exp(-a|w|) times the triangular transform of
    // the sinc^2 kernel, cut off at 2 pi / W.
    const double cutoff = 2.0 * std::numbers::pi / instrument.first_zero_nm;
    const std::complex<double> s(a, -detuning_nm);
    const std::complex<double> z = s * cutoff;
    std::complex<double> value;
    if (std::abs(z) < 1e-3) {
        value = cutoff * (0.5 - z / 6.0 + z * z / 24.0 - z * z * z / 120.0);
    } else {
        value = 1.0 / s - (1.0 - std::exp(-z)) / (s * s * cutoff);
    }
    return a * value.real();
}

double LorentzianFit::evaluate(double x_nm, const std::optional<Sinc2Instrument>& instrument) const
{
    return offset + amplitude * lorentzian_sinc2(x_nm - center_nm, fwhm_nm, instrument.value_or(Sinc2Instrument{}));
}

LorentzianFit fit_lorentzian(const MeasurementSeries& spectrum, const std::optional<Sinc2Instrument>& instrument)
{
    spectrum.validate();
    require(spectrum.x.size() >= 8, fmt::format("Lorentzian fit needs at least 8 samples, got {}", spectrum.x.size()));
    const auto& x = spectrum.x;
    const auto& y = spectrum.y;
    const Sinc2Instrument inst = instrument.value_or(Sinc2Instrument{});
    require(inst.first_zero_nm >= 0.0, "instrument width must be non-negative");

    const auto peak = static_cast<std::size_t>(std::max_element(y.begin(), y.end()) - y.begin());
    require(peak > 0 && peak + 1 < x.size(), "spectrum does not span the peak");
    const double floor = *std::min_element(y.begin(), y.end());
    const double span = x.back() - x.front();
    const double w0 = half_max_width(x, y, peak, floor);
    const double amp0 = (y[peak] - floor) / std::max(lorentzian_sinc2(0.0, w0, inst), 1e-6);

    auto residual = [&](const VectorXd& p) {
        VectorXd r(static_cast<Eigen::Index>(x.size()));
        for (std::size_t i = 0; i < x.size(); ++i) {
            r[static_cast<Eigen::Index>(i)] = p[3] + p[2] * lorentzian_sinc2(x[i] - p[0], p[1], inst) - y[i];
        }
        return r;
    };
    fit::LmOptions opt;
    opt.lower = vec({x.front(), 1e-6 * span, 0.0, -std::numeric_limits<double>::infinity()});
    opt.upper = vec({x.back(), 10.0 * span, std::numeric_limits<double>::infinity(),
                     std::numeric_limits<double>::infinity()});
    const auto lm = fit::levenberg_marquardt(residual, vec({x[peak], w0, amp0, floor}), opt);

    LorentzianFit out;
    out.center_nm = lm.parameters[0];
    out.fwhm_nm = lm.parameters[1];
    out.amplitude = lm.parameters[2];
    out.offset = lm.parameters[3];
    out.report = make_report(lm, {"center_nm", "fwhm_nm", "amplitude", "offset"});
    return out;
}

std::vector<double> convolved_decay(const std::vector<double>& irf_weights, double step, double lifetime,
                                    double amplitude)
{
    const double decay = std::exp(-step / lifetime);
    std::vector<double> out(irf_weights.size());
    double s = 0.0;
    for (std::size_t i = 0; i < irf_weights.size(); ++i) {
        s = s * decay + irf_weights[i];
        out[i] = amplitude * s;
    }
    return out;
}

DecayFit fit_decay_with_irf(const MeasurementSeries& decay, const MeasurementSeries& irf)
{
    decay.validate();
    irf.validate();
    require(uniform_grid(decay.x), "decay must be sampled on a uniform time grid");
    const auto& t = decay.x;
    const auto& y = decay.y;
    const std::size_t n = t.size();
    const double step = t[1] - t[0];

    std::vector<double> w(n);
    const bool same_grid = irf.x.size() == n &&
                           std::equal(irf.x.begin(), irf.x.end(), t.begin(),
                                      [&](double a, double b) { return std::abs(a - b) <= 1e-9 * step; });
    for (std::size_t i = 0; i < n; ++i) {
        w[i] = std::max(0.0, same_grid ? irf.y[i] : interpolate(irf.x, irf.y, t[i]));
    }
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    require(total > 0.0, "instrument response is zero on the decay grid");
    for (double& v : w) {
        v /= total;
    }

    std::vector<double> sigma(n);
    for (std::size_t i = 0; i < n; ++i) {
        sigma[i] = std::sqrt(std::max(y[i], 1.0));
    }

    const auto peak = static_cast<std::size_t>(std::max_element(y.begin(), y.end()) - y.begin());
    double tail = 0.0;
    for (std::size_t i = peak + 1; i < n; ++i) {
        tail += y[i] * step;
    }
    const double tau0 = std::max(tail / std::max(y[peak], 1e-300), 2.0 * step);
    const auto shape0 = convolved_decay(w, step, tau0, 1.0);
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        num += y[i] * shape0[i];
        den += shape0[i] * shape0[i];
    }
    const double amp0 = den > 0.0 ? num / den : 1.0;

    auto residual = [&](const VectorXd& p) {
        const auto model = convolved_decay(w, step, p[1], p[0]);
        VectorXd r(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i) {
            r[static_cast<Eigen::Index>(i)] = (model[i] - y[i]) / sigma[i];
        }
        return r;
    };
    auto jacobian = [&](const VectorXd& p) {
        const double amp = p[0];
        const double tau = p[1];
        const double decay_step = std::exp(-step / tau);
        Eigen::MatrixXd jac(static_cast<Eigen::Index>(n), 2);
        double s = 0.0;
        double ds = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            ds = decay_step * (ds + s * step / (tau * tau));
            s = s * decay_step + w[i];
            const auto k = static_cast<Eigen::Index>(i);
            jac(k, 0) = s / sigma[i];
            jac(k, 1) = amp * ds / sigma[i];
        }
        return jac;
    };

    fit::LmOptions opt;
    opt.lower = vec({0.0, 1e-3 * step});
    opt.upper = vec({std::numeric_limits<double>::infinity(), 1e3 * (t.back() - t.front())});
    opt.scale_covariance = false;
    const auto lm = fit::levenberg_marquardt(residual, vec({amp0, tau0}), opt, jacobian);

    DecayFit out;
    out.amplitude = lm.parameters[0];
    out.lifetime_ps = lm.parameters[1];
    out.report = make_report(lm, {"amplitude", "lifetime_ps"});
    if (out.lifetime_ps < 2.0 * step) {
        out.report.warnings.push_back(
            fmt::format("lifetime {:.3g} ps is comparable to the grid spacing {:.3g} ps; fit is ill-conditioned",
                        out.lifetime_ps, step));
    }
    return out;
}

double G2Fit::evaluate(double tau_ps) const
{
    const double u = std::abs(tau_ps);
    double value = 1.0 - a * std::exp(-u / t1_ps);
    if (bunching) {
        value += b * std::exp(-u / t2_ps);
    }
    return value;
}

namespace {

struct G2Attempt
{
    fit::LmResult lm;
    bool bunching = false;
};

// Starting point by variable projection: for each (t1[, t2]) on a log grid the
// model c0 + c1 exp(-u/t1) [+ c2 exp(-u/t2)] is linear in c, solved by least
// squares; the best grid point seeds the nonlinear fit.
VectorXd g2_start(const std::vector<double>& tau, const std::vector<double>& y, bool bunching, double span)
{
    const auto n = static_cast<Eigen::Index>(tau.size());
    double min_step = span;
    for (std::size_t i = 1; i < tau.size(); ++i) {
        min_step = std::min(min_step, std::abs(tau[i] - tau[i - 1]));
    }
    const int points = 24;
    std::vector<double> grid(points);
    const double lo = std::log(std::max(min_step, 1e-6 * span));
    const double hi = std::log(0.5 * span);
    for (int i = 0; i < points; ++i) {
        grid[static_cast<std::size_t>(i)] = std::exp(lo + (hi - lo) * i / (points - 1));
    }
    VectorXd target(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        target[i] = y[static_cast<std::size_t>(i)];
    }
    double best = std::numeric_limits<double>::infinity();
    VectorXd start;
    auto consider = [&](double t1, double t2) {
        Eigen::MatrixXd basis(n, bunching ? 3 : 2);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double u = std::abs(tau[static_cast<std::size_t>(i)]);
            basis(i, 0) = 1.0;
            basis(i, 1) = std::exp(-u / t1);
            if (bunching) {
                basis(i, 2) = std::exp(-u / t2);
            }
        }
        const VectorXd c = basis.colPivHouseholderQr().solve(target);
        const double cost = (basis * c - target).squaredNorm();
        if (!(cost < best) || c[0] <= 0.0 || c[1] > 0.0 || (bunching && c[2] < 0.0)) {
            return;
        }
        best = cost;
        start = bunching ? vec({c[0], -c[1] / c[0], t1, c[2] / c[0], t2}) : vec({c[0], -c[1] / c[0], t1});
    };
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!bunching) {
            consider(grid[i], 0.0);
            continue;
        }
        for (std::size_t j = i + 1; j < grid.size(); ++j) {
            consider(grid[i], grid[j]);
        }
    }
    return start;
}

G2Attempt fit_g2_model(const std::vector<double>& tau, const std::vector<double>& y, bool bunching, double a0,
                       double t10, double span)
{
    const auto n = static_cast<Eigen::Index>(tau.size());
    auto residual = [&](const VectorXd& p) {
        VectorXd r(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double u = std::abs(tau[static_cast<std::size_t>(i)]);
            double m = 1.0 - p[1] * std::exp(-u / p[2]);
            if (bunching) {
                m += p[3] * std::exp(-u / p[4]);
            }
            r[i] = p[0] * m - y[static_cast<std::size_t>(i)];
        }
        return r;
    };
    const double inf = std::numeric_limits<double>::infinity();
    fit::LmOptions opt;
    VectorXd start = g2_start(tau, y, bunching, span);
    if (bunching) {
        opt.lower = vec({0.5, 0.0, 1e-6 * span, 0.0, 1e-6 * span});
        opt.upper = vec({2.0, 2.0, span, 10.0, 100.0 * span});
        if (start.size() == 0) {
            start = vec({1.0, a0, t10, 0.1, 10.0 * t10});
        }
    } else {
        opt.lower = vec({0.5, 0.0, 1e-6 * span});
        opt.upper = vec({2.0, inf, span});
        if (start.size() == 0) {
            start = vec({1.0, a0, t10});
        }
    }
    start = start.cwiseMax(*opt.lower).cwiseMin(*opt.upper);
    return {fit::levenberg_marquardt(residual, start, opt), bunching};
}

}  // namespace

G2Fit fit_g2(const MeasurementSeries& correlation, const G2Options& options)
{
    correlation.validate();
    const auto& tau = correlation.x;
    const auto& y = correlation.y;
    const double tau_max = std::max(std::abs(tau.front()), std::abs(tau.back()));
    const double edge = options.tail_fraction * tau_max;
    int left = 0;
    int right = 0;
    double tail_sum = 0.0;
    for (std::size_t i = 0; i < tau.size(); ++i) {
        if (std::abs(tau[i]) >= edge) {
            (tau[i] < 0.0 ? left : right) += 1;
            tail_sum += y[i];
        }
    }
    if (left < options.min_tail_points || right < options.min_tail_points) {
        throw ValidationError(fmt::format("tails too short to normalize: need {} points beyond |tau| = {:g} ps on "
                                          "each side, found {} and {}",
                                          options.min_tail_points, edge, left, right));
    }
    const double norm = tail_sum / (left + right);
    require(norm > 0.0, "correlation tails are zero; cannot normalize");
    std::vector<double> yn(y.size());
    std::transform(y.begin(), y.end(), yn.begin(), [&](double v) { return v / norm; });

    const double dip = 1.0 - *std::min_element(yn.begin(), yn.end());
    const double a0 = std::clamp(dip, 0.05, 1.5);
    double t10 = tau_max / 10.0;
    for (std::size_t i = 0; i < tau.size(); ++i) {
        if (tau[i] > 0.0 && 1.0 - yn[i] < a0 / std::numbers::e) {
            t10 = std::max(tau[i], 1e-3 * tau_max);
            break;
        }
    }

    const double span = tau.back() - tau.front();
    // In automatic mode a failure of one model is tolerated as long as the
    // other converges.
    std::optional<G2Attempt> plain;
    std::optional<G2Attempt> with_b;
    if (options.model != G2Model::bunching) {
        try {
            plain = fit_g2_model(tau, yn, false, a0, t10, span);
        } catch (const NonConvergenceError&) {
            if (options.model == G2Model::antibunching) {
                throw;
            }
        }
    }
    if (options.model != G2Model::antibunching) {
        try {
            with_b = fit_g2_model(tau, yn, true, a0, t10, span);
        } catch (const NonConvergenceError&) {
            if (options.model == G2Model::bunching || !plain) {
                throw;
            }
        }
    }
    G2Attempt chosen = plain ? *plain : *with_b;
    if (plain && with_b) {
        const double noise = with_b->lm.reduced_chi_squared;
        const double gain = plain->lm.chi_squared - with_b->lm.chi_squared;
        const bool significant = with_b->lm.parameters[3] > 2.0 * with_b->lm.standard_errors[3] && noise > 0.0 &&
                                 gain > 4.0 * noise;
        if (significant) {
            chosen = *with_b;
        }
    }

    const auto& p = chosen.lm.parameters;
    G2Fit out;
    out.bunching = chosen.bunching;
    out.normalization = norm * p[0];
    out.a = p[1];
    out.t1_ps = p[2];
    if (chosen.bunching) {
        out.b = p[3];
        out.t2_ps = p[4];
    }
    out.g2_0 = 1.0 - out.a + out.b;
    const auto& cov = chosen.lm.covariance;
    double var = cov(1, 1);
    if (chosen.bunching) {
        var += cov(3, 3) - 2.0 * cov(1, 3);
    }
    out.g2_0_uncertainty = std::sqrt(std::max(var, 0.0));
    out.report = make_report(chosen.lm, chosen.bunching
                                            ? std::vector<std::string>{"scale", "A", "t1_ps", "B", "t2_ps"}
                                            : std::vector<std::string>{"scale", "A", "t1_ps"});

    const double residual_at_tail = std::abs(out.evaluate(edge) - 1.0);
    if (residual_at_tail > options.tail_tolerance) {
        throw ValidationError(fmt::format("tails too short to normalize: fitted g2 at |tau| = {:g} ps still differs "
                                          "from 1 by {:.3g}",
                                          edge, residual_at_tail));
    }
    return out;
}

double correct_g2_background(double g2, double snr)
{
    require(std::isfinite(g2), "g2 must be finite");
    require(snr >= 0.0, "signal-to-noise ratio must be non-negative");
    require(snr > 0.0, "signal-to-noise ratio of zero leaves the correction undefined");
    if (std::isinf(snr)) {
        return g2;
    }
    const double rho = snr / (snr + 1.0);
    const double rho2 = rho * rho;
    return (g2 - (1.0 - rho2)) / rho2;
}

PolarizationFit fit_polarization(const MeasurementSeries& scan)
{
    scan.validate();
    const auto& theta = scan.x;
    const auto& y = scan.y;
    require(theta.back() - theta.front() >= 180.0 - 1e-9,
            fmt::format("polarization scan must span at least 180 degrees, spans {:g}", theta.back() - theta.front()));
    const auto n = static_cast<Eigen::Index>(theta.size());
    require(n >= 4, "polarization fit needs at least 4 samples");
    Eigen::MatrixXd design(n, 3);
    VectorXd obs(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double t = 2.0 * theta[static_cast<std::size_t>(i)] * std::numbers::pi / 180.0;
        design(i, 0) = 1.0;
        design(i, 1) = std::cos(t);
        design(i, 2) = std::sin(t);
        obs[i] = y[static_cast<std::size_t>(i)];
    }
    const VectorXd c = design.colPivHouseholderQr().solve(obs);
    const double rss = (design * c - obs).squaredNorm();
    const double s2 = rss / static_cast<double>(n - 3);
    const Eigen::MatrixXd cov = s2 * (design.transpose() * design).inverse();

    PolarizationFit out;
    const double rho = std::hypot(c[1], c[2]);
    require(c[0] > 0.0, "polarization scan has non-positive mean intensity");
    out.a = 2.0 * rho;
    out.b = c[0] - rho;
    out.axis_deg = std::fmod(0.5 * std::atan2(c[2], c[1]) * 180.0 / std::numbers::pi + 180.0, 180.0);
    out.flat = rho <= 1e-9 * c[0];
    if (!out.flat) {
        out.dop = std::min(rho / c[0], 1.0);
        Eigen::Vector3d grad(-rho / (c[0] * c[0]), c[1] / (rho * c[0]), c[2] / (rho * c[0]));
        out.dop_uncertainty = std::sqrt(std::max(0.0, grad.dot(cov * grad)));
    }
    double sigma_a = 0.0;
    double sigma_b = 0.0;
    if (rho > 0.0) {
        const Eigen::Vector3d grad_a(0.0, 2.0 * c[1] / rho, 2.0 * c[2] / rho);
        const Eigen::Vector3d grad_b(1.0, -c[1] / rho, -c[2] / rho);
        sigma_a = std::sqrt(std::max(0.0, grad_a.dot(cov * grad_a)));
        sigma_b = std::sqrt(std::max(0.0, grad_b.dot(cov * grad_b)));
    }
    out.report.parameters = {{"a", out.a, sigma_a},
                             {"b", out.b, sigma_b},
                             {"axis_deg", out.axis_deg, 0.0},
                             {"dop", out.dop, out.dop_uncertainty}};
    out.report.chi_squared = rss;
    out.report.reduced_chi_squared = s2;
    out.report.residual_norm = std::sqrt(rss);
    if (out.flat) {
        out.report.warnings.push_back("flat polarization scan; DOP set to 0");
    }
    return out;
}

double zpl_fraction(const MeasurementSeries& spectrum, const LorentzianFit& zpl, const ZplOptions& options)
{
    spectrum.validate();
    require(zpl.fwhm_nm > 0.0, "ZPL fit has non-positive width");
    const double lo = options.lower_nm.value_or(spectrum.x.front());
    const double hi = options.upper_nm;
    require(hi > lo, "integration band is empty");

    double total = 0.0;
    int used = 0;
    for (std::size_t i = 1; i < spectrum.x.size(); ++i) {
        if (spectrum.x[i - 1] >= lo && spectrum.x[i] <= hi) {
            const double y0 = spectrum.y[i - 1] - zpl.offset;
            const double y1 = spectrum.y[i] - zpl.offset;
            total += 0.5 * (y0 + y1) * (spectrum.x[i] - spectrum.x[i - 1]);
            ++used;
        }
    }
    require(used > 0, fmt::format("no samples inside the integration band [{:g}, {:g}] nm", lo, hi));
    require(total > 0.0, "integrated emission in band is not positive");

    const double half = options.window_fwhm * zpl.fwhm_nm;
    const double from = std::max(lo, zpl.center_nm - half);
    const double to = std::min(hi, zpl.center_nm + half);
    double area = 0.0;
    if (to > from) {
        const double hw = zpl.fwhm_nm / 2.0;
        area = zpl.amplitude * hw * (std::atan((to - zpl.center_nm) / hw) - std::atan((from - zpl.center_nm) / hw));
    }
    return std::clamp(area / total, 0.0, 1.0);
}

SaturationFit fit_saturation(const MeasurementSeries& series)
{
    series.validate();
    const auto& p = series.x;
    const auto& y = series.y;
    require(p.front() >= 0.0, "excitation powers must be non-negative");
    require(p.size() >= 3, "saturation fit needs at least 3 samples");

    // Lineweaver-Burk start: 1/y = 1/R + (Psat/R) / P.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] > 0.0 && y[i] > 0.0) {
            const double u = 1.0 / p[i];
            const double v = 1.0 / y[i];
            sx += u;
            sy += v;
            sxx += u * u;
            sxy += u * v;
            ++m;
        }
    }
    double r0 = 1.2 * *std::max_element(y.begin(), y.end());
    double ps0 = 0.5 * (p.front() + p.back());
    if (m >= 2) {
        const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
        const double icpt = (sy - slope * sx) / m;
        if (icpt > 0.0 && slope > 0.0) {
            r0 = 1.0 / icpt;
            ps0 = slope * r0;
        }
    }
    auto residual = [&](const VectorXd& q) {
        VectorXd r(static_cast<Eigen::Index>(p.size()));
        for (std::size_t i = 0; i < p.size(); ++i) {
            r[static_cast<Eigen::Index>(i)] = q[1] * p[i] / (p[i] + q[0]) - y[i];
        }
        return r;
    };
    fit::LmOptions opt;
    opt.lower = vec({1e-12 * (p.back() + 1.0), 0.0});
    const auto lm = fit::levenberg_marquardt(residual, vec({ps0, r0}), opt);
    SaturationFit out;
    out.saturation_power = lm.parameters[0];
    out.max_rate = lm.parameters[1];
    out.report = make_report(lm, {"saturation_power", "max_rate"});
    return out;
}

std::string format_with_uncertainty(double value, double uncertainty)
{
    if (!(uncertainty > 0.0) || !std::isfinite(uncertainty)) {
        return fmt::format("{:g}", value);
    }
    const int exponent = static_cast<int>(std::floor(std::log10(uncertainty)));
    const double leading = uncertainty / std::pow(10.0, exponent);
    const int digits = leading < 4.0 ? 2 : 1;
    const int decimals = digits - 1 - exponent;
    if (decimals >= 0) {
        const double scale = std::pow(10.0, decimals);
        const long long err = std::llround(uncertainty * scale);
        return fmt::format("{:.{}f}({})", value, decimals, err);
    }
    const double unit = std::pow(10.0, -decimals);
    return fmt::format("{:.0f}({:.0f})", std::round(value / unit) * unit, std::round(uncertainty / unit) * unit);
}

}  // namespace spskit::specfit
