#include "spskit/qkd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "spskit/constants.hpp"
#include "spskit/error.hpp"
#include "spskit/numeric.hpp"

namespace spskit::qkd {

namespace {

bool is_laser(SourceKind kind) { return kind == SourceKind::wcs || kind == SourceKind::decoy; }

bool probability(double x) { return std::isfinite(x) && x >= 0.0 && x <= 1.0; }

// Rate with negative values kept, for sign-change searches.
KeyRate best_rate(SourceKind kind, double t, const DetectorModel& detector, const MuSearch& search)
{
    SourceModel probe;
    probe.kind = kind;
    probe.mu_mode = MuMode::fixed;
    auto rate_of = [&](double mu) {
        probe.mu = mu;
        return key_rate_at(probe, t, detector).rate;
    };
    // Log-spaced scan locates the basin; golden section refines it.
    const double lo = search.mu_max * 1e-7;
    double best_mu = lo;
    double best = -1.0;
    int best_i = 0;
    std::vector<double> grid(static_cast<std::size_t>(search.grid_points));
    for (int i = 0; i < search.grid_points; ++i) {
        const double mu = lo * std::pow(search.mu_max / lo, static_cast<double>(i) / (search.grid_points - 1));
        grid[static_cast<std::size_t>(i)] = mu;
        const double r = rate_of(mu);
        if (r > best) {
            best = r;
            best_mu = mu;
            best_i = i;
        }
    }
    KeyRate out;
    if (best <= 0.0) {
        out.mu = 0.0;
        out.below_horizon = true;
        return out;
    }
    const double a = grid[static_cast<std::size_t>(std::max(best_i - 1, 0))];
    const double b = grid[static_cast<std::size_t>(std::min(best_i + 1, search.grid_points - 1))];
    const auto refined = numeric::golden_section_max(rate_of, a, b, search.tolerance);
    if (refined.value >= best) {
        best_mu = refined.x;
    }
    probe.mu = best_mu;
    out = key_rate_at(probe, t, detector);
    out.mu = best_mu;
    return out;
}

}  // namespace

std::string to_string(SourceKind kind)
{
    switch (kind) {
    case SourceKind::ideal_sps: return "ideal_sps";
    case SourceKind::real_sps: return "real_sps";
    case SourceKind::wcs: return "wcs";
    case SourceKind::decoy: return "decoy";
    }
    return "unknown";
}

std::string to_string(DivergenceModel model)
{
    switch (model) {
    case DivergenceModel::gaussian_far_field: return "gaussian";
    case DivergenceModel::friis: return "friis";
    case DivergenceModel::calibrated_linear: return "calibrated";
    }
    return "unknown";
}

void SourceModel::validate() const
{
    require(std::isfinite(mu) && mu > 0.0, fmt::format("mu must be positive, got {}", mu));
    if (!is_laser(kind)) {
        require(mu <= 1.0, fmt::format("single-photon source efficiency must be <= 1, got {}", mu));
        require(probability(g2_0), fmt::format("g2(0) must lie in [0, 1], got {}", g2_0));
    }
}

SourceModel SourceModel::ideal_sps()
{
    return {SourceKind::ideal_sps, 1.0, 0.0, MuMode::fixed};
}

SourceModel SourceModel::real_sps(double efficiency, double g2_0)
{
    return {SourceKind::real_sps, efficiency, g2_0, MuMode::fixed};
}

SourceModel SourceModel::wcs(double mu, MuMode mode)
{
    return {SourceKind::wcs, mu, 0.0, mode};
}

SourceModel SourceModel::decoy(double mu, MuMode mode)
{
    return {SourceKind::decoy, mu, 0.0, mode};
}

void ChannelModel::validate() const
{
    require(std::isfinite(distance_km) && distance_km >= 0.0, "distance must be non-negative");
    if (kind == ChannelKind::fiber) {
        require(std::isfinite(alpha_db_per_km) && alpha_db_per_km > 0.0, "fiber attenuation must be positive");
        return;
    }
    require(link.transmit_aperture_m > 0.0 && link.receive_aperture_m > 0.0, "apertures must be positive");
    require(link.wavelength_nm > 0.0, "wavelength must be positive");
    if (link.model == DivergenceModel::calibrated_linear) {
        require(link.divergence_rad > 0.0, "calibrated divergence model needs a positive divergence angle");
    }
}

ChannelModel ChannelModel::at(double d) const
{
    ChannelModel c = *this;
    c.distance_km = d;
    return c;
}

void DetectorModel::validate() const
{
    require(probability(eta) && eta > 0.0, "detector efficiency must lie in (0, 1]");
    require(probability(dark_count), "dark count probability must lie in [0, 1]");
    require(probability(e_det), "misalignment error must lie in [0, 1]");
    require(probability(q_sift) && q_sift > 0.0, "sifting factor must lie in (0, 1]");
    require(probability(e0), "error rate of background counts must lie in [0, 1]");
    require(std::isfinite(f_ec) && f_ec >= 1.0, "error-correction inefficiency must be >= 1");
}

double binary_entropy(double x)
{
    if (x <= 0.0 || x >= 1.0) {
        return 0.0;
    }
    return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

double beam_diameter_m(const FreeSpaceLink& link, double distance_km)
{
    const double d = distance_km * 1e3;
    if (link.model == DivergenceModel::calibrated_linear) {
        return link.transmit_aperture_m + link.divergence_rad * d;
    }
    const double w0 = link.transmit_aperture_m / 2.0;
    const double lambda = link.wavelength_nm / constants::kNmPerM;
    const double z_r = std::numbers::pi * w0 * w0 / lambda;
    return 2.0 * w0 * std::sqrt(1.0 + (d / z_r) * (d / z_r));
}

double channel_transmittance(const ChannelModel& channel)
{
    channel.validate();
    if (channel.kind == ChannelKind::fiber) {
        return constants::db_to_transmittance(channel.alpha_db_per_km * channel.distance_km);
    }
    const auto& link = channel.link;
    if (channel.distance_km == 0.0) {
        return 1.0;
    }
    if (link.model == DivergenceModel::friis) {
        const double lambda = link.wavelength_nm / constants::kNmPerM;
        const double f = std::numbers::pi * link.transmit_aperture_m * link.receive_aperture_m /
                         (4.0 * lambda * channel.distance_km * 1e3);
        return std::min(1.0, f * f);
    }
    const double ratio = link.receive_aperture_m / beam_diameter_m(link, channel.distance_km);
    return std::min(1.0, ratio * ratio);
}

double channel_loss_db(const ChannelModel& channel)
{
    if (channel.kind == ChannelKind::fiber) {
        channel.validate();
        return channel.alpha_db_per_km * channel.distance_km;
    }
    return constants::transmittance_to_db(channel_transmittance(channel));
}

double calibrate_divergence(const FreeSpaceLink& link, double target_loss_db, double target_distance_km)
{
    require(target_loss_db > 0.0 && target_distance_km > 0.0, "calibration targets must be positive");
    const double t = constants::db_to_transmittance(target_loss_db);
    const double diameter = link.receive_aperture_m / std::sqrt(t);
    require(diameter > link.transmit_aperture_m, "calibration target needs a beam narrower than the transmitter");
    return (diameter - link.transmit_aperture_m) / (target_distance_km * 1e3);
}

KeyRate key_rate_at(const SourceModel& source, double t, const DetectorModel& detector)
{
    source.validate();
    detector.validate();
    require(probability(t), fmt::format("transmittance must lie in [0, 1], got {}", t));
    const double mu = source.mu;
    const double y0 = detector.dark_count;
    const double te = t * detector.eta;

    KeyRate out;
    out.mu = mu;
    double signal_errors = 0.0;
    double multiphoton = 0.0;
    if (is_laser(source.kind)) {
        const double detect = -std::expm1(-mu * te);
        out.gain = 1.0 - (1.0 - y0) * std::exp(-mu * te);
        signal_errors = detector.e_det * detect;
        multiphoton = 1.0 - std::exp(-mu) * (1.0 + mu);
    } else {
        out.gain = y0 + mu * te;
        signal_errors = detector.e_det * mu * te;
        multiphoton = source.g2_0 * mu * mu / 2.0;
    }
    if (out.gain <= 0.0) {
        out.below_horizon = true;
        return out;
    }
    out.qber = (detector.e0 * y0 + signal_errors) / out.gain;

    double raw = 0.0;
    if (source.kind == SourceKind::decoy) {
        const double y1 = y0 + te;
        const double e1 = (detector.e0 * y0 + detector.e_det * te) / y1;
        raw = detector.q_sift * (-out.gain * detector.f_ec * binary_entropy(out.qber) +
                                 mu * std::exp(-mu) * y1 * (1.0 - binary_entropy(e1)));
    } else {
        const double omega = (out.gain - multiphoton) / out.gain;
        if (omega <= 0.0) {
            out.below_horizon = true;
            return out;
        }
        raw = detector.q_sift * out.gain *
              (omega * (1.0 - binary_entropy(out.qber / omega)) - detector.f_ec * binary_entropy(out.qber));
    }
    if (raw <= 0.0) {
        out.below_horizon = true;
        out.rate = 0.0;
    } else {
        out.rate = raw;
    }
    return out;
}

KeyRate key_rate(const SourceModel& source, const ChannelModel& channel, const DetectorModel& detector)
{
    const double t = channel_transmittance(channel);
    if (is_laser(source.kind) && source.mu_mode == MuMode::optimized) {
        detector.validate();
        return best_rate(source.kind, t, detector, {});
    }
    return key_rate_at(source, t, detector);
}

KeyRate optimize_mu(SourceKind kind, double transmittance, const DetectorModel& detector, const MuSearch& search)
{
    require(is_laser(kind), "mu optimization applies to wcs and decoy sources");
    require(search.mu_max > 0.0 && search.tolerance > 0.0 && search.grid_points >= 3, "invalid mu search settings");
    detector.validate();
    const KeyRate best = best_rate(kind, transmittance, detector, search);
    if (best.rate <= 0.0) {
        throw NumericalError(fmt::format("no positive rate for {} at transmittance {:g}", to_string(kind),
                                         transmittance));
    }
    return best;
}

Crossing find_crossing(const SourceModel& a, const SourceModel& b, const ChannelModel& channel,
                       const DetectorModel& detector, const Interval& interval)
{
    require(interval.upper_km > interval.lower_km && interval.lower_km >= 0.0 && interval.scan_step_km > 0.0,
            "crossing search interval is invalid");
    auto diff = [&](double d) {
        const ChannelModel c = channel.at(d);
        return key_rate(a, c, detector).rate - key_rate(b, c, detector).rate;
    };
    const int steps = static_cast<int>(std::ceil((interval.upper_km - interval.lower_km) / interval.scan_step_km));
    double prev_d = interval.lower_km;
    double prev = diff(prev_d);
    for (int i = 1; i <= steps; ++i) {
        const double d = std::min(interval.lower_km + i * interval.scan_step_km, interval.upper_km);
        const double cur = diff(d);
        if (cur == 0.0) {
            // Both rates past their horizon or equal; not a change of sign.
            continue;
        }
        if (prev != 0.0 && (prev > 0.0) != (cur > 0.0)) {
            // Bisect on the sign of the first point.
            const bool first_positive = prev > 0.0;
            double lo = prev_d;
            double hi = d;
            while (hi - lo > 1e-9) {
                const double mid = 0.5 * (lo + hi);
                ((diff(mid) > 0.0) == first_positive ? lo : hi) = mid;
            }
            Crossing out;
            out.distance_km = 0.5 * (lo + hi);
            const ChannelModel c = channel.at(out.distance_km);
            out.transmittance = channel_transmittance(c);
            out.loss_db = channel_loss_db(c);
            return out;
        }
        prev_d = d;
        prev = cur;
    }
    throw NumericalError(fmt::format("no crossing in interval [{:g}, {:g}] km between {} and {}", interval.lower_km,
                                     interval.upper_km, to_string(a.kind), to_string(b.kind)));
}

std::vector<SweepRow> sweep(const Scenario& scenario, double start_km, double stop_km, double step_km)
{
    require(start_km >= 0.0 && stop_km >= start_km && step_km > 0.0, "sweep range is invalid");
    const auto count = static_cast<std::size_t>(std::floor((stop_km - start_km) / step_km + 1e-9)) + 1;
    const SourceModel ideal = SourceModel::ideal_sps();
    std::vector<SweepRow> rows;
    rows.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        SweepRow row;
        row.distance_km = start_km + static_cast<double>(i) * step_km;
        const ChannelModel c = scenario.channel.at(row.distance_km);
        row.loss_db = channel_loss_db(c);
        row.rate_sps = key_rate(scenario.sps, c, scenario.detector).rate;
        row.rate_ideal = key_rate(ideal, c, scenario.detector).rate;
        const KeyRate w = key_rate(scenario.wcs, c, scenario.detector);
        const KeyRate d = key_rate(scenario.decoy, c, scenario.detector);
        row.rate_wcs = w.rate;
        row.rate_decoy = d.rate;
        row.mu_wcs = w.mu;
        row.mu_decoy = d.mu;
        rows.push_back(row);
    }
    return rows;
}

std::vector<std::string> formulas()
{
    return {
        "H2(x) = -x log2 x - (1-x) log2(1-x)",
        "sps gain: Q = Y0 + mu t eta; errors: E Q = e0 Y0 + e_det mu t eta; p_multi = g2_0 mu^2 / 2",
        "laser gain: Q = 1 - (1-Y0) exp(-mu t eta); errors: E Q = e0 Y0 + e_det (1 - exp(-mu t eta)); "
        "p_multi = 1 - exp(-mu)(1+mu)",
        "GLLP: Omega = (Q - p_multi)/Q; R = q Q [Omega (1 - H2(E/Omega)) - f_EC H2(E)]",
        "decoy (asymptotic): Y1 = Y0 + t eta; e1 = (e0 Y0 + e_det t eta)/Y1; "
        "R = q [-Q f_EC H2(E) + mu exp(-mu) Y1 (1 - H2(e1))]",
        "negative R is clamped to 0 and flagged below horizon",
    };
}

}  // namespace spskit::qkd
