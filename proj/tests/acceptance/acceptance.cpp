// Acceptance suite: one PASS/FAIL line per criterion, detail lines below it.
// Usage: acceptance <path to spskit CLI> <scratch directory>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "../oracles.hpp"
#include "../synthetic.hpp"
#include "spskit/cavitymode.hpp"
#include "spskit/emitter.hpp"
#include "spskit/error.hpp"
#include "spskit/fab.hpp"
#include "spskit/optics.hpp"
#include "spskit/qkd.hpp"
#include "spskit/specfit.hpp"

namespace fs = std::filesystem;
using namespace spskit;

namespace {

constexpr double kDesign = 565.0;
constexpr double kZpl = 565.85;
constexpr double kGamma = 1e12 / 897.0;
constexpr double kGammaStar = 5.41e12;

class Criterion
{
public:
    explicit Criterion(std::string title) : title_(std::move(title)) {}

    void check(bool ok, const std::string& detail)
    {
        pass_ = pass_ && ok;
        details_.push_back(fmt::format("    [{}] {}", ok ? "ok" : "FAILED", detail));
    }

    bool print(int number) const
    {
        std::printf("%s %2d  %s\n", pass_ ? "PASS" : "FAIL", number, title_.c_str());
        for (const auto& d : details_) {
            std::printf("%s\n", d.c_str());
        }
        return pass_;
    }

private:
    std::string title_;
    bool pass_ = true;
    std::vector<std::string> details_;
};

bool rel(double value, double target, double tolerance)
{
    return std::abs(value - target) <= tolerance * std::abs(target);
}

optics::LayerStack coating()
{
    return optics::make_quarter_wave_stack(optics::kIndexTiO2, optics::kIndexSiO2, 9, kDesign);
}

std::vector<std::pair<double, double>> layers_of(const optics::LayerStack& s)
{
    std::vector<std::pair<double, double>> out;
    for (const auto& l : s.layers) {
        out.emplace_back(l.index, l.thickness_nm);
    }
    return out;
}

Criterion coating_criterion()
{
    Criterion c("coating reflectance, closed form and stopband edge");
    const auto stack = coating();
    const double r_tmm = optics::response(stack, kDesign).reflectance;
    const double r_closed =
        oracles::quarter_wave_peak_reflectance(optics::kIndexTiO2, optics::kIndexSiO2, 9, 1.0, optics::kIndexSubstrate);
    const double r_matrix = std::norm(oracles::stack_reflection(1.0, layers_of(stack), stack.substrate_index, kDesign));
    c.check(r_tmm >= 0.992 && r_tmm <= 0.999, fmt::format("R(565 nm) = {:.5f} in [0.992, 0.999]", r_tmm));
    c.check(std::abs(r_tmm - r_closed) <= 1e-4, fmt::format("|R - closed form| = {:.2e} <= 1e-4", std::abs(r_tmm - r_closed)));
    c.check(std::abs(r_tmm - r_matrix) <= 1e-12, fmt::format("|R - independent matrix| = {:.2e}", std::abs(r_tmm - r_matrix)));

    const optics::Mirror m{stack};
    const auto band = optics::cavity_stopband(m, m, 0.99, kDesign);
    const double edge = band ? band->lower_nm : std::numeric_limits<double>::quiet_NaN();
    c.check(band && std::abs(edge - 504.0) <= 5.0, fmt::format("lower edge {:.2f} nm, 504 +- 5", edge));
    // Anti-resonant envelope from the independent matrix at the reported edge.
    const double r = std::abs(oracles::stack_reflection(1.0, layers_of(stack), stack.substrate_index, edge));
    const double envelope = std::pow(2.0 * r / (1.0 + r * r), 2);
    c.check(std::abs(envelope - 0.99) < 1e-3, fmt::format("oracle envelope at edge = {:.5f}", envelope));
    return c;
}

Criterion cavity_criterion()
{
    Criterion c("cavity resonance FWHM and Q");
    const auto stack = coating();
    const optics::Mirror m{stack, optics::loss_for_reflectance(stack, kZpl, 0.992)};
    const double gap = optics::resonant_gap(m, m, 8, kZpl);
    const auto spec = optics::cavity_spectrum(m, gap, m, optics::wavelength_grid(555.0, 577.0, 0.01), kZpl);
    if (!spec.resonance) {
        c.check(false, "no resonance found");
        return c;
    }
    const auto& res = *spec.resonance;
    c.check(rel(res.fwhm_nm, 0.169, 0.10), fmt::format("FWHM {:.4f} nm, 0.169 +- 10%", res.fwhm_nm));
    c.check(rel(res.quality_factor, 3345.0, 0.10), fmt::format("Q {:.0f}, 3345 +- 10%", res.quality_factor));
    c.check(rel(res.quality_factor, res.center_nm / res.fwhm_nm, 1e-12), "Q = center / FWHM");
    // Half maximum from the Airy formula with the oracle mirror phase.
    const double lo = res.center_nm - res.fwhm_nm / 2.0;
    const double t_half = optics::cavity_transmission(m, gap, m, lo);
    c.check(rel(t_half, res.peak_transmission / 2.0, 0.02),
            fmt::format("T at centre - FWHM/2 is {:.4f} of peak", t_half / res.peak_transmission));
    return c;
}

Criterion penetration_criterion()
{
    Criterion c("penetration depth, order independent");
    const auto stack = coating();
    const optics::Mirror m{stack};
    double xi[2] = {0.0, 0.0};
    const int orders[2] = {5, 8};
    for (int i = 0; i < 2; ++i) {
        const int q = orders[i];
        const double gap = optics::resonant_gap(m, m, q, kZpl);
        const auto r = oracles::stack_reflection(1.0, layers_of(stack), stack.substrate_index, kZpl);
        // Round trip closes on itself: arg(r^2) - 2 k L = -2 pi (q - 1).
        const double phase = std::arg(r * r);
        const double k = 2.0 * std::numbers::pi / kZpl;
        double oracle_gap = (phase + 2.0 * std::numbers::pi * (q - 1)) / (2.0 * k);
        while (oracle_gap - gap > kZpl / 4.0) {
            oracle_gap -= kZpl / 2.0;
        }
        while (gap - oracle_gap > kZpl / 4.0) {
            oracle_gap += kZpl / 2.0;
        }
        c.check(std::abs(oracle_gap - gap) < 0.05,
                fmt::format("q = {}: gap {:.3f} nm vs round-trip phase oracle {:.3f} nm", q, gap, oracle_gap));
        xi[i] = optics::penetration_depth(q, kZpl, gap);
    }
    c.check(rel(xi[1], 122.0, 0.25), fmt::format("xi(q = 8) = {:.1f} nm, 122 +- 25%", xi[1]));
    c.check(rel(xi[0], xi[1], 0.01), fmt::format("xi(q = 5) = {:.2f} nm within 1% of q = 8", xi[0]));
    return c;
}

Criterion mode_volume_criterion()
{
    Criterion c("Gaussian mode volume");
    cavitymode::CavityConfig cfg;
    const double v = cavitymode::mode_volume(cfg);
    c.check(rel(v, 1.76, 0.03), fmt::format("V = {:.4f} lambda^3, 1.76 +- 3%", v));
    // Oracle: integrate |E|^2 of the standing TEM00 mode over the gap.
    const double lambda = kZpl;
    const double length = 8 * lambda / 2.0;
    const double rc = 2700.0;
    const double w0sq = lambda / std::numbers::pi * std::sqrt(length * (rc - length));
    const double radial =
        oracles::simpson([&](double r) { return 2.0 * std::numbers::pi * r * std::exp(-2.0 * r * r / w0sq); }, 0.0,
                         8.0 * std::sqrt(w0sq), 20000);
    const double axial = oracles::simpson(
        [&](double z) { return std::pow(std::sin(2.0 * std::numbers::pi * z / lambda), 2); }, 0.0, length, 20000);
    const double oracle = radial * axial / std::pow(lambda, 3);
    c.check(rel(v, oracle, 1e-6), fmt::format("integrated oracle {:.5f}", oracle));
    return c;
}

Criterion purcell_criterion()
{
    Criterion c("Purcell factor and quantum efficiency");
    const double f = emitter::effective_purcell(kZpl, 0.224, 5.76, 1.76).purcell;
    const double q_eff = kZpl / (0.224 + 5.76);
    const double oracle = 3.0 * q_eff / (4.0 * std::numbers::pi * std::numbers::pi * 1.76);
    c.check(rel(f, 4.07, 0.02), fmt::format("F = {:.4f}, 4.07 +- 2%", f));
    c.check(rel(f, oracle, 1e-12), fmt::format("hand formula {:.4f}", oracle));
    const double eta = emitter::quantum_efficiency(2.29, 4.07, 1.68);
    c.check(std::abs(eta - 0.513) <= 0.005, fmt::format("eta = {:.4f}, 0.513 +- 0.005", eta));
    c.check(rel(eta, (2.29 - 1.0) / (2.29 + 4.07 - 1.68 * 2.29), 1e-12), "eta hand formula");
    return c;
}

Criterion indistinguishability_criterion()
{
    Criterion c("indistinguishability, kappa threshold and FSR chain");
    const double i_free = emitter::indistinguishability_free(kGamma, kGammaStar);
    c.check(i_free == kGamma / (kGamma + kGammaStar), fmt::format("I_free = {:.4e} exact to formula", i_free));
    c.check(rel(i_free, 2.06e-4, 0.005), "I_free rounds to 2.06e-4 (rates in 1/s)");

    const double k90 = emitter::kappa_for_target_indistinguishability(kGamma, kGammaStar, 1e5, 0.9);
    c.check(rel(k90, 124e6, 0.02), fmt::format("kappa(I = 0.9) = {:.2f} MHz, 124 +- 2%", k90 / 1e6));
    c.check(rel(k90, kGamma / 9.0, 1e-4), "weak-coupling closed form gamma / 9");

    const double fsr = cavitymode::fsr_for_linewidth_ghz(0.9995, k90);
    const double oracle_fsr = k90 * std::numbers::pi * std::sqrt(0.9995) / (1.0 - 0.9995) / 1e9;
    c.check(rel(fsr, 779.0, 0.01), fmt::format("FSR = {:.1f} GHz, 779 +- 1%", fsr));
    c.check(rel(fsr, oracle_fsr, 1e-12), "FSR = linewidth x finesse");

    const double kappa = 210.6e9;
    const double g = std::sqrt(4.07 * kappa * kGamma) / 2.0;
    const double i_cav = emitter::indistinguishability_cavity({kGamma, kGammaStar, kappa, g});
    const double big_r = 4.0 * g * g / (kappa + kGamma + kGammaStar);
    const double oracle = (kGamma + kappa * big_r / (kappa + big_r)) / (kGamma + kappa + 2.0 * big_r);
    c.check(i_cav >= 2.5e-3 && i_cav <= 1.1e-2, fmt::format("I_cav = {:.3e} in [2.5e-3, 1.1e-2]", i_cav));
    c.check(rel(i_cav, oracle, 1e-12), "I_cav hand formula");
    return c;
}

Criterion fitting_criterion()
{
    Criterion c("fitting round trips, 100 draws each");
    std::mt19937_64 rng(4242);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * u01(rng); };
    const int draws = 100;

    int ok = 0;
    double worst = 0.0;
    for (int i = 0; i < draws; ++i) {
        const double center = uniform(555.0, 575.0);
        const double w = uniform(1.0, 8.0);
        const auto s = synthetic::lorentzian_spectrum(center, w, uniform(300.0, 3000.0), uniform(0.0, 50.0),
                                                      center - 8 * w, center + 8 * w, w / 40.0, 0.01, rng);
        try {
            const auto f = specfit::fit_lorentzian(s);
            const double err = std::max(std::abs(f.center_nm - center) / w, std::abs(f.fwhm_nm - w) / w);
            worst = std::max(worst, err);
            ok += err <= 0.02;
        } catch (const std::exception&) {
        }
    }
    c.check(ok == draws, fmt::format("Lorentzian: {}/{} within 2% of FWHM (worst {:.4f})", ok, draws, worst));

    ok = 0;
    worst = 0.0;
    for (int i = 0; i < draws; ++i) {
        const double tau = uniform(300.0, 1000.0);
        const auto d = synthetic::decay_with_irf(tau, uniform(50.0, 120.0), 1000.0, 1e4, 4.0, 1000.0 + 12.0 * tau, rng);
        try {
            const double err = std::abs(specfit::fit_decay_with_irf(d.decay, d.irf).lifetime_ps - tau) / tau;
            worst = std::max(worst, err);
            ok += err <= 0.03;
        } catch (const std::exception&) {
        }
    }
    c.check(ok == draws, fmt::format("IRF lifetime: {}/{} within 3% (worst {:.4f})", ok, draws, worst));

    ok = 0;
    worst = 0.0;
    int identity = 0;
    for (int i = 0; i < draws; ++i) {
        const double a = uniform(0.8, 0.98);
        const double b = uniform(0.2, 0.5);
        const double t1 = uniform(300.0, 900.0);
        const double t2 = uniform(3000.0, 8000.0);
        const auto s = synthetic::g2_trace(a, b, t1, t2, 8.0 * t2, 16.0, uniform(50.0, 500.0), 0.002, rng);
        try {
            const auto f = specfit::fit_g2(s);
            const double err = std::max({std::abs(f.a - a) / a, std::abs(f.b - b) / b, std::abs(f.t1_ps - t1) / t1,
                                         std::abs(f.t2_ps - t2) / t2});
            worst = std::max(worst, err);
            ok += f.bunching && err <= 0.03;
            identity += f.g2_0 == 1.0 - f.a + f.b;
        } catch (const std::exception&) {
        }
    }
    c.check(ok == draws, fmt::format("g2: {}/{} with A, B, t1, t2 within 3% (worst {:.4f})", ok, draws, worst));
    c.check(identity == draws, fmt::format("g2(0) = 1 - A + B exactly in {}/{}", identity, draws));

    ok = 0;
    worst = 0.0;
    for (int i = 0; i < draws; ++i) {
        const double dop = uniform(0.5, 0.99);
        const auto s = synthetic::polarization_scan(dop, uniform(500.0, 5000.0), uniform(0.0, 180.0), 0.005, rng);
        const double err = std::abs(specfit::fit_polarization(s).dop - dop) / dop;
        worst = std::max(worst, err);
        ok += err <= 0.01;
    }
    c.check(ok == draws, fmt::format("DOP: {}/{} within 1% (worst {:.4f})", ok, draws, worst));

    worst = 0.0;
    for (int i = 0; i < draws; ++i) {
        const double g2 = uniform(0.0, 1.0);
        const double snr = uniform(0.5, 200.0);
        const double rho = snr / (snr + 1.0);
        const double mixed = g2 * rho * rho + 1.0 - rho * rho;
        worst = std::max(worst, std::abs(specfit::correct_g2_background(mixed, snr) - g2));
    }
    c.check(worst <= 1e-12, fmt::format("background correction inverse error {:.2e} <= 1e-12", worst));
    return c;
}

// Rate formulas written out from their textbook form for the oracle.
struct HandRates
{
    double eta = 0.045, y0 = 1.7e-6, ed = 0.033, f = 1.22, q = 0.5;

    static double h(double x) { return x <= 0.0 || x >= 1.0 ? 0.0 : -x * std::log2(x) - (1 - x) * std::log2(1 - x); }

    double gllp(double gain, double e, double p_multi) const
    {
        const double om = (gain - p_multi) / gain;
        if (om <= 0.0 || e / om >= 0.5) {
            return 0.0;
        }
        return std::max(0.0, q * gain * (om * (1 - h(e / om)) - f * h(e)));
    }

    double sps(double mu, double g2, double t) const
    {
        const double gain = y0 + mu * t * eta;
        return gllp(gain, (0.5 * y0 + ed * mu * t * eta) / gain, g2 * mu * mu / 2.0);
    }

    double wcs(double mu, double t) const
    {
        const double gain = 1.0 - (1.0 - y0) * std::exp(-mu * t * eta);
        const double e = (0.5 * y0 + ed * (1.0 - std::exp(-mu * t * eta))) / gain;
        return gllp(gain, e, 1.0 - std::exp(-mu) * (1.0 + mu));
    }

    double decoy(double mu, double t) const
    {
        const double gain = 1.0 - (1.0 - y0) * std::exp(-mu * t * eta);
        const double e = (0.5 * y0 + ed * (1.0 - std::exp(-mu * t * eta))) / gain;
        const double y1 = y0 + t * eta;
        const double e1 = (0.5 * y0 + ed * t * eta) / y1;
        return std::max(0.0, q * (-gain * f * h(e) + mu * std::exp(-mu) * y1 * (1 - h(e1))));
    }

    template <class F>
    static double best_over_mu(F&& rate)
    {
        double best = 0.0;
        for (int i = 1; i <= 3000; ++i) {
            best = std::max(best, rate(1.5 * i / 3000.0));
        }
        return best;
    }
};

Criterion qkd_criterion()
{
    Criterion c("QKD: SPS vs decoy crossing, orderings, free space");
    const HandRates hand;
    auto transmittance = [](double km) { return std::pow(10.0, -0.21 * km / 10.0); };
    auto diff = [&](double km) {
        const double t = transmittance(km);
        return hand.sps(0.513, 0.018, t) - HandRates::best_over_mu([&](double mu) { return hand.decoy(mu, t); });
    };
    double oracle_km = std::numeric_limits<double>::quiet_NaN();
    double prev = diff(0.0);
    for (double d = 0.05; d <= 200.0; d += 0.05) {
        const double now = diff(d);
        if ((prev > 0.0 && now < 0.0) || (prev < 0.0 && now > 0.0)) {
            oracle_km = d;
            break;
        }
        prev = now;
    }

    const qkd::Scenario sc;
    double lib_loss = std::numeric_limits<double>::quiet_NaN();
    double lib_km = lib_loss;
    try {
        const auto x = qkd::find_crossing(sc.sps, sc.decoy, sc.channel, sc.detector);
        lib_loss = x.loss_db;
        lib_km = x.distance_km;
    } catch (const NumericalError& e) {
        c.check(false, fmt::format("library crossing: {}", e.what()));
    }
    c.check(std::abs(lib_km - oracle_km) <= 0.05,
            fmt::format("library crossing {:.3f} km vs hand-formula scan {:.2f} km", lib_km, oracle_km));
    c.check(rel(lib_loss, 8.82, 0.15), fmt::format("fiber crossing loss {:.3f} dB, 8.82 +- 15%", lib_loss));

    const auto rows = qkd::sweep(sc, 0.0, 200.0, 0.5);
    int below_wcs = 0;
    int hand_below_wcs = 0;
    double first = std::numeric_limits<double>::quiet_NaN();
    int ideal_violations = 0;
    int monotone = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (r.rate_sps < r.rate_wcs && below_wcs++ == 0) {
            first = r.distance_km;
        }
        const double t = transmittance(r.distance_km);
        hand_below_wcs +=
            hand.sps(0.513, 0.018, t) < HandRates::best_over_mu([&](double mu) { return hand.wcs(mu, t); });
        ideal_violations += r.rate_ideal < r.rate_sps;
        if (i > 0) {
            const auto& p = rows[i - 1];
            monotone += (r.rate_sps > p.rate_sps) + (r.rate_ideal > p.rate_ideal) + (r.rate_wcs > p.rate_wcs) +
                        (r.rate_decoy > p.rate_decoy);
        }
    }
    c.check(below_wcs == 0, fmt::format("SPS >= WCS at all 401 distances: {} violations, first at {:.1f} km "
                                        "(hand formulas: {} violations)",
                                        below_wcs, first, hand_below_wcs));
    c.check(ideal_violations == 0, fmt::format("ideal >= real SPS: {} violations", ideal_violations));
    c.check(monotone == 0, fmt::format("rates non-increasing in distance: {} violations", monotone));

    qkd::Scenario fs = sc;
    fs.channel.kind = qkd::ChannelKind::freespace;
    try {
        const auto x = qkd::find_crossing(fs.sps, fs.decoy, fs.channel, fs.detector, {0.0, 2000.0, 1.0});
        c.check(rel(x.loss_db, 8.82, 0.15),
                fmt::format("free-space crossing loss {:.3f} dB at {:.1f} km, 8.82 +- 15%", x.loss_db, x.distance_km));
        c.check(std::abs(x.loss_db - lib_loss) < 1e-3, "free-space crossing equals fiber crossing in loss");
    } catch (const NumericalError& e) {
        c.check(false, fmt::format("free-space crossing: {}", e.what()));
    }

    auto loss_at = [&](qkd::DivergenceModel model, double divergence, double km) {
        qkd::ChannelModel ch = fs.channel;
        ch.link.model = model;
        ch.link.divergence_rad = divergence;
        return qkd::channel_loss_db(ch.at(km));
    };
    const double theta = qkd::calibrate_divergence(fs.channel.link, 8.82, 630.0);
    const double calibrated = loss_at(qkd::DivergenceModel::calibrated_linear, theta, 630.0);
    const double gaussian = loss_at(qkd::DivergenceModel::gaussian_far_field, 0.0, 630.0);
    const double friis = loss_at(qkd::DivergenceModel::friis, 0.0, 630.0);
    c.check(std::abs(calibrated - 8.82) < 1e-6 && !rel(gaussian, 8.82, 0.15) && !rel(friis, 8.82, 0.15),
            fmt::format("630 km: calibrated {:.3f} dB (theta {:.3e} rad), gaussian {:.2f} dB, friis {:.2f} dB",
                        calibrated, theta, gaussian, friis));
    return c;
}

Criterion fab_criterion()
{
    Criterion c("fabrication dose map and hemisphere fit");
    const double cal = 0.5;
    const auto map = fab::decode_bmp(fab::encode_bmp(fab::hemisphere_dose_map(2.7, 2.7, 20.0, cal)));
    const int mid = map.width / 2;
    double worst = 0.0;
    for (int y = 0; y < map.height; ++y) {
        for (int x = 0; x < map.width; ++x) {
            const double r = std::hypot((x - mid) * 20.0, (y - mid) * 20.0);
            const double target = r < 1350.0 ? std::sqrt(2700.0 * 2700.0 - r * r) - std::sqrt(2700.0 * 2700.0 - 1350.0 * 1350.0) : 0.0;
            worst = std::max(worst, std::abs(fab::decode_units(map.at(x, y)) * cal - target));
        }
    }
    c.check(worst <= cal, fmt::format("BMP round-trip decode error {:.3f} nm <= one quantum ({} nm)", worst, cal));

    std::mt19937_64 rng(99);
    int classified = 0;
    int radius_ok = 0;
    const int trials = 50;
    for (int i = 0; i < trials; ++i) {
        const auto smooth = fab::fit_hemisphere_profile(synthetic::hemisphere_profile(2.7, 2.7, 0.1, 400, 0.5, rng));
        const auto rough = fab::fit_hemisphere_profile(synthetic::hemisphere_profile(2.7, 2.7, 0.1, 400, 3.0, rng));
        classified += smooth.ideal && !rough.ideal;
        radius_ok += rel(smooth.radius_um, 2.7, 0.01);
    }
    c.check(classified == trials, fmt::format("rms < 1 nm classification: {}/{}", classified, trials));
    c.check(radius_ok == trials, fmt::format("radius within 1% at 0.5 nm roughness: {}/{}", radius_ok, trials));
    return c;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Criterion determinism_criterion(const std::string& cli, const fs::path& scratch)
{
    Criterion c("reproduce twice gives byte-identical outputs");
    fs::remove_all(scratch);
    fs::create_directories(scratch);
    // Both runs use the same output path so the printed file list matches.
    for (const char* run : {"a", "b"}) {
        const std::string cmd = fmt::format("\"{}\" reproduce --out \"{}\" > \"{}\"", cli, (scratch / "out").string(),
                                            (scratch / (std::string(run) + ".stdout")).string());
        const int status = std::system(cmd.c_str());
        c.check(status == 0, fmt::format("run {} exit status {}", run, status));
        fs::rename(scratch / "out", scratch / run);
    }
    int compared = 0;
    for (const auto& entry : fs::directory_iterator(scratch / "a")) {
        const auto other = scratch / "b" / entry.path().filename();
        const bool same = fs::exists(other) && slurp(entry.path()) == slurp(other);
        c.check(same, fmt::format("{} identical", entry.path().filename().string()));
        ++compared;
    }
    c.check(compared >= 2, fmt::format("{} output files compared", compared));
    c.check(slurp(scratch / "a.stdout") == slurp(scratch / "b.stdout"), "printed tables identical");
    return c;
}

}  // namespace

int main(int argc, char** argv)
{
    if (argc < 3) {
        std::fprintf(stderr, "usage: acceptance <spskit CLI> <scratch directory>\n");
        return 2;
    }
    const std::vector<Criterion> criteria = {coating_criterion(),
                                             cavity_criterion(),
                                             penetration_criterion(),
                                             mode_volume_criterion(),
                                             purcell_criterion(),
                                             indistinguishability_criterion(),
                                             fitting_criterion(),
                                             qkd_criterion(),
                                             fab_criterion(),
                                             determinism_criterion(argv[1], argv[2])};
    int passed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        passed += criteria[i].print(static_cast<int>(i + 1));
    }
    std::printf("%d of %zu criteria pass\n", passed, criteria.size());
    return passed == static_cast<int>(criteria.size()) ? 0 : 1;
}
