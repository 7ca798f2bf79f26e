#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "spskit/cavitymode.hpp"
#include "spskit/constants.hpp"
#include "spskit/emitter.hpp"
#include "spskit/error.hpp"
#include "spskit/fab.hpp"
#include "spskit/io.hpp"
#include "spskit/optics.hpp"
#include "spskit/qkd.hpp"
#include "spskit/reproduction.hpp"
#include "spskit/scenario.hpp"
#include "spskit/specfit.hpp"
#include "spskit/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace spskit;

namespace {

struct Common
{
    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_dir = "out";
    bool error_json = false;
};

// Outputs are collected in memory and written only after the whole command
// succeeded.
class Outputs
{
public:
    explicit Outputs(io::Stamp stamp) : stamp_(std::move(stamp)) {}

    void csv(const std::string& name, const io::Table& table) { text_.emplace_back(name, io::csv_text(table, stamp_)); }
    void report(const std::string& name, json body) { text_.emplace_back(name, io::stamped(std::move(body), stamp_).dump(2) + "\n"); }
    void text(const std::string& name, std::string content) { text_.emplace_back(name, std::move(content)); }
    void bytes(const std::string& name, std::vector<std::uint8_t> content) { bytes_.emplace_back(name, std::move(content)); }

    void write(const fs::path& dir) const
    {
        for (const auto& [name, content] : text_) {
            io::write_file_atomic(dir / name, content);
            std::cout << (dir / name).string() << "\n";
        }
        for (const auto& [name, content] : bytes_) {
            io::write_file_atomic(dir / name, content);
            std::cout << (dir / name).string() << "\n";
        }
    }

    const io::Stamp& stamp() const { return stamp_; }

private:
    io::Stamp stamp_;
    std::vector<std::pair<std::string, std::string>> text_;
    std::vector<std::pair<std::string, std::vector<std::uint8_t>>> bytes_;
};

json nullable(double v)
{
    return std::isfinite(v) ? json(v) : json();
}

json band_json(const std::optional<optics::Band>& band)
{
    if (!band) {
        return json();
    }
    return {{"lower_nm", band->lower_nm}, {"upper_nm", band->upper_nm}, {"width_nm", band->width_nm()}};
}

json report_json(const specfit::FitReport& r)
{
    json params = json::array();
    for (const auto& p : r.parameters) {
        params.push_back({{"name", p.name},
                          {"value", nullable(p.value)},
                          {"uncertainty", nullable(p.uncertainty)},
                          {"formatted", specfit::format_with_uncertainty(p.value, p.uncertainty)}});
    }
    return {{"parameters", params},
            {"chi_squared", nullable(r.chi_squared)},
            {"reduced_chi_squared", nullable(r.reduced_chi_squared)},
            {"residual_norm", nullable(r.residual_norm)},
            {"iterations", r.iterations},
            {"warnings", r.warnings}};
}

void run_mirror(const scenario::Config& config, Outputs& out)
{
    const optics::LayerStack stack = scenario::coating_from(config);
    const auto grid = optics::wavelength_grid(config.get_double("stack.scan_start_nm"),
                                              config.get_double("stack.scan_stop_nm"),
                                              config.get_double("stack.scan_step_nm"));
    io::Table table{{"wavelength_nm", "reflectance", "transmittance"}, {}};
    for (double wl : grid) {
        const auto r = optics::response(stack, wl);
        table.rows.push_back({wl, r.reflectance, r.transmittance});
    }
    const double design = config.get_double("stack.design_wavelength_nm");
    const double threshold = config.get_double("stack.stopband_threshold");
    const optics::Mirror mirror{stack};
    const auto ar = optics::make_quarter_wave_coating(config.get_double("stack.ar_index"), design,
                                                      config.get_double("stack.ambient_index"),
                                                      config.get_double("stack.substrate_index"));
    out.csv("mirror_reflectance.csv", table);
    out.report("mirror.json", {{"layers", stack.layers.size()},
                               {"total_thickness_nm", stack.total_thickness_nm()},
                               {"design_wavelength_nm", design},
                               {"reflectance_at_design", optics::response(stack, design).reflectance},
                               {"stopband_threshold", threshold},
                               {"stopband", band_json(optics::stopband(stack, threshold, design))},
                               {"cavity_stopband", band_json(optics::cavity_stopband(mirror, mirror, threshold, design))},
                               {"ar_reflectance_at_design", optics::response(ar, design).reflectance}});
}

void run_cavity(const scenario::Config& config, Outputs& out)
{
    const optics::LayerStack stack = scenario::coating_from(config);
    const cavitymode::CavityConfig cav = scenario::cavity_from(config);
    const double lambda = cav.design_wavelength_nm;
    const optics::Mirror mirror{stack, optics::loss_for_reflectance(stack, lambda, cav.mirror_reflectivity)};
    const double gap = optics::resonant_gap(mirror, mirror, cav.q, lambda);
    const auto spectrum = optics::cavity_spectrum(
        mirror, gap, mirror,
        optics::wavelength_grid(config.get_double("cavity.spectrum_start_nm"),
                                config.get_double("cavity.spectrum_stop_nm"),
                                config.get_double("cavity.spectrum_step_nm")),
        lambda);
    io::Table table{{"wavelength_nm", "transmission", "reflection"}, {}};
    for (std::size_t i = 0; i < spectrum.transmission.samples.size(); ++i) {
        table.rows.push_back({spectrum.transmission.samples[i].wavelength_nm, spectrum.transmission.samples[i].value,
                              spectrum.reflection.samples[i].value});
    }

    const optics::Mirror ideal{stack};
    const double ideal_gap = optics::resonant_gap(ideal, ideal, cav.q, lambda);
    const auto field = optics::intracavity_field(stack, ideal_gap, stack, lambda, config.get_double("cavity.field_step_nm"));
    io::Table field_table{{"position_nm", "intensity"}, {}};
    for (const auto& s : field.samples) {
        field_table.rows.push_back({s.position_nm, s.intensity});
    }

    json resonance;
    if (spectrum.resonance) {
        resonance = {{"center_nm", spectrum.resonance->center_nm},
                     {"fwhm_nm", spectrum.resonance->fwhm_nm},
                     {"quality_factor", spectrum.resonance->quality_factor},
                     {"peak_transmission", spectrum.resonance->peak_transmission}};
    }
    const auto spacing = cavitymode::fsr_finesse_linewidth(cav);
    const double voltage = config.get_double("cavity.voltage_v");
    const auto tuning = cavitymode::tune(cav, voltage);
    out.csv("cavity_spectrum.csv", table);
    out.csv("cavity_field.csv", field_table);
    out.report("cavity.json",
               {{"q", cav.q},
                {"wavelength_nm", lambda},
                {"mirror_reflectivity", cav.mirror_reflectivity},
                {"resonant_gap_nm", gap},
                {"resonance", resonance},
                {"penetration_depth_nm", optics::penetration_depth(cav.q, lambda, ideal_gap)},
                {"antinodes_in_gap", field.antinodes_in_gap()},
                {"mode_volume_lambda3", cavitymode::mode_volume(cav)},
                {"waist_nm", cavitymode::waist_nm(cav)},
                {"effective_length_nm", cav.effective_length_nm()},
                {"fsr_ghz", spacing.fsr_ghz},
                {"finesse", spacing.finesse},
                {"linewidth_hz", spacing.linewidth_hz},
                {"quality_factor", spacing.quality_factor},
                {"tuning", {{"voltage_v", voltage},
                            {"delta_length_nm", tuning.delta_length_nm},
                            {"delta_wavelength_nm", tuning.delta_wavelength_nm}}}});
}

void run_emitter(const scenario::Config& config, Outputs& out)
{
    const emitter::EmitterPhotophysics e = scenario::emitter_from(config);
    const double cavity_linewidth = config.get_double("emitter.cavity_linewidth_nm");
    const auto purcell = emitter::effective_purcell(e.zpl_wavelength_nm, cavity_linewidth, e.free_linewidth_nm,
                                                    config.get_double("emitter.mode_volume_lambda3"));
    const double eta = emitter::quantum_efficiency(config.get_double("emitter.lifetime_ratio"), purcell.purcell,
                                                   config.get_double("emitter.mirror_purcell"));
    const double gamma = e.emission_rate();
    const double gamma_star = config.get_double("emitter.dephasing_rate_hz");
    const double kappa = config.get_double("emitter.cavity_kappa_hz");
    const double target = config.get_double("emitter.target_indistinguishability");
    const double kappa_target =
        emitter::kappa_for_target_indistinguishability(gamma, gamma_star, config.get_double("emitter.coupling_g_hz"), target);

    json conventions = json::array();
    for (const auto& c : emitter::compare_conventions(e, purcell.purcell, kappa, gamma_star)) {
        conventions.push_back({{"convention", c.convention == emitter::RateConvention::plain_frequency ? "plain_frequency" : "angular"},
                               {"gamma", c.rates.gamma},
                               {"gamma_star", c.rates.gamma_star},
                               {"kappa", c.rates.kappa},
                               {"g", c.rates.g},
                               {"indistinguishability", c.indistinguishability}});
    }

    emitter::MapGrid grid;
    grid.g_min_hz = grid.kappa_min_hz = config.get_double("emitter.map_min_hz");
    grid.g_max_hz = grid.kappa_max_hz = config.get_double("emitter.map_max_hz");
    grid.g_points = grid.kappa_points = config.get_int("emitter.map_points");
    io::Table map{{"g_hz", "kappa_hz", "indistinguishability"}, {}};
    for (const auto& p : emitter::indistinguishability_map(gamma, gamma_star, grid)) {
        map.rows.push_back({p.g_hz, p.kappa_hz, p.indistinguishability});
    }

    out.csv("emitter_map.csv", map);
    out.report("emitter.json",
               {{"rate_convention", "plain_frequency"},
                {"gamma_hz", gamma},
                {"gamma_star_hz", gamma_star},
                {"q_eff", purcell.q_eff},
                {"purcell", purcell.purcell},
                {"quantum_efficiency", eta},
                {"indistinguishability_free", emitter::indistinguishability_free(gamma, gamma_star)},
                {"indistinguishability_cavity", conventions},
                {"target_indistinguishability", target},
                {"kappa_for_target_hz", kappa_target},
                {"fsr_for_target_ghz_at_r9995", cavitymode::fsr_for_linewidth_ghz(0.9995, kappa_target)},
                {"cavity_linewidth_nm", cavity_linewidth}});
}

void run_fit(const scenario::Config& config, Outputs& out)
{
    const std::string& input = config.get("fit.input");
    if (input.empty()) {
        throw ValidationError("fit.input is required (use --input or --set fit.input=<file>)");
    }
    const auto kind = specfit::series_kind_from_string(config.get("fit.kind"));
    const auto series = io::read_series(input, kind);
    json body{{"kind", specfit::to_string(series.kind)}, {"input", input}, {"points", series.x.size()}};

    switch (series.kind) {
    case specfit::SeriesKind::spectrum: {
        std::optional<specfit::Sinc2Instrument> instrument;
        if (const double zero = config.get_double("fit.instrument_first_zero_nm"); zero > 0.0) {
            instrument = specfit::Sinc2Instrument{zero};
        }
        const auto fit = specfit::fit_lorentzian(series, instrument);
        specfit::ZplOptions zpl;
        zpl.upper_nm = config.get_double("fit.zpl_upper_nm");
        zpl.window_fwhm = config.get_double("fit.zpl_window_fwhm");
        body["center_nm"] = fit.center_nm;
        body["fwhm_nm"] = fit.fwhm_nm;
        body["zpl_fraction"] = specfit::zpl_fraction(series, fit, zpl);
        body["report"] = report_json(fit.report);
        break;
    }
    case specfit::SeriesKind::decay: {
        const std::string& irf_path = config.get("fit.irf");
        if (irf_path.empty()) {
            throw ValidationError("decay fits need fit.irf (use --irf)");
        }
        const auto fit = specfit::fit_decay_with_irf(series, io::read_series(irf_path, specfit::SeriesKind::decay));
        body["irf"] = irf_path;
        body["lifetime_ps"] = fit.lifetime_ps;
        body["report"] = report_json(fit.report);
        break;
    }
    case specfit::SeriesKind::correlation: {
        const auto fit = specfit::fit_g2(series);
        body["g2_0"] = fit.g2_0;
        body["g2_0_uncertainty"] = fit.g2_0_uncertainty;
        body["bunching"] = fit.bunching;
        if (const double snr = config.get_double("fit.snr"); snr > 0.0) {
            body["g2_0_background_corrected"] = specfit::correct_g2_background(fit.g2_0, snr);
        }
        body["report"] = report_json(fit.report);
        break;
    }
    case specfit::SeriesKind::polarization: {
        const auto fit = specfit::fit_polarization(series);
        body["dop"] = fit.dop;
        body["dop_uncertainty"] = fit.dop_uncertainty;
        body["axis_deg"] = fit.axis_deg;
        body["flat"] = fit.flat;
        body["report"] = report_json(fit.report);
        break;
    }
    case specfit::SeriesKind::saturation: {
        const auto fit = specfit::fit_saturation(series);
        body["saturation_power"] = fit.saturation_power;
        body["max_rate"] = fit.max_rate;
        body["report"] = report_json(fit.report);
        break;
    }
    }
    out.report("fit.json", body);
}

json crossing_json(const qkd::SourceModel& a, const qkd::SourceModel& b, const qkd::Scenario& sc, double stop_km)
{
    try {
        const auto c = qkd::find_crossing(a, b, sc.channel, sc.detector, {0.0, stop_km, 0.5});
        return {{"distance_km", c.distance_km}, {"loss_db", c.loss_db}, {"transmittance", c.transmittance}};
    } catch (const NumericalError& e) {
        return {{"distance_km", nullptr}, {"message", e.what()}};
    }
}

void run_qkd(const scenario::Config& config, Outputs& out)
{
    const qkd::Scenario sc = scenario::qkd_from(config);
    const double start = config.get_double("qkd.sweep_start_km");
    const double stop = config.get_double("qkd.sweep_stop_km");
    const double step = config.get_double("qkd.sweep_step_km");
    io::Table table{{"distance_km", "loss_db", "rate_sps", "rate_ideal_sps", "rate_wcs", "rate_decoy", "mu_wcs",
                     "mu_decoy"},
                    {}};
    for (const auto& r : qkd::sweep(sc, start, stop, step)) {
        table.rows.push_back(
            {r.distance_km, r.loss_db, r.rate_sps, r.rate_ideal, r.rate_wcs, r.rate_decoy, r.mu_wcs, r.mu_decoy});
    }
    const double crossing_stop = std::max(config.get_double("qkd.crossing_stop_km"), stop);
    json body{{"channel", config.get("qkd.channel")},
              {"sweep", {{"start_km", start}, {"stop_km", stop}, {"step_km", step}, {"rows", table.rows.size()}}},
              {"crossing_sps_decoy", crossing_json(sc.sps, sc.decoy, sc, crossing_stop)},
              {"crossing_sps_wcs", crossing_json(sc.sps, sc.wcs, sc, crossing_stop)},
              {"formulas", qkd::formulas()}};
    if (sc.channel.kind == qkd::ChannelKind::freespace) {
        body["divergence_model"] = qkd::to_string(sc.channel.link.model);
        if (sc.channel.link.model == qkd::DivergenceModel::calibrated_linear) {
            body["divergence_rad"] = sc.channel.link.divergence_rad;
            body["calibrated"] = true;
        }
    }
    out.csv("qkd_sweep.csv", table);
    out.report("qkd.json", body);
}

void run_fab(const scenario::Config& config, Outputs& out)
{
    const auto calibration = config.get_optional_double("fab.calibration_nm_per_unit");
    if (!calibration) {
        throw ValidationError("fab.calibration_nm_per_unit is required (use --calibration)");
    }
    const double radius = config.get_double("fab.radius_um");
    const double aperture = config.get_double("fab.aperture_um");
    const auto map = fab::hemisphere_dose_map(radius, aperture, config.get_double("fab.pitch_nm"), *calibration);
    const int c = map.width / 2;
    json body{{"width_px", map.width},
              {"height_px", map.height},
              {"pitch_nm", map.pitch_nm},
              {"calibration_nm_per_unit", map.calibration_nm_per_unit},
              {"radius_um", radius},
              {"aperture_um", aperture},
              {"apex_units", fab::decode_units(map.at(c, c))},
              {"apex_depth_nm", map.depth_nm(c, c)},
              {"target_apex_depth_nm", fab::target_depth_nm(radius, aperture, 0.0)}};
    if (const std::string& profile = config.get("fab.profile"); !profile.empty()) {
        fab::ProfileFitOptions options;
        options.edge_exclusion = config.get_double("fab.edge_exclusion");
        options.ideal_rms_nm = config.get_double("fab.ideal_rms_nm");
        const auto fit = fab::fit_hemisphere_profile(io::parse_profile(io::read_text(profile)), options);
        body["profile_fit"] = {{"input", profile},
                               {"radius_um", fit.radius_um},
                               {"center_x_um", fit.center_x_um},
                               {"center_z_nm", fit.center_z_nm},
                               {"rms_nm", fit.rms_nm},
                               {"points_used", fit.points_used},
                               {"concave", fit.concave},
                               {"ideal", fit.ideal}};
    }
    out.bytes("dose_map.bmp", fab::encode_bmp(map));
    out.report("fab.json", body);
}

void run_reproduce(const scenario::Config& config, Outputs& out)
{
    const auto report = reproduction::run(config);
    const std::string table = report.table();
    std::cout << table;
    out.text("reproduce.txt", fmt::format("# spskit {}\n# config_sha256 {}\n{}", out.stamp().version,
                                          out.stamp().config_digest, table));
    out.report("reproduce.json", report.to_json());
}

void add_common(CLI::App& sub, Common& common)
{
    sub.add_option("--config", common.config_path, "INI or JSON scenario file (defaults when omitted)");
    sub.add_option("--set", common.overrides, "override section.key=value (repeatable, wins over the file)");
    sub.add_option("--out", common.out_dir, "output directory")->capture_default_str();
    sub.add_flag("--error-json", common.error_json, "report errors as JSON on stderr");
}

int fail(const Common& common, int code, const std::string& kind, const std::string& message)
{
    if (common.error_json) {
        std::cerr << json{{"error", kind}, {"message", message}, {"exit_code", code}}.dump() << "\n";
    } else {
        std::cerr << "spskit: " << kind << " error: " << message << "\n";
    }
    return code;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Single-photon source device toolkit"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    Common common;
    std::vector<std::string> flag_overrides;
    auto flag = [&](CLI::App* sub, const std::string& name, const std::string& key, const std::string& help) {
        sub->add_option_function<std::string>(
            name, [&flag_overrides, key](const std::string& v) { flag_overrides.push_back(key + "=" + v); }, help);
    };

    using Runner = void (*)(const scenario::Config&, Outputs&);
    std::vector<std::pair<CLI::App*, Runner>> commands;
    auto add = [&](const std::string& name, const std::string& help, Runner runner) {
        CLI::App* sub = app.add_subcommand(name, help);
        add_common(*sub, common);
        commands.emplace_back(sub, runner);
        return sub;
    };

    auto* mirror = add("mirror", "coating reflectance and stopband", run_mirror);
    flag(mirror, "--pairs", "stack.pairs", "quarter-wave pairs");
    flag(mirror, "--stack", "stack.file", "layer-stack file");
    auto* cavity = add("cavity", "cavity spectrum, Q, field and penetration depth", run_cavity);
    flag(cavity, "--q", "cavity.q", "longitudinal order");
    flag(cavity, "--voltage", "cavity.voltage_v", "actuator voltage");
    auto* emit = add("emitter", "Purcell factor, efficiency and indistinguishability", run_emitter);
    flag(emit, "--cavity-linewidth", "emitter.cavity_linewidth_nm", "cavity-filtered linewidth (nm)");
    auto* fit = add("fit", "fit a measurement CSV", run_fit);
    flag(fit, "--kind", "fit.kind", "spectrum|decay|correlation|polarization|saturation");
    flag(fit, "--input", "fit.input", "measurement CSV");
    flag(fit, "--irf", "fit.irf", "IRF CSV for decay fits");
    auto* qkd_cmd = add("qkd", "key-rate sweeps and crossings", run_qkd);
    flag(qkd_cmd, "--channel", "qkd.channel", "fiber|freespace");
    std::string sweep;
    qkd_cmd->add_option("--sweep", sweep, "start:stop:step in km");
    auto* fab_cmd = add("fab", "hemisphere dose map", run_fab);
    flag(fab_cmd, "--calibration", "fab.calibration_nm_per_unit", "depth per RGB unit (nm)");
    flag(fab_cmd, "--profile", "fab.profile", "height profile CSV to fit");
    add("reproduce", "recompute the reference numbers and print a pass/fail table", run_reproduce);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        scenario::Config config =
            common.config_path.empty() ? scenario::Config::defaults() : scenario::Config::load(common.config_path);
        for (const auto& o : common.overrides) {
            config.apply_override(o);
        }
        for (const auto& o : flag_overrides) {
            config.apply_override(o);
        }
        if (!sweep.empty()) {
            std::vector<std::string> parts;
            std::size_t begin = 0;
            for (std::size_t pos; (pos = sweep.find(':', begin)) != std::string::npos; begin = pos + 1) {
                parts.push_back(sweep.substr(begin, pos - begin));
            }
            parts.push_back(sweep.substr(begin));
            if (parts.size() != 3) {
                throw ValidationError(fmt::format("--sweep '{}' is not start:stop:step", sweep));
            }
            config.set("qkd.sweep_start_km", parts[0]);
            config.set("qkd.sweep_stop_km", parts[1]);
            config.set("qkd.sweep_step_km", parts[2]);
        }

        Outputs out({kVersion, config.digest()});
        for (const auto& [sub, runner] : commands) {
            if (sub->parsed()) {
                runner(config, out);
            }
        }
        out.write(common.out_dir);
    } catch (const ValidationError& e) {
        return fail(common, 1, "validation", e.what());
    } catch (const NumericalError& e) {
        return fail(common, 2, "numerical", e.what());
    } catch (const fs::filesystem_error& e) {
        return fail(common, 1, "validation", e.what());
    }
    return 0;
}
