#include "spskit/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "spskit/error.hpp"
#include "spskit/io.hpp"

namespace spskit::scenario {

namespace {

const KeySpec* find_key(const std::string& key)
{
    const auto& keys = registry();
    const auto it = std::find_if(keys.begin(), keys.end(), [&](const KeySpec& k) { return k.key == key; });
    return it == keys.end() ? nullptr : &*it;
}

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

}  // namespace

std::string to_string(Origin origin)
{
    switch (origin) {
    case Origin::reported: return "reported";
    case Origin::derived: return "derived";
    case Origin::literature: return "literature";
    case Origin::tooling: return "tooling";
    }
    return "unknown";
}

const std::vector<KeySpec>& registry()
{
    using O = Origin;
    static const std::vector<KeySpec> keys = {
        {"stack.n_high", "2.135", O::reported, "TiO2 index at 565 nm (ellipsometry)"},
        {"stack.n_low", "1.521", O::reported, "SiO2 index at 565 nm (ellipsometry)"},
        {"stack.pairs", "9", O::reported, "quarter-wave pairs per mirror"},
        {"stack.design_wavelength_nm", "565", O::reported, "coating design wavelength"},
        {"stack.termination", "low_index_at_substrate", O::derived, "SiO2 against the substrate"},
        {"stack.ambient_index", "1.0", O::tooling, "medium on the coated side"},
        {"stack.substrate_index", "1.5255", O::derived, "from the 4.33 % bare glass reflectance"},
        {"stack.ar_index", "1.390", O::reported, "MgF2 antireflection layer"},
        {"stack.stopband_threshold", "0.99", O::reported, "reflectance defining the stopband"},
        {"stack.scan_start_nm", "450", O::tooling, "reflectance scan start"},
        {"stack.scan_stop_nm", "700", O::tooling, "reflectance scan stop"},
        {"stack.scan_step_nm", "0.5", O::tooling, "reflectance scan step"},
        {"stack.file", "", O::tooling, "optional layer-stack text file replacing the quarter-wave design"},

        {"cavity.radius_of_curvature_um", "2.7", O::reported, "FIB hemisphere radius"},
        {"cavity.q", "8", O::reported, "longitudinal order"},
        {"cavity.wavelength_nm", "565.85", O::reported, "emitter ZPL"},
        {"cavity.mirror_reflectivity", "0.992", O::reported, "effective mirror reflectivity"},
        {"cavity.penetration_depth_nm", "122", O::reported, "field penetration per mirror"},
        {"cavity.include_penetration", "true", O::tooling, "add 2 xi to the length for FSR and Q"},
        {"cavity.tuning_slope_nm_per_v", "102", O::reported, "PDMS compression per volt"},
        {"cavity.min_voltage_v", "-5", O::tooling, "safe actuator range, lower"},
        {"cavity.max_voltage_v", "5", O::tooling, "safe actuator range, upper"},
        {"cavity.voltage_v", "0", O::tooling, "actuator voltage to report"},
        {"cavity.spectrum_start_nm", "555", O::tooling, "transmission scan start"},
        {"cavity.spectrum_stop_nm", "577", O::tooling, "transmission scan stop"},
        {"cavity.spectrum_step_nm", "0.01", O::tooling, "transmission scan step"},
        {"cavity.field_step_nm", "0.5", O::tooling, "field profile sampling"},

        {"emitter.zpl_wavelength_nm", "565.85", O::reported, "ZPL centre"},
        {"emitter.free_linewidth_nm", "5.76", O::reported, "free-space ZPL FWHM"},
        {"emitter.free_lifetime_ps", "897", O::reported, "free-space lifetime"},
        {"emitter.lifetime_ratio", "2.29", O::reported, "free over cavity-coupled lifetime"},
        {"emitter.zpl_fraction", "0.632", O::reported, "ZPL share of emission"},
        {"emitter.dop", "0.904", O::reported, "degree of polarization"},
        {"emitter.cavity_linewidth_nm", "0.224", O::reported, "cavity-filtered emission FWHM"},
        {"emitter.mode_volume_lambda3", "1.76", O::derived, "Gaussian mode volume"},
        {"emitter.mirror_purcell", "1.68", O::reported, "bare-mirror Purcell factor (input constant)"},
        {"emitter.dephasing_rate_hz", "5.41e12", O::derived, "free-space FWHM as a rate"},
        {"emitter.cavity_kappa_hz", "210.6e9", O::derived, "cavity FWHM as a rate"},
        {"emitter.target_indistinguishability", "0.9", O::reported, "threshold for the kappa search"},
        {"emitter.coupling_g_hz", "1e5", O::tooling, "g for the small-coupling kappa search"},
        {"emitter.map_points", "200", O::tooling, "grid points per axis"},
        {"emitter.map_min_hz", "1e6", O::tooling, "lower grid bound for g and kappa"},
        {"emitter.map_max_hz", "1e12", O::tooling, "upper grid bound for g and kappa"},

        {"qkd.channel", "fiber", O::tooling, "fiber or freespace"},
        {"qkd.alpha_db_per_km", "0.21", O::literature, "fiber attenuation"},
        {"qkd.sps_efficiency", "0.513", O::reported, "source quantum efficiency"},
        {"qkd.g2_0", "0.018", O::reported, "cavity-coupled g2(0)"},
        {"qkd.eta", "0.045", O::literature, "receiver efficiency"},
        {"qkd.dark_count", "1.7e-6", O::literature, "dark count probability per pulse"},
        {"qkd.e_det", "0.033", O::literature, "misalignment error"},
        {"qkd.f_ec", "1.22", O::literature, "error-correction inefficiency"},
        {"qkd.q_sift", "0.5", O::literature, "BB84 sifting factor"},
        {"qkd.e0", "0.5", O::literature, "error rate of background counts"},
        {"qkd.mu_mode", "optimized", O::tooling, "optimized or fixed mu for laser sources"},
        {"qkd.wcs_mu", "0.1", O::tooling, "WCS mu in fixed mode"},
        {"qkd.decoy_mu", "0.5", O::tooling, "decoy signal mu in fixed mode"},
        {"qkd.transmit_aperture_m", "0.05", O::reported, "transmitter telescope"},
        {"qkd.receive_aperture_m", "0.60", O::reported, "receiver telescope"},
        {"qkd.wavelength_nm", "565.85", O::reported, "link wavelength"},
        {"qkd.divergence_model", "gaussian", O::tooling, "gaussian, friis or calibrated"},
        {"qkd.divergence_rad", "0", O::tooling, "calibrated model angle; 0 means calibrate to the target"},
        {"qkd.calibration_loss_db", "8.82", O::reported, "loss at the calibration distance"},
        {"qkd.calibration_distance_km", "630", O::reported, "free-space calibration distance"},
        {"qkd.sweep_start_km", "0", O::tooling, "sweep start"},
        {"qkd.sweep_stop_km", "200", O::tooling, "sweep stop"},
        {"qkd.sweep_step_km", "0.5", O::tooling, "sweep step"},
        {"qkd.crossing_stop_km", "200", O::tooling, "upper end of the crossing search (at least the sweep stop)"},

        {"fit.kind", "spectrum", O::tooling, "spectrum, decay, correlation, polarization or saturation"},
        {"fit.input", "", O::tooling, "measurement CSV"},
        {"fit.irf", "", O::tooling, "IRF CSV for decay fits"},
        {"fit.instrument_first_zero_nm", "0", O::tooling, "sinc2 instrument first zero; 0 disables"},
        {"fit.zpl_upper_nm", "580", O::reported, "upper integration bound for the ZPL fraction"},
        {"fit.zpl_window_fwhm", "10", O::tooling, "ZPL integration half-window in FWHM"},
        {"fit.snr", "0", O::tooling, "signal-to-noise for background correction; 0 disables"},

        {"fab.radius_um", "2.7", O::reported, "hemisphere radius"},
        {"fab.aperture_um", "2.7", O::reported, "hemisphere aperture"},
        {"fab.pitch_nm", "20", O::tooling, "dose-map pixel pitch"},
        {"fab.calibration_nm_per_unit", "", O::tooling, "depth per RGB unit; required"},
        {"fab.profile", "", O::tooling, "optional height profile CSV to fit"},
        {"fab.edge_exclusion", "0.1", O::tooling, "outer fraction excluded from the fit"},
        {"fab.ideal_rms_nm", "1.0", O::reported, "rms threshold for an ideal hemisphere"},
    };
    return keys;
}

Config Config::defaults()
{
    Config c;
    for (const auto& k : registry()) {
        c.values_[k.key] = k.default_value;
    }
    return c;
}

void Config::set(const std::string& key, const std::string& value)
{
    if (!find_key(key)) {
        throw ValidationError(fmt::format("unknown configuration key '{}'", key));
    }
    values_[key] = value;
}

void Config::apply_override(std::string_view assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos) {
        throw ValidationError(fmt::format("override '{}' is not of the form section.key=value", assignment));
    }
    set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

Config Config::parse_ini(std::string_view text)
{
    boost::property_tree::ptree tree;
    std::istringstream in{std::string(text)};
    try {
        boost::property_tree::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ValidationError(fmt::format("config parse error: {}", e.message()));
    }
    Config c = defaults();
    for (const auto& [section, body] : tree) {
        if (body.empty()) {
            throw ValidationError(fmt::format("key '{}' is outside any [section]", section));
        }
        for (const auto& [name, value] : body) {
            c.set(section + "." + name, trim(value.data()));
        }
    }
    return c;
}

Config Config::parse_json(std::string_view text)
{
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(fmt::format("config parse error: {}", e.what()));
    }
    if (!doc.is_object()) {
        throw ValidationError("JSON config must be an object of sections");
    }
    Config c = defaults();
    for (const auto& [section, body] : doc.items()) {
        if (!body.is_object()) {
            throw ValidationError(fmt::format("JSON config section '{}' must be an object", section));
        }
        for (const auto& [name, value] : body.items()) {
            c.set(section + "." + name, value.is_string() ? value.get<std::string>() : value.dump());
        }
    }
    return c;
}

Config Config::load(const std::filesystem::path& path)
{
    if (!std::filesystem::exists(path)) {
        throw ValidationError(fmt::format("config file '{}' does not exist", path.string()));
    }
    const std::string text = io::read_text(path);
    return path.extension() == ".json" ? parse_json(text) : parse_ini(text);
}

const std::string& Config::get(const std::string& key) const
{
    const auto it = values_.find(key);
    if (it == values_.end()) {
        throw ValidationError(fmt::format("unknown configuration key '{}'", key));
    }
    return it->second;
}

double Config::get_double(const std::string& key) const
{
    const std::string& s = get(key);
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw ValidationError(fmt::format("{} = '{}' is not a number", key, s));
    }
    return v;
}

int Config::get_int(const std::string& key) const
{
    const std::string& s = get(key);
    int v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw ValidationError(fmt::format("{} = '{}' is not an integer", key, s));
    }
    return v;
}

bool Config::get_bool(const std::string& key) const
{
    const std::string& s = get(key);
    if (s == "true" || s == "1" || s == "yes") {
        return true;
    }
    if (s == "false" || s == "0" || s == "no") {
        return false;
    }
    throw ValidationError(fmt::format("{} = '{}' is not a boolean", key, s));
}

std::optional<double> Config::get_optional_double(const std::string& key) const
{
    if (get(key).empty()) {
        return std::nullopt;
    }
    return get_double(key);
}

std::string Config::canonical() const
{
    std::string out;
    for (const auto& [k, v] : values_) {
        out += k + "=" + v + "\n";
    }
    return out;
}

std::string Config::digest() const
{
    return io::sha256_hex(canonical());
}

optics::Termination termination_from(const Config& config)
{
    const std::string& t = config.get("stack.termination");
    if (t == "low_index_at_substrate") {
        return optics::Termination::low_index_at_substrate;
    }
    if (t == "high_index_at_substrate") {
        return optics::Termination::high_index_at_substrate;
    }
    throw ValidationError(fmt::format("stack.termination = '{}' is not low_index_at_substrate or "
                                      "high_index_at_substrate",
                                      t));
}

optics::LayerStack coating_from(const Config& config)
{
    if (!config.get("stack.file").empty()) {
        return io::parse_stack(io::read_text(config.get("stack.file")));
    }
    return optics::make_quarter_wave_stack(config.get_double("stack.n_high"), config.get_double("stack.n_low"),
                                           config.get_int("stack.pairs"),
                                           config.get_double("stack.design_wavelength_nm"), termination_from(config),
                                           config.get_double("stack.ambient_index"),
                                           config.get_double("stack.substrate_index"));
}

cavitymode::CavityConfig cavity_from(const Config& config)
{
    cavitymode::CavityConfig c;
    c.radius_of_curvature_um = config.get_double("cavity.radius_of_curvature_um");
    c.q = config.get_int("cavity.q");
    c.design_wavelength_nm = config.get_double("cavity.wavelength_nm");
    c.penetration_depth_nm = config.get_double("cavity.penetration_depth_nm");
    c.mirror_reflectivity = config.get_double("cavity.mirror_reflectivity");
    c.tuning_slope_nm_per_v = config.get_double("cavity.tuning_slope_nm_per_v");
    c.min_voltage_v = config.get_double("cavity.min_voltage_v");
    c.max_voltage_v = config.get_double("cavity.max_voltage_v");
    c.include_penetration = config.get_bool("cavity.include_penetration");
    c.validate();
    return c;
}

emitter::EmitterPhotophysics emitter_from(const Config& config)
{
    emitter::EmitterPhotophysics e;
    e.zpl_wavelength_nm = config.get_double("emitter.zpl_wavelength_nm");
    e.free_linewidth_nm = config.get_double("emitter.free_linewidth_nm");
    e.free_lifetime_ps = config.get_double("emitter.free_lifetime_ps");
    e.zpl_fraction = config.get_double("emitter.zpl_fraction");
    e.dop = config.get_double("emitter.dop");
    e.validate();
    return e;
}

qkd::DetectorModel detector_from(const Config& config)
{
    qkd::DetectorModel d;
    d.eta = config.get_double("qkd.eta");
    d.dark_count = config.get_double("qkd.dark_count");
    d.e_det = config.get_double("qkd.e_det");
    d.f_ec = config.get_double("qkd.f_ec");
    d.q_sift = config.get_double("qkd.q_sift");
    d.e0 = config.get_double("qkd.e0");
    d.validate();
    return d;
}

qkd::ChannelModel channel_from(const Config& config)
{
    qkd::ChannelModel c;
    const std::string& kind = config.get("qkd.channel");
    if (kind == "fiber") {
        c.kind = qkd::ChannelKind::fiber;
    } else if (kind == "freespace") {
        c.kind = qkd::ChannelKind::freespace;
    } else {
        throw ValidationError(fmt::format("qkd.channel = '{}' is not fiber or freespace", kind));
    }
    c.alpha_db_per_km = config.get_double("qkd.alpha_db_per_km");
    c.link.transmit_aperture_m = config.get_double("qkd.transmit_aperture_m");
    c.link.receive_aperture_m = config.get_double("qkd.receive_aperture_m");
    c.link.wavelength_nm = config.get_double("qkd.wavelength_nm");
    const std::string& model = config.get("qkd.divergence_model");
    if (model == "gaussian") {
        c.link.model = qkd::DivergenceModel::gaussian_far_field;
    } else if (model == "friis") {
        c.link.model = qkd::DivergenceModel::friis;
    } else if (model == "calibrated") {
        c.link.model = qkd::DivergenceModel::calibrated_linear;
        c.link.divergence_rad = config.get_double("qkd.divergence_rad");
        if (c.link.divergence_rad == 0.0) {
            c.link.divergence_rad = qkd::calibrate_divergence(c.link, config.get_double("qkd.calibration_loss_db"),
                                                              config.get_double("qkd.calibration_distance_km"));
        }
    } else {
        throw ValidationError(fmt::format("qkd.divergence_model = '{}' is not gaussian, friis or calibrated", model));
    }
    c.validate();
    return c;
}

qkd::Scenario qkd_from(const Config& config)
{
    qkd::Scenario s;
    s.sps = qkd::SourceModel::real_sps(config.get_double("qkd.sps_efficiency"), config.get_double("qkd.g2_0"));
    const std::string& mode = config.get("qkd.mu_mode");
    if (mode != "optimized" && mode != "fixed") {
        throw ValidationError(fmt::format("qkd.mu_mode = '{}' is not optimized or fixed", mode));
    }
    const auto mu_mode = mode == "optimized" ? qkd::MuMode::optimized : qkd::MuMode::fixed;
    s.wcs = qkd::SourceModel::wcs(config.get_double("qkd.wcs_mu"), mu_mode);
    s.decoy = qkd::SourceModel::decoy(config.get_double("qkd.decoy_mu"), mu_mode);
    s.sps.validate();
    s.wcs.validate();
    s.decoy.validate();
    s.channel = channel_from(config);
    s.detector = detector_from(config);
    return s;
}

}  // namespace spskit::scenario
