#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spskit/cavitymode.hpp"
#include "spskit/emitter.hpp"
#include "spskit/optics.hpp"
#include "spskit/qkd.hpp"

// Flat, sectioned key=value configuration with a fixed key registry. Every
// key carries its default and where the default comes from.
namespace spskit::scenario {

enum class Origin
{
    reported,  // value taken from the device characterization
    derived,   // computed from reported values
    literature,  // standard detector/link parameters
    tooling,   // numerical or output setting
};

std::string to_string(Origin origin);

struct KeySpec
{
    std::string key;  // "section.name"
    std::string default_value;
    Origin origin = Origin::tooling;
    std::string note;
};

const std::vector<KeySpec>& registry();

class Config
{
public:
    static Config defaults();
    // INI unless the extension is .json. Unknown keys are rejected.
    static Config load(const std::filesystem::path& path);
    static Config parse_ini(std::string_view text);
    static Config parse_json(std::string_view text);

    void set(const std::string& key, const std::string& value);
    // "section.key=value"
    void apply_override(std::string_view assignment);

    const std::string& get(const std::string& key) const;
    double get_double(const std::string& key) const;
    int get_int(const std::string& key) const;
    bool get_bool(const std::string& key) const;
    std::optional<double> get_optional_double(const std::string& key) const;

    // Sorted "key=value" lines; the digest is SHA-256 of this text.
    std::string canonical() const;
    std::string digest() const;
    const std::map<std::string, std::string>& values() const { return values_; }

private:
    std::map<std::string, std::string> values_;
};

optics::LayerStack coating_from(const Config& config);
optics::Termination termination_from(const Config& config);
cavitymode::CavityConfig cavity_from(const Config& config);
emitter::EmitterPhotophysics emitter_from(const Config& config);
qkd::DetectorModel detector_from(const Config& config);
qkd::ChannelModel channel_from(const Config& config);
qkd::Scenario qkd_from(const Config& config);

}  // namespace spskit::scenario
