#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "spskit/fab.hpp"
#include "spskit/optics.hpp"
#include "spskit/specfit.hpp"

// File formats: stamped CSV and JSON outputs, measurement and profile CSV
// inputs, layer-stack text files.
namespace spskit::io {

std::string sha256_hex(std::string_view data);

// Version and configuration digest written into every output.
struct Stamp
{
    std::string version;
    std::string config_digest;
};

struct Table
{
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

// "# spskit <version>" and "# config_sha256 <digest>" comment lines, header
// row, then rows formatted with 12 significant digits.
std::string csv_text(const Table& table, const Stamp& stamp);

// Adds schema_version, spskit_version and config_sha256 at the top level.
nlohmann::json stamped(nlohmann::json body, const Stamp& stamp);

// Writes through a temporary file and renames, so a failed run never leaves
// a half-written output behind.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);
void write_file_atomic(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes);

std::string read_text(const std::filesystem::path& path);

// Two-column CSV. An optional leading "# kind: <name>" line sets the series
// kind; otherwise `fallback` is used. The first non-comment line is the
// column header.
specfit::MeasurementSeries parse_series(std::string_view text, specfit::SeriesKind fallback);
specfit::MeasurementSeries read_series(const std::filesystem::path& path, specfit::SeriesKind fallback);

// Two columns x_um, z_nm with a header row.
fab::SurfaceProfile parse_profile(std::string_view text);

// Stack text: optional "# ambient_index=<n>" / "# substrate_index=<n>"
// comments, then one "index, thickness_nm" pair per line, ambient side first.
optics::LayerStack parse_stack(std::string_view text);
std::string format_stack(const optics::LayerStack& stack);

}  // namespace spskit::io
