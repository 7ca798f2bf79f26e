#include "spskit/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "spskit/error.hpp"
#include "spskit/version.hpp"

namespace spskit::io {

namespace {

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view line, char sep)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        out.push_back(trim(line.substr(start, pos - start)));
        if (pos == std::string_view::npos) {
            break;
        }
        start = pos + 1;
    }
    return out;
}

double parse_number(const std::string& s, std::size_t line_no)
{
    double v = 0.0;
    const auto* end = s.data() + s.size();
    const auto res = std::from_chars(s.data(), end, v);
    if (res.ec != std::errc() || res.ptr != end) {
        throw ValidationError(fmt::format("line {}: '{}' is not a number", line_no, s));
    }
    return v;
}

std::vector<std::string> lines_of(std::string_view text)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto pos = text.find('\n', start);
        out.push_back(std::string(text.substr(start, pos - start)));
        if (pos == std::string_view::npos) {
            break;
        }
        start = pos + 1;
    }
    return out;
}

// Rows of two numbers after one header line; '#' lines are comments.
std::vector<std::pair<double, double>> two_columns(std::string_view text, std::vector<std::string>* comments)
{
    std::vector<std::pair<double, double>> rows;
    bool header_seen = false;
    std::size_t line_no = 0;
    for (const auto& raw : lines_of(text)) {
        ++line_no;
        const std::string line = trim(raw);
        if (line.empty()) {
            continue;
        }
        if (line[0] == '#') {
            if (comments) {
                comments->push_back(trim(std::string_view(line).substr(1)));
            }
            continue;
        }
        if (!header_seen) {
            header_seen = true;
            continue;
        }
        const auto cells = split(line, ',');
        if (cells.size() != 2) {
            throw ValidationError(fmt::format("line {}: expected 2 columns, found {}", line_no, cells.size()));
        }
        rows.emplace_back(parse_number(cells[0], line_no), parse_number(cells[1], line_no));
    }
    if (!header_seen) {
        throw ValidationError("CSV has no header row");
    }
    return rows;
}

}  // namespace

std::string sha256_hex(std::string_view data)
{
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
        throw NumericalError("SHA-256 digest failed");
    }
    std::string out;
    for (unsigned int i = 0; i < length; ++i) {
        out += fmt::format("{:02x}", digest[i]);
    }
    return out;
}

std::string csv_text(const Table& table, const Stamp& stamp)
{
    std::string out = fmt::format("# spskit {}\n# config_sha256 {}\n", stamp.version, stamp.config_digest);
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        out += (i ? "," : "") + table.columns[i];
    }
    out += '\n';
    for (const auto& row : table.rows) {
        require(row.size() == table.columns.size(), "table row width does not match its header");
        for (std::size_t i = 0; i < row.size(); ++i) {
            out += fmt::format("{}{:.12g}", i ? "," : "", row[i]);
        }
        out += '\n';
    }
    return out;
}

nlohmann::json stamped(nlohmann::json body, const Stamp& stamp)
{
    body["schema_version"] = kReportSchemaVersion;
    body["spskit_version"] = stamp.version;
    body["config_sha256"] = stamp.config_digest;
    return body;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content)
{
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    const auto tmp = std::filesystem::path(path.string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw ValidationError(fmt::format("cannot write '{}'", path.string()));
        }
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) {
            throw ValidationError(fmt::format("write to '{}' failed", path.string()));
        }
    }
    std::filesystem::rename(tmp, path);
}

void write_file_atomic(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes)
{
    write_file_atomic(path, std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

std::string read_text(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ValidationError(fmt::format("cannot open '{}'", path.string()));
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

specfit::MeasurementSeries parse_series(std::string_view text, specfit::SeriesKind fallback)
{
    std::vector<std::string> comments;
    const auto rows = two_columns(text, &comments);
    specfit::MeasurementSeries s{fallback, {}, {}};
    for (const auto& c : comments) {
        if (c.rfind("kind:", 0) == 0) {
            s.kind = specfit::series_kind_from_string(trim(std::string_view(c).substr(5)));
        }
    }
    for (const auto& [x, y] : rows) {
        s.x.push_back(x);
        s.y.push_back(y);
    }
    s.validate();
    return s;
}

specfit::MeasurementSeries read_series(const std::filesystem::path& path, specfit::SeriesKind fallback)
{
    return parse_series(read_text(path), fallback);
}

fab::SurfaceProfile parse_profile(std::string_view text)
{
    fab::SurfaceProfile p;
    for (const auto& [x, z] : two_columns(text, nullptr)) {
        p.x_um.push_back(x);
        p.z_nm.push_back(z);
    }
    p.validate();
    return p;
}

optics::LayerStack parse_stack(std::string_view text)
{
    optics::LayerStack stack;
    std::size_t line_no = 0;
    for (const auto& raw : lines_of(text)) {
        ++line_no;
        const std::string line = trim(raw);
        if (line.empty()) {
            continue;
        }
        if (line[0] == '#') {
            const auto kv = split(std::string_view(line).substr(1), '=');
            if (kv.size() == 2 && kv[0] == "ambient_index") {
                stack.ambient_index = parse_number(kv[1], line_no);
            } else if (kv.size() == 2 && kv[0] == "substrate_index") {
                stack.substrate_index = parse_number(kv[1], line_no);
            }
            continue;
        }
        const auto cells = split(line, ',');
        if (cells.size() != 2) {
            throw ValidationError(fmt::format("line {}: expected 'index, thickness_nm'", line_no));
        }
        if (cells[0] == "index") {
            continue;
        }
        stack.layers.push_back({parse_number(cells[0], line_no), parse_number(cells[1], line_no)});
    }
    stack.validate();
    return stack;
}

std::string format_stack(const optics::LayerStack& stack)
{
    std::string out = fmt::format("# ambient_index={:.12g}\n# substrate_index={:.12g}\nindex,thickness_nm\n",
                                  stack.ambient_index, stack.substrate_index);
    for (const auto& l : stack.layers) {
        out += fmt::format("{:.12g},{:.12g}\n", l.index, l.thickness_nm);
    }
    return out;
}

}  // namespace spskit::io
