#include "spskit/fab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "spskit/constants.hpp"
#include "spskit/error.hpp"
#include "spskit/levenberg_marquardt.hpp"

namespace spskit::fab {

namespace {

void put_le(std::vector<std::uint8_t>& out, std::uint32_t value, int bytes)
{
    for (int i = 0; i < bytes; ++i) {
        out.push_back(static_cast<std::uint8_t>((value >> (8 * i)) & 0xFFu));
    }
}

std::uint32_t get_le(const std::vector<std::uint8_t>& in, std::size_t at, int bytes)
{
    std::uint32_t v = 0;
    for (int i = 0; i < bytes; ++i) {
        v |= static_cast<std::uint32_t>(in.at(at + static_cast<std::size_t>(i))) << (8 * i);
    }
    return v;
}

}  // namespace

Rgb encode_units(int units)
{
    require(units >= 0 && units <= kMaxEncodableUnits,
            fmt::format("dose {} units outside the encodable range 0..{}", units, kMaxEncodableUnits));
    Rgb p;
    p.b = static_cast<std::uint8_t>(std::min(units, 255));
    p.g = static_cast<std::uint8_t>(std::clamp(units - 255, 0, 255));
    p.r = static_cast<std::uint8_t>(std::clamp(units - 510, 0, 255));
    return p;
}

int decode_units(const Rgb& p)
{
    return p.r + p.g + p.b;
}

double target_depth_nm(double radius_um, double aperture_um, double r_nm)
{
    if (std::isinf(radius_um)) {
        return 0.0;
    }
    const double radius = radius_um * constants::kNmPerUm;
    const double half = aperture_um * constants::kNmPerUm / 2.0;
    if (std::abs(r_nm) > half) {
        return 0.0;
    }
    return std::sqrt(radius * radius - r_nm * r_nm) - std::sqrt(radius * radius - half * half);
}

const Rgb& DoseMap::at(int x, int y) const
{
    require(x >= 0 && x < width && y >= 0 && y < height, fmt::format("pixel ({}, {}) outside the map", x, y));
    return pixels[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)];
}

double DoseMap::depth_nm(int x, int y) const
{
    return decode_units(at(x, y)) * calibration_nm_per_unit;
}

DoseMap hemisphere_dose_map(double radius_um, double aperture_um, double pitch_nm, double calibration_nm_per_unit)
{
    require(radius_um > 0.0, "radius must be positive");
    require(std::isfinite(aperture_um) && aperture_um > 0.0, "aperture must be positive");
    require(aperture_um <= 2.0 * radius_um,
            fmt::format("aperture {} um exceeds the hemisphere diameter {} um", aperture_um, 2.0 * radius_um));
    require(std::isfinite(pitch_nm) && pitch_nm > 0.0, "pixel pitch must be positive");
    require(std::isfinite(calibration_nm_per_unit) && calibration_nm_per_unit > 0.0,
            "dose calibration (nm per RGB unit) is required and must be positive");
    const double aperture_nm = aperture_um * constants::kNmPerUm;
    require(aperture_nm / pitch_nm >= 50.0,
            fmt::format("pitch {} nm resolves the aperture with only {:.1f} pixels; need at least 50", pitch_nm,
                        aperture_nm / pitch_nm));

    const double max_depth = target_depth_nm(radius_um, aperture_um, 0.0);
    const double needed = max_depth / kMaxEncodableUnits;
    if (std::lround(max_depth / calibration_nm_per_unit) > kMaxEncodableUnits) {
        throw ValidationError(fmt::format("centre depth {:.2f} nm needs {} units at {} nm/unit; use a calibration of "
                                          "at least {:.6g} nm per RGB unit",
                                          max_depth, std::lround(max_depth / calibration_nm_per_unit),
                                          calibration_nm_per_unit, needed));
    }

    const int half = static_cast<int>(std::ceil(aperture_nm / 2.0 / pitch_nm));
    DoseMap map;
    map.width = map.height = 2 * half + 1;
    map.pitch_nm = pitch_nm;
    map.calibration_nm_per_unit = calibration_nm_per_unit;
    map.radius_um = radius_um;
    map.aperture_um = aperture_um;
    map.pixels.resize(static_cast<std::size_t>(map.width) * static_cast<std::size_t>(map.height));
    for (int y = 0; y < map.height; ++y) {
        for (int x = 0; x < map.width; ++x) {
            const double dx = (x - half) * pitch_nm;
            const double dy = (y - half) * pitch_nm;
            const double depth = target_depth_nm(radius_um, aperture_um, std::hypot(dx, dy));
            const auto units = static_cast<int>(std::lround(depth / calibration_nm_per_unit));
            map.pixels[static_cast<std::size_t>(y) * static_cast<std::size_t>(map.width) +
                       static_cast<std::size_t>(x)] = encode_units(units);
        }
    }
    return map;
}

std::vector<std::uint8_t> encode_bmp(const DoseMap& map)
{
    require(map.width > 0 && map.height > 0, "dose map is empty");
    const std::uint32_t row = (static_cast<std::uint32_t>(map.width) * 3u + 3u) & ~3u;
    const std::uint32_t image = row * static_cast<std::uint32_t>(map.height);
    const auto ppm = static_cast<std::uint32_t>(std::lround(constants::kNmPerM / map.pitch_nm));
    std::vector<std::uint8_t> out;
    out.reserve(54 + image);
    out.push_back('B');
    out.push_back('M');
    put_le(out, 54 + image, 4);
    put_le(out, 0, 4);
    put_le(out, 54, 4);
    put_le(out, 40, 4);
    put_le(out, static_cast<std::uint32_t>(map.width), 4);
    put_le(out, static_cast<std::uint32_t>(map.height), 4);
    put_le(out, 1, 2);
    put_le(out, 24, 2);
    put_le(out, 0, 4);
    put_le(out, image, 4);
    put_le(out, ppm, 4);
    put_le(out, ppm, 4);
    put_le(out, 0, 4);
    put_le(out, 0, 4);
    for (int y = map.height - 1; y >= 0; --y) {
        const std::size_t start = out.size();
        for (int x = 0; x < map.width; ++x) {
            const Rgb& p = map.at(x, y);
            out.push_back(p.b);
            out.push_back(p.g);
            out.push_back(p.r);
        }
        while (out.size() - start < row) {
            out.push_back(0);
        }
    }
    return out;
}

DoseMap decode_bmp(const std::vector<std::uint8_t>& bytes)
{
    require(bytes.size() >= 54 && bytes[0] == 'B' && bytes[1] == 'M', "not a BMP file");
    require(get_le(bytes, 28, 2) == 24 && get_le(bytes, 30, 4) == 0, "only uncompressed 24-bit BMP is supported");
    DoseMap map;
    map.width = static_cast<int>(get_le(bytes, 18, 4));
    map.height = static_cast<int>(get_le(bytes, 22, 4));
    const std::uint32_t offset = get_le(bytes, 10, 4);
    const std::size_t row = (static_cast<std::size_t>(map.width) * 3 + 3) & ~std::size_t{3};
    require(bytes.size() >= offset + row * static_cast<std::size_t>(map.height), "BMP pixel data truncated");
    map.pixels.resize(static_cast<std::size_t>(map.width) * static_cast<std::size_t>(map.height));
    for (int y = 0; y < map.height; ++y) {
        const std::size_t base = offset + row * static_cast<std::size_t>(map.height - 1 - y);
        for (int x = 0; x < map.width; ++x) {
            const std::size_t i = base + 3 * static_cast<std::size_t>(x);
            map.pixels[static_cast<std::size_t>(y) * static_cast<std::size_t>(map.width) +
                       static_cast<std::size_t>(x)] = {bytes[i + 2], bytes[i + 1], bytes[i]};
        }
    }
    return map;
}

void SurfaceProfile::validate() const
{
    require(x_um.size() == z_nm.size(), "profile x and z lengths differ");
    for (std::size_t i = 0; i < x_um.size(); ++i) {
        require(std::isfinite(x_um[i]) && std::isfinite(z_nm[i]), fmt::format("non-finite profile point {}", i));
        if (i > 0) {
            require(x_um[i] > x_um[i - 1], fmt::format("profile x not increasing at point {}", i));
        }
    }
}

HemisphereFit fit_hemisphere_profile(const SurfaceProfile& profile, const ProfileFitOptions& options)
{
    profile.validate();
    require(options.edge_exclusion >= 0.0 && options.edge_exclusion < 1.0, "edge exclusion must lie in [0, 1)");
    require(profile.x_um.size() >= 10, fmt::format("profile fit needs at least 10 points, got {}", profile.x_um.size()));

    const double mid = 0.5 * (profile.x_um.front() + profile.x_um.back());
    const double keep = (1.0 - options.edge_exclusion) * 0.5 * (profile.x_um.back() - profile.x_um.front());
    std::vector<double> x;
    std::vector<double> z;
    for (std::size_t i = 0; i < profile.x_um.size(); ++i) {
        if (std::abs(profile.x_um[i] - mid) <= keep * (1.0 + 1e-12)) {
            x.push_back(profile.x_um[i] * constants::kNmPerUm);
            z.push_back(profile.z_nm[i]);
        }
    }
    require(x.size() >= 10, "fewer than 10 points remain after edge exclusion");
    const auto n = static_cast<Eigen::Index>(x.size());

    // Kasa: x^2 + z^2 + D x + E z + F = 0
    Eigen::MatrixXd a(n, 3);
    Eigen::VectorXd rhs(n);
    const double x0 = x[x.size() / 2];
    const double z0 = z[z.size() / 2];
    for (Eigen::Index i = 0; i < n; ++i) {
        const double u = x[static_cast<std::size_t>(i)] - x0;
        const double v = z[static_cast<std::size_t>(i)] - z0;
        a(i, 0) = u;
        a(i, 1) = v;
        a(i, 2) = 1.0;
        rhs[i] = -(u * u + v * v);
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    qr.setThreshold(1e-12);
    if (qr.rank() < 3) {
        throw ValidationError("degenerate profile: points are collinear, no circle fits");
    }
    const Eigen::Vector3d c = qr.solve(rhs);
    double xc = x0 - c[0] / 2.0;
    double zc = z0 - c[1] / 2.0;
    double r2 = (c[0] * c[0] + c[1] * c[1]) / 4.0 - c[2];
    const double span = x.back() - x.front();
    if (!(r2 > 0.0) || std::sqrt(r2) > 1e6 * span) {
        throw ValidationError("degenerate profile: points are collinear, no circle fits");
    }
    double mean_z = 0.0;
    for (double v : z) {
        mean_z += v;
    }
    mean_z /= static_cast<double>(z.size());
    const bool concave = zc > mean_z;
    const double sign = concave ? -1.0 : 1.0;

    auto residual = [&](const Eigen::VectorXd& p) {
        Eigen::VectorXd r(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double dx = x[static_cast<std::size_t>(i)] - p[1];
            const double under = std::max(p[0] * p[0] - dx * dx, 0.0);
            r[i] = p[2] + sign * std::sqrt(under) - z[static_cast<std::size_t>(i)];
        }
        return r;
    };
    Eigen::Vector3d start(std::sqrt(r2), xc, zc);
    const auto lm = fit::levenberg_marquardt(residual, start);

    HemisphereFit out;
    out.radius_um = lm.parameters[0] / constants::kNmPerUm;
    out.center_x_um = lm.parameters[1] / constants::kNmPerUm;
    out.center_z_nm = lm.parameters[2];
    out.rms_nm = std::sqrt(lm.chi_squared / static_cast<double>(n));
    out.points_used = static_cast<int>(n);
    out.concave = concave;
    out.ideal = out.rms_nm < options.ideal_rms_nm;
    return out;
}

}  // namespace spskit::fab
