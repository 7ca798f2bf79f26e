#pragma once

#include <cstdint>
#include <string>
#include <vector>

// Focused-ion-beam support: RGB-encoded dose maps for hemispherical dimples
// and circle-arc fits of measured height profiles.
namespace spskit::fab {

struct Rgb
{
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;

    bool operator==(const Rgb&) const = default;
};

// Dose units fill blue first, then green, then red: 0..765.
inline constexpr int kMaxEncodableUnits = 3 * 255;

Rgb encode_units(int units);
int decode_units(const Rgb& pixel);

// Target depth at radial distance r: sqrt(R^2 - r^2) - sqrt(R^2 - (A/2)^2)
// inside the aperture, 0 outside. R = +inf gives a flat (zero) target.
double target_depth_nm(double radius_um, double aperture_um, double r_nm);

struct DoseMap
{
    int width = 0;
    int height = 0;
    double pitch_nm = 0.0;
    double calibration_nm_per_unit = 0.0;
    double radius_um = 0.0;
    double aperture_um = 0.0;
    // Row-major, row 0 at the top.
    std::vector<Rgb> pixels;

    const Rgb& at(int x, int y) const;
    // Depth encoded at pixel (x, y).
    double depth_nm(int x, int y) const;
};

// Square map with an odd side so the apex sits on the centre pixel. The
// aperture must span at least 50 pixels. Throws ValidationError naming the
// smallest calibration that fits when the depth overflows 765 units.
DoseMap hemisphere_dose_map(double radius_um, double aperture_um, double pitch_nm, double calibration_nm_per_unit);

// Uncompressed 24-bit BMP: 54-byte header (BITMAPINFOHEADER, BI_RGB),
// bottom-up rows of BGR triples padded to 4 bytes, resolution set from the
// pixel pitch.
std::vector<std::uint8_t> encode_bmp(const DoseMap& map);
// Reads back pixel data written by encode_bmp (metadata not stored in BMP is
// left at zero).
DoseMap decode_bmp(const std::vector<std::uint8_t>& bytes);

struct SurfaceProfile
{
    std::vector<double> x_um;
    std::vector<double> z_nm;

    void validate() const;
};

struct ProfileFitOptions
{
    // Drop points in this outer fraction of the profile half-span.
    double edge_exclusion = 0.10;
    double ideal_rms_nm = 1.0;
};

struct HemisphereFit
{
    double radius_um = 0.0;
    double center_x_um = 0.0;
    double center_z_nm = 0.0;
    double rms_nm = 0.0;
    int points_used = 0;
    bool concave = true;
    bool ideal = false;  // rms below the ideal-hemisphere threshold
};

// Algebraic circle start, then least squares on vertical residuals.
HemisphereFit fit_hemisphere_profile(const SurfaceProfile& profile, const ProfileFitOptions& options = {});

}  // namespace spskit::fab
