#include "spskit/optics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>

#include <fmt/format.h>

#include "spskit/constants.hpp"
#include "spskit/error.hpp"
#include "spskit/numeric.hpp"

namespace spskit::optics {

namespace {

using cd = std::complex<double>;
using Matrix2 = std::array<cd, 4>;  // row-major

constexpr cd kI{0.0, 1.0};

Matrix2 multiply(const Matrix2& a, const Matrix2& b)
{
    return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3], a[2] * b[0] + a[3] * b[2],
            a[2] * b[1] + a[3] * b[3]};
}

// Characteristic matrix of a homogeneous film of the given physical thickness.
Matrix2 film_matrix(double index, double thickness_nm, double wavelength_nm)
{
    const double delta = 2.0 * constants::kPi * index * thickness_nm / wavelength_nm;
    const double c = std::cos(delta);
    const double s = std::sin(delta);
    return {cd{c, 0.0}, kI * s / index, kI * index * s, cd{c, 0.0}};
}

void check_wavelength(double wavelength_nm)
{
    require(std::isfinite(wavelength_nm) && wavelength_nm > 0.0,
            fmt::format("wavelength must be positive and finite, got {}", wavelength_nm));
}

bool is_valid_index(double n) { return std::isfinite(n) && n >= 1.0; }

}  // namespace

void LayerStack::validate() const
{
    require(is_valid_index(ambient_index), fmt::format("ambient index must be >= 1, got {}", ambient_index));
    require(is_valid_index(substrate_index), fmt::format("substrate index must be >= 1, got {}", substrate_index));
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const Layer& layer = layers[i];
        require(is_valid_index(layer.index), fmt::format("layer {} index must be >= 1, got {}", i, layer.index));
        require(std::isfinite(layer.thickness_nm) && layer.thickness_nm > 0.0,
                fmt::format("layer {} thickness must be > 0, got {}", i, layer.thickness_nm));
    }
}

LayerStack LayerStack::reversed() const
{
    LayerStack out;
    out.ambient_index = substrate_index;
    out.substrate_index = ambient_index;
    out.layers.assign(layers.rbegin(), layers.rend());
    return out;
}

double LayerStack::total_thickness_nm() const
{
    double total = 0.0;
    for (const Layer& layer : layers) {
        total += layer.thickness_nm;
    }
    return total;
}

LayerStack make_quarter_wave_stack(double n_high, double n_low, int pairs, double design_wavelength_nm,
                                   Termination termination, double ambient_index, double substrate_index)
{
    require(is_valid_index(n_low) && is_valid_index(n_high),
            fmt::format("indices must be >= 1 (n_high={}, n_low={})", n_high, n_low));
    require(n_high > n_low, fmt::format("degenerate index contrast: n_high={} must exceed n_low={}", n_high, n_low));
    require(pairs >= 1, fmt::format("need at least one layer pair, got {}", pairs));
    check_wavelength(design_wavelength_nm);

    const Layer high{n_high, design_wavelength_nm / (4.0 * n_high)};
    const Layer low{n_low, design_wavelength_nm / (4.0 * n_low)};
    const bool low_at_substrate = termination == Termination::low_index_at_substrate;
    const Layer& outer = low_at_substrate ? high : low;
    const Layer& inner = low_at_substrate ? low : high;

    LayerStack stack;
    stack.ambient_index = ambient_index;
    stack.substrate_index = substrate_index;
    stack.layers.reserve(2 * static_cast<std::size_t>(pairs));
    for (int p = 0; p < pairs; ++p) {
        stack.layers.push_back(outer);
        stack.layers.push_back(inner);
    }
    stack.validate();
    return stack;
}

LayerStack make_quarter_wave_coating(double n_film, double design_wavelength_nm, double ambient_index,
                                     double substrate_index)
{
    check_wavelength(design_wavelength_nm);
    LayerStack stack{ambient_index, {{n_film, design_wavelength_nm / (4.0 * n_film)}}, substrate_index};
    stack.validate();
    return stack;
}

std::vector<double> SpectralCurve::wavelengths() const
{
    std::vector<double> out;
    out.reserve(samples.size());
    for (const auto& s : samples) {
        out.push_back(s.wavelength_nm);
    }
    return out;
}

std::vector<double> SpectralCurve::values() const
{
    std::vector<double> out;
    out.reserve(samples.size());
    for (const auto& s : samples) {
        out.push_back(s.value);
    }
    return out;
}

Response response(const LayerStack& stack, double wavelength_nm)
{
    stack.validate();
    check_wavelength(wavelength_nm);

    Matrix2 m{cd{1.0}, cd{0.0}, cd{0.0}, cd{1.0}};
    for (const Layer& layer : stack.layers) {
        m = multiply(m, film_matrix(layer.index, layer.thickness_nm, wavelength_nm));
    }
    const double n0 = stack.ambient_index;
    const double ns = stack.substrate_index;
    const cd b = m[0] + m[1] * ns;
    const cd c = m[2] + m[3] * ns;
    const cd denom = n0 * b + c;

    Response out;
    out.r = (n0 * b - c) / denom;
    out.t = 2.0 * n0 / denom;
    out.reflectance = std::norm(out.r);
    out.transmittance = ns / n0 * std::norm(out.t);
    return out;
}

namespace {

SpectralCurve sample_curve(const LayerStack& stack, std::span<const double> wavelengths_nm, bool reflect)
{
    require(!wavelengths_nm.empty(), "wavelength list is empty");
    stack.validate();
    SpectralCurve curve;
    curve.samples.reserve(wavelengths_nm.size());
    for (double wl : wavelengths_nm) {
        const Response r = response(stack, wl);
        curve.samples.push_back({wl, reflect ? r.reflectance : r.transmittance});
    }
    return curve;
}

}  // namespace

SpectralCurve reflectance(const LayerStack& stack, std::span<const double> wavelengths_nm)
{
    return sample_curve(stack, wavelengths_nm, true);
}

SpectralCurve transmittance(const LayerStack& stack, std::span<const double> wavelengths_nm)
{
    return sample_curve(stack, wavelengths_nm, false);
}

std::vector<double> wavelength_grid(double start_nm, double stop_nm, double step_nm)
{
    require(step_nm > 0.0 && stop_nm >= start_nm, "wavelength grid needs start <= stop and step > 0");
    const auto n = static_cast<std::size_t>(std::floor((stop_nm - start_nm) / step_nm + 1e-9)) + 1;
    std::vector<double> grid(n);
    for (std::size_t i = 0; i < n; ++i) {
        grid[i] = start_nm + static_cast<double>(i) * step_nm;
    }
    return grid;
}

double Band::fractional_frequency_width(double center_nm) const
{
    return center_nm / lower_nm - center_nm / upper_nm;
}

namespace {

// Walk from center in direction dir until g(lambda) < threshold, then bisect.
template <class G>
std::optional<double> band_edge(G&& g, double threshold, double center_nm, double dir, double step_nm)
{
    const double limit = center_nm * 0.5;  // never search further than +-50 % of center
    double inside = center_nm;
    for (double offset = step_nm; offset <= limit; offset += step_nm) {
        const double wl = center_nm + dir * offset;
        if (g(wl) < threshold) {
            return numeric::bisect([&](double x) { return g(x) - threshold; }, std::min(inside, wl),
                                   std::max(inside, wl), 1e-7);
        }
        inside = wl;
    }
    return std::nullopt;
}

template <class G>
std::optional<Band> band_around(G&& g, double threshold, double center_nm, double step_nm)
{
    require(threshold > 0.0 && threshold < 1.0 + 1e-15, fmt::format("threshold must lie in (0, 1], got {}", threshold));
    require(step_nm > 0.0, "scan step must be positive");
    check_wavelength(center_nm);
    if (g(center_nm) < threshold) {
        return std::nullopt;
    }
    const auto lower = band_edge(g, threshold, center_nm, -1.0, step_nm);
    const auto upper = band_edge(g, threshold, center_nm, +1.0, step_nm);
    if (!lower || !upper) {
        return std::nullopt;
    }
    return Band{*lower, *upper};
}

}  // namespace

std::optional<Band> stopband(const LayerStack& stack, double threshold, double center_nm, double scan_step_nm)
{
    stack.validate();
    return band_around([&](double wl) { return response(stack, wl).reflectance; }, threshold, center_nm,
                       scan_step_nm);
}

void Mirror::validate() const
{
    coating.validate();
    require(loss >= 0.0 && loss < 1.0, fmt::format("mirror loss must lie in [0, 1), got {}", loss));
}

double loss_for_reflectance(const LayerStack& coating, double wavelength_nm, double target_reflectance)
{
    const double ideal = response(coating, wavelength_nm).reflectance;
    require(target_reflectance > 0.0 && target_reflectance <= ideal,
            fmt::format("target reflectance {} must lie in (0, {}] (lossless value)", target_reflectance, ideal));
    return 1.0 - target_reflectance / ideal;
}

MirrorPort mirror_port(const Mirror& mirror, double wavelength_nm)
{
    mirror.validate();
    const double amp = std::sqrt(1.0 - mirror.loss);
    const Response from_gap = response(mirror.coating, wavelength_nm);
    const Response from_substrate = response(mirror.coating.reversed(), wavelength_nm);
    return {amp * from_gap.r, amp * from_substrate.t, amp * from_gap.t};
}

std::optional<Band> cavity_stopband(const Mirror& a, const Mirror& b, double threshold, double center_nm,
                                    double scan_step_nm)
{
    a.validate();
    b.validate();
    auto envelope = [&](double wl) {
        const double ra = std::abs(mirror_port(a, wl).r_gap);
        const double rb = std::abs(mirror_port(b, wl).r_gap);
        const double num = ra + rb;
        const double den = 1.0 + ra * rb;
        return num * num / (den * den);
    };
    return band_around(envelope, threshold, center_nm, scan_step_nm);
}

namespace {

struct CavityFields
{
    cd forward;      // forward wave in the gap, at mirror a
    cd transmitted;  // into substrate b
    cd backward;     // backward wave in the gap, arriving at mirror a
    cd round_trip;   // r_a r_b exp(-2ikL)
};

CavityFields solve_cavity(const MirrorPort& pa, const MirrorPort& pb, double gap_nm, double wavelength_nm,
                          double gap_index)
{
    const double k = 2.0 * constants::kPi * gap_index / wavelength_nm;
    const cd one_way = std::exp(-kI * k * gap_nm);
    const cd round_trip = pa.r_gap * pb.r_gap * one_way * one_way;
    const cd forward = pa.t_into_gap / (1.0 - round_trip);
    return {forward, forward * one_way * pb.t_out_of_gap, forward * pb.r_gap * one_way * one_way, round_trip};
}

void check_gap(double gap_nm, double gap_index)
{
    require(std::isfinite(gap_nm) && gap_nm > 0.0, fmt::format("cavity gap must be positive, got {}", gap_nm));
    require(is_valid_index(gap_index), fmt::format("gap index must be >= 1, got {}", gap_index));
}

void check_facing_gap(const Mirror& m, double gap_index, const char* name)
{
    require(std::abs(m.coating.ambient_index - gap_index) < 1e-12,
            fmt::format("{}: coating ambient index {} must equal the gap index {}", name, m.coating.ambient_index,
                        gap_index));
}

}  // namespace

double cavity_transmission(const Mirror& a, double gap_nm, const Mirror& b, double wavelength_nm, double gap_index)
{
    check_gap(gap_nm, gap_index);
    check_facing_gap(a, gap_index, "mirror a");
    check_facing_gap(b, gap_index, "mirror b");
    const CavityFields f = solve_cavity(mirror_port(a, wavelength_nm), mirror_port(b, wavelength_nm), gap_nm,
                                        wavelength_nm, gap_index);
    return b.coating.substrate_index / a.coating.substrate_index * std::norm(f.transmitted);
}

double intracavity_peak_intensity(const Mirror& a, double gap_nm, const Mirror& b, double wavelength_nm,
                                  double gap_index)
{
    check_gap(gap_nm, gap_index);
    const MirrorPort pb = mirror_port(b, wavelength_nm);
    const CavityFields f = solve_cavity(mirror_port(a, wavelength_nm), pb, gap_nm, wavelength_nm, gap_index);
    const double standing = 1.0 + std::abs(pb.r_gap);
    return std::norm(f.forward) * standing * standing;
}

namespace {

std::optional<Resonance> locate_resonance(const std::function<double(double)>& trans,
                                          std::span<const double> wl, std::span<const double> t,
                                          double design_wavelength_nm)
{
    std::optional<std::size_t> best;
    for (std::size_t i = 1; i + 1 < t.size(); ++i) {
        if (t[i] > t[i - 1] && t[i] >= t[i + 1]) {
            if (!best || std::abs(wl[i] - design_wavelength_nm) < std::abs(wl[*best] - design_wavelength_nm)) {
                best = i;
            }
        }
    }
    if (!best) {
        return std::nullopt;
    }
    const std::size_t i = *best;
    const auto peak = numeric::golden_section_max(trans, wl[i - 1], wl[i + 1], 1e-9);
    const double half = 0.5 * peak.value;

    std::optional<double> left;
    for (std::size_t j = i; j-- > 0;) {
        if (t[j] < half) {
            left = numeric::bisect([&](double x) { return trans(x) - half; }, wl[j], peak.x, 1e-10);
            break;
        }
    }
    std::optional<double> right;
    for (std::size_t j = i + 1; j < t.size(); ++j) {
        if (t[j] < half) {
            right = numeric::bisect([&](double x) { return half - trans(x); }, peak.x, wl[j], 1e-10);
            break;
        }
    }
    if (!left || !right) {
        return std::nullopt;
    }
    Resonance res;
    res.center_nm = peak.x;
    res.peak_transmission = peak.value;
    res.fwhm_nm = *right - *left;
    res.quality_factor = res.center_nm / res.fwhm_nm;
    return res;
}

}  // namespace

CavitySpectrum cavity_spectrum(const Mirror& a, double gap_nm, const Mirror& b,
                               std::span<const double> wavelengths_nm, double design_wavelength_nm,
                               double gap_index)
{
    require(!wavelengths_nm.empty(), "wavelength list is empty");
    require(std::is_sorted(wavelengths_nm.begin(), wavelengths_nm.end()), "wavelengths must be increasing");
    check_gap(gap_nm, gap_index);

    CavitySpectrum out;
    std::vector<double> t;
    t.reserve(wavelengths_nm.size());
    for (double wl : wavelengths_nm) {
        const MirrorPort pa = mirror_port(a, wl);
        const MirrorPort pb = mirror_port(b, wl);
        const CavityFields f = solve_cavity(pa, pb, gap_nm, wl, gap_index);
        const double tr = b.coating.substrate_index / a.coating.substrate_index * std::norm(f.transmitted);
        // Direct reflection off mirror a plus the field leaking back out of the gap.
        const cd r_outside = std::sqrt(1.0 - a.loss) * response(a.coating.reversed(), wl).r;
        const cd leak = f.backward * pa.t_out_of_gap;
        t.push_back(tr);
        out.transmission.samples.push_back({wl, tr});
        out.reflection.samples.push_back({wl, std::norm(r_outside + leak)});
    }
    std::function<double(double)> trans = [&](double wl) { return cavity_transmission(a, gap_nm, b, wl, gap_index); };
    out.resonance = locate_resonance(trans, wavelengths_nm, t, design_wavelength_nm);
    return out;
}

LayerStack cavity_as_stack(const LayerStack& a, double gap_nm, const LayerStack& b, double gap_index)
{
    check_gap(gap_nm, gap_index);
    LayerStack out;
    out.ambient_index = a.substrate_index;
    out.substrate_index = b.substrate_index;
    out.layers.assign(a.layers.rbegin(), a.layers.rend());
    out.layers.push_back({gap_index, gap_nm});
    out.layers.insert(out.layers.end(), b.layers.begin(), b.layers.end());
    out.validate();
    return out;
}

int FieldProfile::antinodes_in_gap() const
{
    int count = 0;
    for (std::size_t i = 1; i + 1 < samples.size(); ++i) {
        const auto& s = samples[i];
        if (s.position_nm <= 0.0 || s.position_nm >= gap_nm) {
            continue;
        }
        if (s.intensity > samples[i - 1].intensity && s.intensity >= samples[i + 1].intensity) {
            ++count;
        }
    }
    return count;
}

FieldProfile intracavity_field(const LayerStack& a, double gap_nm, const LayerStack& b, double wavelength_nm,
                               double sample_step_nm, double gap_index)
{
    check_wavelength(wavelength_nm);
    require(sample_step_nm > 0.0, "sample step must be positive");
    const LayerStack full = cavity_as_stack(a, gap_nm, b, gap_index);

    // Tangential (E, H) at the bottom of each layer, propagated back from the
    // exit medium where only the transmitted wave exists.
    const std::size_t n = full.layers.size();
    std::vector<std::array<cd, 2>> bottom(n);
    std::array<cd, 2> field{cd{1.0}, cd{full.substrate_index}};
    for (std::size_t j = n; j-- > 0;) {
        bottom[j] = field;
        const Layer& layer = full.layers[j];
        const Matrix2 m = film_matrix(layer.index, layer.thickness_nm, wavelength_nm);
        field = {m[0] * field[0] + m[1] * field[1], m[2] * field[0] + m[3] * field[1]};
    }

    FieldProfile profile;
    profile.gap_nm = gap_nm;
    double z0 = -a.total_thickness_nm();
    double peak = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const Layer& layer = full.layers[j];
        const auto steps = static_cast<std::size_t>(std::ceil(layer.thickness_nm / sample_step_nm));
        for (std::size_t s = 0; s < steps; ++s) {
            const double depth = layer.thickness_nm * static_cast<double>(s) / static_cast<double>(steps);
            const Matrix2 m = film_matrix(layer.index, layer.thickness_nm - depth, wavelength_nm);
            const double intensity = std::norm(m[0] * bottom[j][0] + m[1] * bottom[j][1]);
            profile.samples.push_back({z0 + depth, intensity});
            peak = std::max(peak, intensity);
        }
        z0 += layer.thickness_nm;
    }
    profile.samples.push_back({z0, std::norm(bottom[n - 1][0])});
    peak = std::max(peak, profile.samples.back().intensity);
    for (auto& s : profile.samples) {
        s.intensity /= peak;
    }
    return profile;
}

GapSearch gap_search_window(int q, double wavelength_nm, double gap_index)
{
    require(q >= 1, fmt::format("longitudinal order must be >= 1, got {}", q));
    check_wavelength(wavelength_nm);
    const double half_wave = wavelength_nm / (2.0 * gap_index);
    const double center = (q - 1) * half_wave;
    return {std::max(center - 0.5 * half_wave, 1e-3), center + 0.5 * half_wave, 0.01};
}

double resonant_gap(const Mirror& a, const Mirror& b, int q, double wavelength_nm, double gap_index)
{
    return resonant_gap(a, b, wavelength_nm, gap_search_window(q, wavelength_nm, gap_index), gap_index);
}

double resonant_gap(const Mirror& a, const Mirror& b, double wavelength_nm, const GapSearch& search,
                    double gap_index)
{
    require(search.upper_nm > search.lower_nm && search.lower_nm > 0.0 && search.tolerance_nm > 0.0,
            "invalid gap search bracket");
    auto intensity = [&](double gap) { return intracavity_peak_intensity(a, gap, b, wavelength_nm, gap_index); };
    const auto best = numeric::golden_section_max(intensity, search.lower_nm, search.upper_nm, search.tolerance_nm);
    const double margin = 2.0 * search.tolerance_nm;
    if (best.x - search.lower_nm < margin || search.upper_nm - best.x < margin) {
        throw NumericalError(fmt::format("no intensity maximum inside gap bracket [{:.3f}, {:.3f}] nm (search ended at "
                                         "{:.3f} nm)",
                                         search.lower_nm, search.upper_nm, best.x));
    }
    return best.x;
}

double penetration_depth(int q, double wavelength_nm, double resonant_gap_nm)
{
    require(q >= 1, fmt::format("longitudinal order must be >= 1, got {}", q));
    return (q * wavelength_nm / 2.0 - resonant_gap_nm) / 2.0;
}

}  // namespace spskit::optics
