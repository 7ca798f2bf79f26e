#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "spskit/cavitymode.hpp"
#include "spskit/error.hpp"

using namespace spskit;
using namespace spskit::cavitymode;

namespace {

// Gaussian standing wave: integrate the transverse profile exp(-2 r^2 / w0^2)
// numerically and take the axial sin^2 average (1/2). Waist from the Rayleigh
// range z_R^2 = L (Rc - L) of a plano-concave resonator.
double integrated_mode_volume(double rc_nm, int q, double lambda_nm)
{
    const double length = q * lambda_nm / 2.0;
    const double z_r = std::sqrt(length * (rc_nm - length));
    const double w0_sq = lambda_nm * z_r / std::numbers::pi;
    const double radial = oracles::simpson(
        [&](double r) { return 2.0 * std::numbers::pi * r * std::exp(-2.0 * r * r / w0_sq); }, 0.0,
        12.0 * std::sqrt(w0_sq), 4000);
    return radial * length * 0.5 / std::pow(lambda_nm, 3);
}

CavityConfig device_config(int q = 8)
{
    CavityConfig c;
    c.q = q;
    return c;
}

}  // namespace

TEST_CASE("mode volume of the hemisphere cavity")
{
    const double v8 = mode_volume(device_config(8));
    CHECK(v8 == doctest::Approx(1.76).epsilon(0.03));
    CHECK(v8 == doctest::Approx(integrated_mode_volume(2700.0, 8, 565.85)).epsilon(1e-6));
    const double v5 = mode_volume(device_config(5));
    CHECK(v5 == doctest::Approx(integrated_mode_volume(2700.0, 5, 565.85)).epsilon(1e-6));
    CHECK(v5 == doctest::Approx(1.49).epsilon(0.01));
}

TEST_CASE("mode volume increases with q below three quarters of Rc and collapses at the concentric limit")
{
    double previous = 0.0;
    for (int q = 1; q * 565.85 / 2.0 < 0.75 * 2700.0; ++q) {
        const double v = mode_volume(device_config(q));
        CHECK(v > previous);
        previous = v;
    }
    CavityConfig near;
    near.radius_of_curvature_um = 8 * 565.85 / 2.0 / 1000.0 + 1e-9;
    CHECK(mode_volume(near) < 1e-3);
}

TEST_CASE("stability is enforced")
{
    CavityConfig c = device_config(10);  // 2829 nm > 2700 nm
    CHECK_THROWS_AS(mode_volume(c), ValidationError);
    c = device_config(0);
    CHECK_THROWS_AS(mode_volume(c), ValidationError);
}

TEST_CASE("finesse, FSR and linewidth")
{
    CHECK(fsr_for_linewidth_ghz(0.9995, 124e6) == doctest::Approx(779.0).epsilon(0.01));
    CHECK(finesse(0.0) == 0.0);
    CHECK(finesse(1e-8) < 1e-3);
    CHECK_THROWS_AS(finesse(1.0), ValidationError);

    double previous = -1.0;
    for (double r = 0.01; r < 1.0; r += 0.01) {
        const double f = finesse(r);
        CHECK(f > previous);
        previous = f;
    }

    CavityConfig c = device_config(8);
    c.mirror_reflectivity = 0.992;
    c.penetration_depth_nm = 122.0;
    const ModeSpacing m = fsr_finesse_linewidth(c);
    CHECK(m.quality_factor > 3.3e3);
    CHECK(m.quality_factor < 3.5e3);
    CHECK(m.linewidth_hz == doctest::Approx(m.fsr_ghz * 1e9 / m.finesse));
    // Q = nu / dnu
    const double nu = 299792458.0 / 565.85e-9;
    CHECK(m.quality_factor == doctest::Approx(nu / m.linewidth_hz).epsilon(1e-12));

    c.include_penetration = false;
    const ModeSpacing bare = fsr_finesse_linewidth(c);
    CHECK(bare.fsr_ghz > m.fsr_ghz);
}

TEST_CASE("PDMS tuning")
{
    const CavityConfig c = device_config(8);
    const Tuning one = tune(c, 1.0);
    CHECK(one.delta_length_nm == doctest::Approx(102.0));
    CHECK(one.delta_wavelength_nm == doctest::Approx(25.5));
    const Tuning zero = tune(c, 0.0);
    CHECK(zero.delta_length_nm == 0.0);
    CHECK(zero.delta_wavelength_nm == 0.0);
    CHECK(tune(c, 0.5).delta_length_nm == doctest::Approx(51.0));
    for (double v1 : {-2.0, 0.3, 1.7}) {
        for (double v2 : {-1.1, 0.25, 2.0}) {
            CHECK(tune(c, v1 + v2).delta_length_nm ==
                  doctest::Approx(tune(c, v1).delta_length_nm + tune(c, v2).delta_length_nm));
        }
    }
    CHECK_THROWS_AS(tune(c, 6.0), ValidationError);
    CHECK_THROWS_AS(tune(c, -5.5), ValidationError);
}

TEST_CASE("spectral overlap of two Lorentzians")
{
    auto lorentz = [](double x, double x0, double w) {
        return (w / (2.0 * std::numbers::pi)) / ((x - x0) * (x - x0) + w * w / 4.0);
    };
    auto numeric_overlap = [&](double detuning, double wc, double we) {
        auto integral = [&](double d) {
            return oracles::simpson([&](double x) { return lorentz(x, 0.0, wc) * lorentz(x, d, we); }, -3000.0,
                                    3000.0, 600000);
        };
        return integral(detuning) / integral(0.0);
    };

    const Lorentzian cavity{565.85, 0.224};
    CHECK(spectral_overlap(cavity, cavity) == doctest::Approx(1.0));
    const Lorentzian detuned{565.85 + 5.76, 5.76};
    const double o = spectral_overlap(cavity, detuned);
    CHECK(o == doctest::Approx(0.2).epsilon(0.1));
    CHECK(o == doctest::Approx(numeric_overlap(5.76, 0.224, 5.76)).epsilon(2e-3));
    CHECK(spectral_overlap(cavity, Lorentzian{1e6, 5.76}) < 1e-9);

    // Half of the zero-detuning overlap at detuning (w1 + w2) / 2.
    CHECK(spectral_overlap(cavity, Lorentzian{565.85 + (0.224 + 5.76) / 2.0, 5.76}) == doctest::Approx(0.5));

    double previous = 2.0;
    for (double d = 0.0; d < 30.0; d += 0.5) {
        const Lorentzian e{565.85 + d, 5.76};
        const double value = spectral_overlap(cavity, e);
        CHECK(value == doctest::Approx(spectral_overlap(e, cavity)));
        CHECK(value < previous);
        previous = value;
    }
    CHECK_THROWS_AS(spectral_overlap(Lorentzian{565.0, 0.0}, cavity), ValidationError);
}
