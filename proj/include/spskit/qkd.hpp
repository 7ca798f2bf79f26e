#pragma once

#include <string>
#include <vector>

// BB84 secret-key rates per sent signal for single-photon and laser sources
// over fiber and free-space links (asymptotic GLLP and decoy bounds).
namespace spskit::qkd {

enum class SourceKind
{
    ideal_sps,
    real_sps,
    wcs,
    decoy,
};

enum class MuMode
{
    fixed,
    optimized,
};

std::string to_string(SourceKind kind);

struct SourceModel
{
    SourceKind kind = SourceKind::real_sps;
    // Source efficiency for the SPS kinds, mean photon number otherwise.
    double mu = 0.513;
    double g2_0 = 0.018;
    // Laser sources only: re-optimize mu at every channel transmittance.
    MuMode mu_mode = MuMode::fixed;

    void validate() const;

    static SourceModel ideal_sps();
    static SourceModel real_sps(double efficiency = 0.513, double g2_0 = 0.018);
    static SourceModel wcs(double mu = 0.1, MuMode mode = MuMode::optimized);
    static SourceModel decoy(double mu = 0.5, MuMode mode = MuMode::optimized);
};

enum class ChannelKind
{
    fiber,
    freespace,
};

enum class DivergenceModel
{
    gaussian_far_field,
    friis,
    calibrated_linear,
};

std::string to_string(DivergenceModel model);

struct FreeSpaceLink
{
    double transmit_aperture_m = 0.05;
    double receive_aperture_m = 0.60;
    double wavelength_nm = 565.85;
    DivergenceModel model = DivergenceModel::gaussian_far_field;
    // Full divergence angle for the calibrated linear model.
    double divergence_rad = 0.0;
};

struct ChannelModel
{
    ChannelKind kind = ChannelKind::fiber;
    double alpha_db_per_km = 0.21;
    FreeSpaceLink link;
    double distance_km = 0.0;

    void validate() const;
    ChannelModel at(double distance_km) const;
};

struct DetectorModel
{
    double eta = 0.045;
    double dark_count = 1.7e-6;
    double e_det = 0.033;
    double f_ec = 1.22;
    double q_sift = 0.5;
    double e0 = 0.5;

    void validate() const;
};

double binary_entropy(double x);

double channel_transmittance(const ChannelModel& channel);
double channel_loss_db(const ChannelModel& channel);

// Collected beam diameter at the receiver for the free-space models with a
// beam picture (Gaussian, calibrated linear).
double beam_diameter_m(const FreeSpaceLink& link, double distance_km);

// Divergence angle that puts target_loss_db at target_distance_km under the
// calibrated linear model.
double calibrate_divergence(const FreeSpaceLink& link, double target_loss_db, double target_distance_km);

struct KeyRate
{
    double rate = 0.0;
    double gain = 0.0;
    double qber = 0.0;
    double mu = 0.0;
    bool below_horizon = false;
};

// Rate for the source's own mu at overall channel transmittance t.
KeyRate key_rate_at(const SourceModel& source, double transmittance, const DetectorModel& detector);
// As above; laser sources in MuMode::optimized use optimize_mu.
KeyRate key_rate(const SourceModel& source, const ChannelModel& channel, const DetectorModel& detector);

struct MuSearch
{
    double mu_max = 1.5;
    double tolerance = 1e-5;
    int grid_points = 64;
};

// Throws NumericalError("no positive rate") when every mu gives zero.
KeyRate optimize_mu(SourceKind kind, double transmittance, const DetectorModel& detector, const MuSearch& search = {});

struct Interval
{
    double lower_km = 0.0;
    double upper_km = 200.0;
    double scan_step_km = 0.5;
};

struct Crossing
{
    double distance_km = 0.0;
    double loss_db = 0.0;
    double transmittance = 0.0;
};

// First distance where rate_a - rate_b changes sign (bisection to 1e-9 km).
// Throws NumericalError("no crossing in interval") otherwise.
Crossing find_crossing(const SourceModel& a, const SourceModel& b, const ChannelModel& channel,
                       const DetectorModel& detector, const Interval& interval = {});

struct SweepRow
{
    double distance_km = 0.0;
    double loss_db = 0.0;
    double rate_sps = 0.0;
    double rate_ideal = 0.0;
    double rate_wcs = 0.0;
    double rate_decoy = 0.0;
    double mu_wcs = 0.0;
    double mu_decoy = 0.0;
};

struct Scenario
{
    SourceModel sps = SourceModel::real_sps();
    SourceModel wcs = SourceModel::wcs();
    SourceModel decoy = SourceModel::decoy();
    ChannelModel channel;
    DetectorModel detector;
};

std::vector<SweepRow> sweep(const Scenario& scenario, double start_km, double stop_km, double step_km);

// Human-readable statement of every rate formula in use.
std::vector<std::string> formulas();

}  // namespace spskit::qkd
