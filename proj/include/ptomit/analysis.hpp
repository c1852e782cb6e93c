#pragma once

#include <span>
#include <string>
#include <vector>

#include "ptomit/linear_response.hpp"
#include "ptomit/params.hpp"

namespace ptomit
{

// lower: ω < ω_m, upper: ω > ω_m, single: the whole grid.
enum class Band
{
    lower,
    upper,
    single,
};

const char* to_string(Band b);

enum class BandStatus
{
    ok,
    advance,    // delay curve peaks at a non-positive value
    undefined,  // no interior peak or no half-maximum crossing
};

const char* to_string(BandStatus s);

struct Peak
{
    double omega = 0.0;
    double value = 0.0;
    std::size_t index = 0;  // grid argmax
};

struct Width
{
    double hwhm = 0.0;
    bool asymmetric_truncation = false;  // only one half-maximum crossing found
};

struct BandMetrics
{
    Band band = Band::single;
    BandStatus status = BandStatus::undefined;
    double peak_omega = 0.0;
    double peak_value = 0.0;
    double hwhm = 0.0;
    double product = 0.0;
    bool asymmetric_truncation = false;
    std::string note;
};

struct SweepRow
{
    double axis_value = 0.0;
    std::vector<BandMetrics> bands;  // lower+upper, or a single band
    double total = 0.0;              // sum of products over bands with status ok
};

struct SweepTable
{
    std::string axis_name;
    std::vector<SweepRow> rows;
};

enum class BandMode
{
    automatic,  // split when the mechanical pair is in the unbroken phase
    split,
    single,
};

struct SweepOptions
{
    std::vector<double> omega_grid;  // empty → [0.98, 1.02]·ω_m, 2001 points
    BandMode mode = BandMode::automatic;
    unsigned threads = 1;
};

enum class Quantity
{
    transmission,  // |t_p|
    delay,         // τ_g
};

std::vector<double> curve_values(const Spectrum& s, Quantity q);

// Indices of grid points in the band; the point ω = ω_m itself belongs to neither side band.
std::vector<std::size_t> band_indices(std::span<const double> omegas, Band band, double omega_m);

// Grid argmax inside the band, refined by a parabola through the three points
// around it. Throws BoundaryError if the maximum sits on the band edge.
Peak find_band_peak(std::span<const double> omegas, std::span<const double> values, Band band, double omega_m);

// Half width at half maximum around `peak`, from linearly interpolated
// crossings of peak.value/2 inside the band: (ω_hi − ω_lo)/2 with both, the
// one-sided distance (flagged) with one, BandwidthUndefinedError with none.
Width hwhm(std::span<const double> omegas, std::span<const double> values, const Peak& peak, Band band,
           double omega_m);

// Peak, width and product for one band; failures become a status, not an exception.
BandMetrics measure_band(std::span<const double> omegas, std::span<const double> values, Band band, double omega_m);

// True when the two mechanical roots at φ₂ = π/2 are split more in frequency
// than in loss.
bool is_unbroken_phase(const SystemParams& p);

SweepTable gain_bandwidth_sweep(const SystemParams& p, std::span<const double> phi2_grid, const SweepOptions& opt = {});
SweepTable delay_bandwidth_sweep(const SystemParams& p, std::span<const double> phi2_grid,
                                 const SweepOptions& opt = {});

struct CellError
{
    std::size_t row = 0;
    std::size_t col = 0;
    std::string message;
};

struct Map2D
{
    std::vector<double> omegas;  // columns, rad/s
    std::vector<double> mus;     // rows, rad/s
    std::vector<double> abs_t;   // row-major, NaN on error
    std::vector<CellError> errors;
    double omega_m = 0.0;
    double gamma_span = 0.0;
    double phi2 = 0.0;

    double at(std::size_t row, std::size_t col) const { return abs_t[row * omegas.size() + col]; }
};

Map2D map2d(const SystemParams& p, std::span<const double> omega_grid, std::span<const double> mu_grid, double phi2,
            unsigned threads = 1);

} // namespace ptomit
