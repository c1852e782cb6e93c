#pragma once

#include <array>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "ptomit/params.hpp"
#include "ptomit/steady_state.hpp"

namespace ptomit
{

// Basis order (δa, δa*, δb₁, δb₁*, δb₂, δb₂*).
using StabilityMatrix = Eigen::Matrix<cplx, 6, 6>;

struct StabilityReport
{
    std::array<cplx, 6> eigenvalues{};  // sorted by descending real part
    bool stable = false;                // margin < 0
    double margin = 0.0;                // max real part, rad/s
};

StabilityMatrix build_stability_matrix(const SystemParams& p, const SteadyState& s);
StabilityReport classify(const StabilityMatrix& m);

// Solve the steady state at p and classify its linearization.
StabilityReport stability_at(const SystemParams& p);

// Throws UnstableError citing the leading eigenvalue if p is not stable.
void require_stable(const SystemParams& p, const std::string& context = {});

enum class CellStatus
{
    stable,
    unstable,
    steady_state_failed,
};

const char* to_string(CellStatus s);

struct StabilityMap
{
    std::vector<double> g2_mags;  // rows
    std::vector<double> phi2s;    // columns
    std::vector<CellStatus> cells;  // row-major
    std::vector<double> margins;    // NaN where the steady state failed

    CellStatus at(std::size_t row, std::size_t col) const { return cells[row * phi2s.size() + col]; }
    std::size_t count(CellStatus s) const;
};

// Re-solves the steady state and classifies every (|g₂|, φ₂) cell at fixed |μ|.
StabilityMap stability_map(const SystemParams& p, std::span<const double> g2_mag_grid,
                           std::span<const double> phi2_grid, double mu_mag, unsigned threads = 1);

struct MechanicalWindow
{
    double lo = 0.9;  // Im λ / ω_m
    double hi = 1.1;
};

// The two eigenvalues of the upper mechanical sector: inside the window and
// closest to the bare mechanical centre iω_m − (γ₁+γ₂)/4. Throws
// SelectionError if fewer than two fall in the window.
std::array<cplx, 2> mechanical_pair(const SystemParams& p, const MechanicalWindow& window = {});

struct RootLocus
{
    std::vector<double> phi2_grid;
    std::array<std::vector<cplx>, 2> tracks;  // track 0 starts as the less lossy root
    std::vector<double> gaps;                 // |track0 − track1| per step
    std::vector<bool> ep_neighborhood;        // gap < ep_radius
};

struct RootLocusOptions
{
    MechanicalWindow window{};
    double ep_radius_over_span = 1e-3;
    unsigned threads = 1;
};

RootLocus mechanical_root_loci(const SystemParams& p, std::span<const double> phi2_grid,
                               const RootLocusOptions& opt = {});

struct EPResult
{
    double mu_ep = 0.0;
    double gap_at_ep = 0.0;
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    bool coalesced = false;  // gap_at_ep ≤ 1e−6·(γ₁−γ₂)
};

struct EPOptions
{
    MechanicalWindow window{};
    double tol_over_span = 1e-12;
};

// Separation of the mechanical pair at |μ| = mu_mag, other parameters from p.
double mechanical_gap(const SystemParams& p, double mu_mag, const MechanicalWindow& window = {});

// Golden-section minimization of mechanical_gap over |μ| in [lo, hi] (rad/s)
// at the φ₂ carried by p. Throws BracketError if the minimum is at an end.
EPResult locate_ep(const SystemParams& p, double mu_lo, double mu_hi, const EPOptions& opt = {});

} // namespace ptomit
