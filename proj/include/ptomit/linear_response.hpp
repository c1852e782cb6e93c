#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ptomit/params.hpp"
#include "ptomit/steady_state.hpp"

namespace ptomit
{

// Mechanical susceptibility pieces at probe offset ω. The "plus" entries are
// α(ω_m) = −iω − iω_m + γ/2, the "minus" entries α(−ω_m) = −iω + iω_m + γ/2.
struct AlphaTerms
{
    cplx alpha1_plus{};
    cplx alpha2_plus{};
    cplx alpha1_minus{};
    cplx alpha2_minus{};
    cplx f1{};  // α₁(−ω_m)α₂(−ω_m) + |μ|²
    cplx f2{};  // α₁(ω_m)α₂(ω_m) + |μ|²
};

// Response to the weak probe at one offset ω = ω_p − ω_l.
struct ProbeResponse
{
    double omega = 0.0;
    cplx xi{};
    cplx lam{};
    cplx gam{};
    cplx a1_minus{};
    cplx t_p{};
    double abs_t = 0.0;
    double psi = 0.0;    // arg(t_p); unwrapped along the grid inside a Spectrum
    double tau_g = 0.0;  // s; filled by group_delay / spectrum
};

struct Spectrum
{
    std::vector<double> omegas;  // strictly increasing
    std::vector<ProbeResponse> responses;
    std::uint64_t params_fingerprint = 0;
    SteadyState state;
};

AlphaTerms alpha_f_terms(const SystemParams& p, double omega);

// Floor below which |f₁| or |f₂| counts as singular: 1e−12·ω_m².
double susceptibility_floor(const SystemParams& p);

cplx lambda_of(const SystemParams& p, double omega);

// Ξ(ω) with the static coupling shifts of the steady state.
cplx xi_of(const SystemParams& p, const SteadyState& s, double omega);

// Ξ*(−ω) = conj(Ξ(−ω)), the feedback term in Γ.
cplx xi_conj_neg_of(const SystemParams& p, const SteadyState& s, double omega);

// t_p = 1 − ηκ/(Ξ − |ā|²Λ(1−Γ)); tau_g is left at 0.
ProbeResponse transmission(const SystemParams& p, const SteadyState& s, double omega);

// Central difference of the unwrapped transmission phase. Throws
// StencilError if the phase moves by more than π across the stencil.
double group_delay(const SystemParams& p, const SteadyState& s, double omega, double step);
double default_delay_step(const SystemParams& p);

struct SpectrumOptions
{
    double delay_step = 0.0;  // 0 → default_delay_step
    unsigned threads = 1;
};

// Evaluates the response on a monotone grid (either direction; stored
// increasing) from one shared steady state, unwraps ψ along the grid and
// attaches τ_g at every point.
Spectrum spectrum(const SystemParams& p, std::span<const double> grid, const SpectrumOptions& opt = {});
Spectrum spectrum(const SystemParams& p, const SteadyState& s, std::span<const double> grid,
                  const SpectrumOptions& opt = {});

// Evenly spaced grid of `points` values in [lo, hi].
std::vector<double> linspace(double lo, double hi, std::size_t points);

// Nearest-branch unwrap in place.
void unwrap_phase(std::span<double> phases);

} // namespace ptomit
