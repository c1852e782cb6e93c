#pragma once

#include <vector>

#include "ptomit/params.hpp"

namespace ptomit
{

// Mean fields of the pumped system (probe off).
struct SteadyState
{
    cplx a_bar{};
    cplx b1_bar{};
    cplx b2_bar{};
    double n_cav = 0.0;  // |a_bar|², exactly
};

struct SteadyStateDiagnostics
{
    std::vector<double> cubic_roots;  // non-negative real roots for n, ascending
    std::size_t selected_index = 0;
    bool multistable = false;
};

struct SteadyStateSolution
{
    SteadyState state;
    SteadyStateDiagnostics diagnostics;
};

// Mechanical mean fields per unit intracavity photon number: b̄ᵢ = coeffᵢ · n.
struct MechanicalResponse
{
    cplx b1_per_n{};
    cplx b2_per_n{};
};

MechanicalResponse mechanical_response(const SystemParams& p);

// c such that 2Re(g₁* b̄₁) + 2Re(g₂* b̄₂) = c·n. Throws SingularityError when
// the mechanical denominator (iω_m+γ₁/2)(iω_m+γ₂/2)+|μ|² drops below
// 1e−12·ω_m².
double effective_shift_coefficient(const SystemParams& p);

// Solves n·[(Δ − c·n)² + (κ/2)²] = ηκε_l² for n = |ā|², picks the smallest
// non-negative root and rebuilds ā, b̄₁, b̄₂ from it.
SteadyStateSolution solve_steady_state(const SystemParams& p);

// Max modulus of the three mean-field time derivatives at `s` (probe off).
double steady_residual(const SystemParams& p, const SteadyState& s);

// Residual of the cubic at n, relative to the magnitude of its terms.
double cubic_relative_residual(const SystemParams& p, double n);

} // namespace ptomit
