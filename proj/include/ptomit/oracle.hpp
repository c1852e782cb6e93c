#pragma once

#include <span>
#include <vector>

#include "ptomit/params.hpp"
#include "ptomit/steady_state.hpp"

namespace ptomit
{

// Sideband amplitudes measured by lock-in demodulation of a time-domain run.
struct DemodResult
{
    cplx a1_minus{};  // δa at e^{−iωt}
    cplx a1_plus{};   // δa at e^{+iωt}
    cplx b1_minus{};
    cplx c1_minus{};
    double transient_decay = 0.0;  // relative change between the last two windows
    double harmonic_ratio = 0.0;   // second-harmonic content of δa relative to |a1_minus|
    double conjugate_mismatch = 0.0;  // max |δa* − conj(δa)| / max |δa| over the windows
    double horizon = 0.0;           // s
};

struct OracleOptions
{
    double horizon = 0.0;              // s; 0 → 30/|margin|
    double rel_tol = 1e-12;            // local error control
    int periods = 20;                  // drive periods per demodulation window
    int samples_per_period = 32;
    double decay_threshold = 1e-7;     // transient_decay above this → InconclusiveError
};

// Integrates the six linearized equations (δa and δa* as independent
// variables) from zero perturbation under the probe drive √(ηκ)ε_p e^{∓iωt}
// and demodulates the last window. Refuses unstable operating points.
DemodResult integrate_linearized(const SystemParams& p, const SteadyState& s, double omega,
                                 const OracleOptions& opt = {});

struct OraclePoint
{
    double omega = 0.0;
    cplx formula{};
    cplx measured{};
    double rel_error = 0.0;
    double transient_decay = 0.0;
};

struct OracleComparison
{
    std::vector<OraclePoint> points;
    double max_rel_error = 0.0;
};

// Closed-form A₁₋ against integrate_linearized at every grid point.
OracleComparison oracle_compare(const SystemParams& p, std::span<const double> omega_grid,
                                const OracleOptions& opt = {}, unsigned threads = 1);

} // namespace ptomit
