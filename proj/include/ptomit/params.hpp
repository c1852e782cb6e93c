#pragma once

#include <complex>
#include <cstdint>
#include <string>

#include <json.hpp>

namespace ptomit
{

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;
inline constexpr double kHbar = 1.054571817e-34;      // J s
inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

// Physical scenario. Rates and frequencies are angular (rad/s); phases are
// kept in [0, 2π). Couplings are stored as (magnitude, phase) pairs.
struct SystemParams
{
    double omega_m = 0.0;
    double kappa = 0.0;
    double gamma1 = 0.0;  // passive loss, > 0
    double gamma2 = 0.0;  // active gain, < 0 for gain
    double g1_mag = 0.0;
    double g1_phase = 0.0;
    double g2_mag = 0.0;
    double g2_phase = 0.0;
    double mu_mag = 0.0;
    double mu_phase = 0.0;
    double delta = 0.0;  // Δ = ω_cav − ω_l
    double eta = 0.0;
    double pump_power = 0.0;   // W
    double probe_power = 0.0;  // W
    double pump_wavelength = 0.0;  // m

    cplx g1() const { return std::polar(g1_mag, g1_phase); }
    cplx g2() const { return std::polar(g2_mag, g2_phase); }
    cplx mu() const { return std::polar(mu_mag, mu_phase); }

    // γ₁ − γ₂, the unit used for |μ| throughout.
    double gamma_span() const { return gamma1 - gamma2; }

    // Closed-loop gauge phase Φ = −φ₁ + φ₂ + φ_μ.
    double loop_phase() const;

    bool operator==(const SystemParams&) const = default;
};

struct DerivedDrive
{
    double eps_l = 0.0;  // s^(-1/2)
    double eps_p = 0.0;
};

// Common parameter set: ω_m/2π = 3.68 GHz, g₁ = 2π MHz, |g₂| = 2g₁,
// γ₁ = −γ₂ = 5e−3 ω_m, κ = 0.1 ω_m, Δ = ω_m, λ = 1537 nm, η = 1/2,
// P_c = 50 µW, |μ| = 0.5 (γ₁ − γ₂), all phases zero.
SystemParams default_params();

// ε = sqrt(P / (ħω)) with ω = 2πc/λ.
double drive_amplitude(double power, double wavelength);
DerivedDrive derived_drive(const SystemParams& p);

double normalize_phase(double phase);

// Throws ConfigError naming the field and the violated bound.
void validate(const SystemParams& p);

// Builds parameters from a flat key/value document. Missing keys fall back to
// default_params(); relative keys resolve against the already-resolved base
// quantity (κ against ω_m, |g₂| against |g₁|, |μ| against γ₁ − γ₂).
SystemParams from_config(const nlohmann::json& doc);
SystemParams from_config_text(const std::string& text);

// Absolute-unit document accepted by from_config; the round trip is exact.
nlohmann::json serialize(const SystemParams& p);

// Same quantities in the normalized convention (ω_m in Hz, ratios to ω_m,
// |μ| in units of γ₁ − γ₂, ...). Informational; also accepted by from_config.
nlohmann::json serialize_normalized(const SystemParams& p);

// Apply "key=value" overrides to a config document. Values are parsed as JSON
// numbers.
void apply_override(nlohmann::json& doc, const std::string& assignment);

double mu_from_normalized(const SystemParams& p, double mu_over_span);
double mu_to_normalized(const SystemParams& p, double mu_abs);
double omega_from_normalized(const SystemParams& p, double omega_over_omega_m);
double omega_to_normalized(const SystemParams& p, double omega_abs);

std::uint64_t fingerprint(const SystemParams& p);

} // namespace ptomit
