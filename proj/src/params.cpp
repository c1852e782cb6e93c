#include "ptomit/params.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "ptomit/errors.hpp"

namespace ptomit
{

namespace
{

struct KeyPair
{
    const char* relative;
    const char* absolute;
};

// Config keys and their absolute-unit alternates.
constexpr std::array<KeyPair, 15> kKeys{{
    {"omega_m_hz", "omega_m_rad_s"},
    {"kappa_over_omega_m", "kappa_rad_s"},
    {"gamma1_over_omega_m", "gamma1_rad_s"},
    {"gamma2_over_omega_m", "gamma2_rad_s"},
    {"g1_mag_hz", "g1_mag_rad_s"},
    {"g1_phase_rad", nullptr},
    {"g2_mag_over_g1", "g2_mag_rad_s"},
    {"g2_phase_rad", nullptr},
    {"mu_mag_over_gamma_span", "mu_mag_rad_s"},
    {"mu_phase_rad", nullptr},
    {"delta_over_omega_m", "delta_rad_s"},
    {"eta", nullptr},
    {"pump_power_w", nullptr},
    {"probe_power_w", nullptr},
    {"pump_wavelength_m", nullptr},
}};

double number_at(const nlohmann::json& doc, const std::string& key)
{
    const auto& v = doc.at(key);
    if (!v.is_number())
    {
        throw ConfigError("config key '" + key + "' must be a number");
    }
    return v.get<double>();
}

// Returns the absolute value for one quantity: from the absolute key, the
// relative key scaled by `unit`, or the fallback.
double resolve(const nlohmann::json& doc, const KeyPair& k, double unit, double fallback)
{
    const bool has_rel = doc.contains(k.relative);
    const bool has_abs = k.absolute != nullptr && doc.contains(k.absolute);
    if (has_rel && has_abs)
    {
        throw ConfigError(std::string("config gives both '") + k.relative + "' and '" + k.absolute + "'");
    }
    if (has_abs)
    {
        return number_at(doc, k.absolute);
    }
    if (has_rel)
    {
        return number_at(doc, k.relative) * unit;
    }
    return fallback;
}

void require(bool ok, const std::string& field, const std::string& bound, double value)
{
    if (!ok)
    {
        std::ostringstream os;
        os.precision(17);
        os << "parameter " << field << " = " << value << " violates " << bound;
        throw ConfigError(os.str());
    }
}

} // namespace

double SystemParams::loop_phase() const
{
    return normalize_phase(-g1_phase + g2_phase + mu_phase);
}

SystemParams default_params()
{
    SystemParams p;
    p.omega_m = kTwoPi * 3.68e9;
    p.kappa = 0.1 * p.omega_m;
    p.gamma1 = 0.5e-2 * p.omega_m;
    p.gamma2 = -p.gamma1;
    p.g1_mag = kTwoPi * 1e6;
    p.g2_mag = 2.0 * p.g1_mag;
    p.mu_mag = 0.5 * p.gamma_span();
    p.delta = p.omega_m;
    p.eta = 0.5;
    p.pump_power = 50e-6;
    p.probe_power = 1e-9;
    p.pump_wavelength = 1537e-9;
    return p;
}

double drive_amplitude(double power, double wavelength)
{
    if (!(wavelength > 0.0) || !std::isfinite(wavelength))
    {
        throw ConfigError("drive_amplitude: wavelength must be positive");
    }
    if (!(power >= 0.0) || !std::isfinite(power))
    {
        throw ConfigError("drive_amplitude: power must be non-negative");
    }
    const double omega = kTwoPi * kSpeedOfLight / wavelength;
    return std::sqrt(power / (kHbar * omega));
}

DerivedDrive derived_drive(const SystemParams& p)
{
    return {drive_amplitude(p.pump_power, p.pump_wavelength), drive_amplitude(p.probe_power, p.pump_wavelength)};
}

double normalize_phase(double phase)
{
    double r = std::fmod(phase, kTwoPi);
    if (r < 0.0)
    {
        r += kTwoPi;
    }
    if (r >= kTwoPi)
    {
        r = 0.0;
    }
    return r;
}

void validate(const SystemParams& p)
{
    const std::pair<const char*, double> finite_fields[] = {
        {"omega_m", p.omega_m},   {"kappa", p.kappa},       {"gamma1", p.gamma1},
        {"gamma2", p.gamma2},     {"g1_mag", p.g1_mag},     {"g2_mag", p.g2_mag},
        {"mu_mag", p.mu_mag},     {"delta", p.delta},       {"g1_phase", p.g1_phase},
        {"g2_phase", p.g2_phase}, {"mu_phase", p.mu_phase}, {"eta", p.eta},
    };
    for (const auto& [name, v] : finite_fields)
    {
        require(std::isfinite(v), name, "finite", v);
    }
    require(p.omega_m > 0.0, "omega_m", "omega_m > 0", p.omega_m);
    require(p.kappa > 0.0, "kappa", "kappa > 0", p.kappa);
    require(p.g1_mag >= 0.0, "g1_mag", "g1_mag >= 0", p.g1_mag);
    require(p.g2_mag >= 0.0, "g2_mag", "g2_mag >= 0", p.g2_mag);
    require(p.mu_mag >= 0.0, "mu_mag", "mu_mag >= 0", p.mu_mag);
    require(p.eta > 0.0 && p.eta <= 1.0, "eta", "0 < eta <= 1", p.eta);
    require(p.pump_power >= 0.0 && std::isfinite(p.pump_power), "pump_power", "pump_power >= 0", p.pump_power);
    require(p.probe_power >= 0.0 && std::isfinite(p.probe_power), "probe_power", "probe_power >= 0",
            p.probe_power);
    require(p.pump_wavelength > 0.0 && std::isfinite(p.pump_wavelength), "pump_wavelength",
            "pump_wavelength > 0", p.pump_wavelength);
    for (double phase : {p.g1_phase, p.g2_phase, p.mu_phase})
    {
        require(phase >= 0.0 && phase < kTwoPi, "phase", "0 <= phase < 2*pi", phase);
    }
}

SystemParams from_config(const nlohmann::json& doc)
{
    if (!doc.is_object())
    {
        throw ConfigError("config must be a key/value object");
    }
    std::set<std::string> known;
    for (const auto& k : kKeys)
    {
        known.insert(k.relative);
        if (k.absolute)
        {
            known.insert(k.absolute);
        }
    }
    for (const auto& [key, value] : doc.items())
    {
        if (!known.contains(key))
        {
            throw ConfigError("unknown config key '" + key + "'");
        }
    }

    const SystemParams d = default_params();
    SystemParams p;
    p.omega_m = resolve(doc, kKeys[0], kTwoPi, d.omega_m);
    // Ratios in the defaults are kept relative to the resolved ω_m.
    p.kappa = resolve(doc, kKeys[1], p.omega_m, 0.1 * p.omega_m);
    p.gamma1 = resolve(doc, kKeys[2], p.omega_m, 0.5e-2 * p.omega_m);
    p.gamma2 = resolve(doc, kKeys[3], p.omega_m, -0.5e-2 * p.omega_m);
    p.g1_mag = resolve(doc, kKeys[4], kTwoPi, d.g1_mag);
    p.g1_phase = resolve(doc, kKeys[5], 1.0, d.g1_phase);
    p.g2_mag = resolve(doc, kKeys[6], p.g1_mag, 2.0 * p.g1_mag);
    p.g2_phase = resolve(doc, kKeys[7], 1.0, d.g2_phase);
    p.mu_mag = resolve(doc, kKeys[8], p.gamma_span(), 0.5 * p.gamma_span());
    p.mu_phase = resolve(doc, kKeys[9], 1.0, d.mu_phase);
    p.delta = resolve(doc, kKeys[10], p.omega_m, p.omega_m);
    p.eta = resolve(doc, kKeys[11], 1.0, d.eta);
    p.pump_power = resolve(doc, kKeys[12], 1.0, d.pump_power);
    p.probe_power = resolve(doc, kKeys[13], 1.0, d.probe_power);
    p.pump_wavelength = resolve(doc, kKeys[14], 1.0, d.pump_wavelength);

    for (double* phase : {&p.g1_phase, &p.g2_phase, &p.mu_phase})
    {
        if (!std::isfinite(*phase))
        {
            throw ConfigError("phases must be finite");
        }
        *phase = normalize_phase(*phase);
    }
    validate(p);
    return p;
}

SystemParams from_config_text(const std::string& text)
{
    nlohmann::json doc;
    try
    {
        doc = nlohmann::json::parse(text);
    }
    catch (const nlohmann::json::parse_error& e)
    {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return from_config(doc);
}

nlohmann::json serialize(const SystemParams& p)
{
    return {
        {"omega_m_rad_s", p.omega_m},
        {"kappa_rad_s", p.kappa},
        {"gamma1_rad_s", p.gamma1},
        {"gamma2_rad_s", p.gamma2},
        {"g1_mag_rad_s", p.g1_mag},
        {"g1_phase_rad", p.g1_phase},
        {"g2_mag_rad_s", p.g2_mag},
        {"g2_phase_rad", p.g2_phase},
        {"mu_mag_rad_s", p.mu_mag},
        {"mu_phase_rad", p.mu_phase},
        {"delta_rad_s", p.delta},
        {"eta", p.eta},
        {"pump_power_w", p.pump_power},
        {"probe_power_w", p.probe_power},
        {"pump_wavelength_m", p.pump_wavelength},
    };
}

nlohmann::json serialize_normalized(const SystemParams& p)
{
    return {
        {"omega_m_hz", p.omega_m / kTwoPi},
        {"kappa_over_omega_m", p.kappa / p.omega_m},
        {"gamma1_over_omega_m", p.gamma1 / p.omega_m},
        {"gamma2_over_omega_m", p.gamma2 / p.omega_m},
        {"g1_mag_hz", p.g1_mag / kTwoPi},
        {"g1_phase_rad", p.g1_phase},
        {"g2_mag_over_g1", p.g1_mag > 0.0 ? p.g2_mag / p.g1_mag : 0.0},
        {"g2_phase_rad", p.g2_phase},
        {"mu_mag_over_gamma_span", p.gamma_span() != 0.0 ? p.mu_mag / p.gamma_span() : 0.0},
        {"mu_phase_rad", p.mu_phase},
        {"delta_over_omega_m", p.delta / p.omega_m},
        {"eta", p.eta},
        {"pump_power_w", p.pump_power},
        {"probe_power_w", p.probe_power},
        {"pump_wavelength_m", p.pump_wavelength},
    };
}

void apply_override(nlohmann::json& doc, const std::string& assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
    {
        throw ConfigError("override must look like KEY=VALUE, got '" + assignment + "'");
    }
    const std::string key = assignment.substr(0, eq);
    nlohmann::json value;
    try
    {
        value = nlohmann::json::parse(assignment.substr(eq + 1));
    }
    catch (const nlohmann::json::parse_error&)
    {
        throw ConfigError("override value for '" + key + "' is not a number");
    }
    if (!value.is_number())
    {
        throw ConfigError("override value for '" + key + "' is not a number");
    }
    // An override replaces whichever spelling of the quantity was present.
    for (const auto& k : kKeys)
    {
        if (key == k.relative || (k.absolute && key == k.absolute))
        {
            doc.erase(k.relative);
            if (k.absolute)
            {
                doc.erase(k.absolute);
            }
        }
    }
    doc[key] = value;
}

double mu_from_normalized(const SystemParams& p, double mu_over_span)
{
    return mu_over_span * p.gamma_span();
}

double mu_to_normalized(const SystemParams& p, double mu_abs)
{
    return mu_abs / p.gamma_span();
}

double omega_from_normalized(const SystemParams& p, double omega_over_omega_m)
{
    return omega_over_omega_m * p.omega_m;
}

double omega_to_normalized(const SystemParams& p, double omega_abs)
{
    return omega_abs / p.omega_m;
}

std::uint64_t fingerprint(const SystemParams& p)
{
    // FNV-1a over the bit patterns of every field.
    std::uint64_t h = 1469598103934665603ULL;
    for (double v : {p.omega_m, p.kappa, p.gamma1, p.gamma2, p.g1_mag, p.g1_phase, p.g2_mag, p.g2_phase, p.mu_mag,
                     p.mu_phase, p.delta, p.eta, p.pump_power, p.probe_power, p.pump_wavelength})
    {
        auto bits = std::bit_cast<std::uint64_t>(v);
        for (int i = 0; i < 8; ++i)
        {
            h ^= (bits >> (8 * i)) & 0xffU;
            h *= 1099511628211ULL;
        }
    }
    return h;
}

} // namespace ptomit
