#include "ptomit/linear_response.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ptomit/errors.hpp"
#include "ptomit/parallel.hpp"

namespace ptomit
{

namespace
{

constexpr cplx kI{0.0, 1.0};
constexpr double kPoleFloor = 1e-300;

std::string describe_omega(const SystemParams& p, double omega)
{
    std::ostringstream os;
    os.precision(12);
    os << "omega/omega_m = " << omega / p.omega_m;
    return os.str();
}

cplx static_shift(const SystemParams& p, const SteadyState& s)
{
    const cplx g1 = p.g1();
    const cplx g2 = p.g2();
    return (g1 * std::conj(s.b1_bar) + std::conj(g1) * s.b1_bar) + (g2 * std::conj(s.b2_bar) + std::conj(g2) * s.b2_bar);
}

} // namespace

AlphaTerms alpha_f_terms(const SystemParams& p, double omega)
{
    AlphaTerms t;
    // The ±iω_m parts are combined with −iω before forming the complex number
    // so that ω = ±ω_m lands exactly on a zero imaginary part.
    t.alpha1_plus = cplx(p.gamma1 / 2.0, -omega - p.omega_m);
    t.alpha2_plus = cplx(p.gamma2 / 2.0, -omega - p.omega_m);
    t.alpha1_minus = cplx(p.gamma1 / 2.0, -omega + p.omega_m);
    t.alpha2_minus = cplx(p.gamma2 / 2.0, -omega + p.omega_m);
    const double mu2 = p.mu_mag * p.mu_mag;
    t.f1 = t.alpha1_minus * t.alpha2_minus + mu2;
    t.f2 = t.alpha1_plus * t.alpha2_plus + mu2;
    return t;
}

double susceptibility_floor(const SystemParams& p)
{
    return 1e-12 * p.omega_m * p.omega_m;
}

cplx lambda_of(const SystemParams& p, double omega)
{
    const AlphaTerms t = alpha_f_terms(p, omega);
    const double floor = susceptibility_floor(p);
    if (std::abs(t.f1) < floor)
    {
        throw SusceptibilityPoleError("susceptibility denominator f1 vanishes at " + describe_omega(p, omega), "f1");
    }
    if (std::abs(t.f2) < floor)
    {
        throw SusceptibilityPoleError("susceptibility denominator f2 vanishes at " + describe_omega(p, omega), "f2");
    }
    const cplx g1 = p.g1();
    const cplx g2 = p.g2();
    const cplx mu = p.mu();
    const cplx g1c = std::conj(g1);
    const cplx g2c = std::conj(g2);
    const cplx muc = std::conj(mu);
    return kI * g1 * (-kI * g1c * t.alpha2_plus - muc * g2c) / t.f2 +
           kI * g1c * (kI * g1 * t.alpha2_minus - mu * g2) / t.f1 +
           kI * g2 * (-kI * g2c * t.alpha1_plus - mu * g1c) / t.f2 +
           kI * g2c * (kI * g2 * t.alpha1_minus - muc * g1) / t.f1;
}

cplx xi_of(const SystemParams& p, const SteadyState& s, double omega)
{
    return cplx(p.kappa / 2.0, p.delta - omega) - kI * static_shift(p, s);
}

cplx xi_conj_neg_of(const SystemParams& p, const SteadyState& s, double omega)
{
    return std::conj(xi_of(p, s, -omega));
}

ProbeResponse transmission(const SystemParams& p, const SteadyState& s, double omega)
{
    ProbeResponse r;
    r.omega = omega;
    r.xi = xi_of(p, s, omega);
    r.lam = lambda_of(p, omega);
    const double n = s.n_cav;
    const cplx gam_den = xi_conj_neg_of(p, s, omega) + r.lam * n;
    if (std::abs(gam_den) < kPoleFloor)
    {
        throw PoleError("Stokes feedback denominator vanishes at " + describe_omega(p, omega), omega);
    }
    r.gam = n * r.lam / gam_den;
    const cplx den = r.xi - n * r.lam * (1.0 - r.gam);
    if (std::abs(den) < kPoleFloor)
    {
        throw PoleError("transmission denominator vanishes at " + describe_omega(p, omega), omega);
    }
    const double eps_p = derived_drive(p).eps_p;
    r.a1_minus = std::sqrt(p.eta * p.kappa) * eps_p / den;
    r.t_p = 1.0 - p.eta * p.kappa / den;
    r.abs_t = std::abs(r.t_p);
    r.psi = std::arg(r.t_p);
    return r;
}

double default_delay_step(const SystemParams& p)
{
    return 1e-6 * p.omega_m;
}

double group_delay(const SystemParams& p, const SteadyState& s, double omega, double step)
{
    if (!(step > 0.0))
    {
        throw ConfigError("group_delay: step must be positive");
    }
    const double lo = std::arg(transmission(p, s, omega - step).t_p);
    const double mid = std::arg(transmission(p, s, omega).t_p);
    const double hi = std::arg(transmission(p, s, omega + step).t_p);
    double phases[3] = {lo, mid, hi};
    unwrap_phase(phases);
    const double jump = phases[2] - phases[0];
    if (std::abs(jump) > kPi)
    {
        throw StencilError("phase changes by more than pi across the group-delay stencil at " +
                           describe_omega(p, omega) + "; reduce the step");
    }
    return jump / (2.0 * step);
}

void unwrap_phase(std::span<double> phases)
{
    for (std::size_t i = 1; i < phases.size(); ++i)
    {
        double d = phases[i] - phases[i - 1];
        d -= kTwoPi * std::round(d / kTwoPi);
        phases[i] = phases[i - 1] + d;
    }
}

std::vector<double> linspace(double lo, double hi, std::size_t points)
{
    std::vector<double> v(points);
    if (points == 1)
    {
        v[0] = lo;
        return v;
    }
    const double h = (hi - lo) / static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i)
    {
        v[i] = lo + h * static_cast<double>(i);
    }
    if (points > 1)
    {
        v.back() = hi;
    }
    return v;
}

Spectrum spectrum(const SystemParams& p, std::span<const double> grid, const SpectrumOptions& opt)
{
    return spectrum(p, solve_steady_state(p).state, grid, opt);
}

Spectrum spectrum(const SystemParams& p, const SteadyState& s, std::span<const double> grid, const SpectrumOptions& opt)
{
    if (grid.empty())
    {
        throw ConfigError("spectrum: empty grid");
    }
    Spectrum out;
    out.omegas.assign(grid.begin(), grid.end());
    if (out.omegas.size() > 1 && out.omegas.front() > out.omegas.back())
    {
        std::reverse(out.omegas.begin(), out.omegas.end());
    }
    for (std::size_t i = 1; i < out.omegas.size(); ++i)
    {
        if (!(out.omegas[i] > out.omegas[i - 1]))
        {
            throw ConfigError("spectrum: grid must be strictly monotone");
        }
    }
    out.params_fingerprint = fingerprint(p);
    out.state = s;
    out.responses.resize(out.omegas.size());
    const double step = opt.delay_step > 0.0 ? opt.delay_step : default_delay_step(p);

    parallel_for(out.omegas.size(), opt.threads, [&](std::size_t i) {
        const double w = out.omegas[i];
        try
        {
            out.responses[i] = transmission(p, s, w);
            out.responses[i].tau_g = group_delay(p, s, w, step);
        }
        catch (const PoleError& e)
        {
            throw PoleError("grid index " + std::to_string(i) + ": " + e.what(), e.omega());
        }
        catch (const SusceptibilityPoleError& e)
        {
            throw SusceptibilityPoleError("grid index " + std::to_string(i) + ": " + e.what(), e.which());
        }
        catch (const StencilError& e)
        {
            throw StencilError("grid index " + std::to_string(i) + ": " + e.what());
        }
    });

    std::vector<double> psi(out.responses.size());
    for (std::size_t i = 0; i < psi.size(); ++i)
    {
        psi[i] = out.responses[i].psi;
    }
    unwrap_phase(psi);
    for (std::size_t i = 0; i < psi.size(); ++i)
    {
        out.responses[i].psi = psi[i];
    }
    return out;
}

} // namespace ptomit
