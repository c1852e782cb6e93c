#include "ptomit/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include <boost/numeric/odeint.hpp>

#include "ptomit/errors.hpp"
#include "ptomit/linear_response.hpp"
#include "ptomit/parallel.hpp"
#include "ptomit/stability.hpp"

namespace ptomit
{

namespace
{

namespace odeint = boost::numeric::odeint;

constexpr cplx kI{0.0, 1.0};

// Re/Im interleaved (δa, δa*, δb₁, δb₁*, δb₂, δb₂*).
using State = std::array<double, 12>;

cplx at(const State& x, int k)
{
    return {x[2 * k], x[2 * k + 1]};
}

// Linearized equations in scaled time τ = ω_m t, unit probe amplitude.
struct LinearizedSystem
{
    cplx a, ac, g1, g1c, g2, g2c, mu, muc;
    double delta, half_kappa, shift, omega_m, half_g1, half_g2;
    double drive;  // √(ηκ) / ω_m
    double w;      // ω / ω_m

    void operator()(const State& x, State& dxdt, double tau) const
    {
        const cplx da = at(x, 0), dac = at(x, 1), db1 = at(x, 2), db1c = at(x, 3), db2 = at(x, 4), db2c = at(x, 5);
        const cplx e = std::polar(1.0, -w * tau);
        const cplx ca = drive * e;
        std::array<cplx, 6> r;
        r[0] = -kI * delta * da - half_kappa * da + kI * da * shift + kI * a * (g1 * db1c + g1c * db1) +
               kI * a * (g2 * db2c + g2c * db2) + ca;
        r[1] = kI * delta * dac - half_kappa * dac - kI * dac * shift - kI * ac * (g1c * db1 + g1 * db1c) -
               kI * ac * (g2c * db2 + g2 * db2c) + std::conj(ca);
        r[2] = -kI * omega_m * db1 - half_g1 * db1 + kI * g1 * (a * dac + ac * da) + kI * mu * db2;
        r[3] = kI * omega_m * db1c - half_g1 * db1c - kI * g1c * (ac * da + a * dac) - kI * muc * db2c;
        r[4] = -kI * omega_m * db2 - half_g2 * db2 + kI * g2 * (a * dac + ac * da) + kI * muc * db1;
        r[5] = kI * omega_m * db2c - half_g2 * db2c - kI * g2c * (ac * da + a * dac) - kI * mu * db1c;
        for (int k = 0; k < 6; ++k)
        {
            dxdt[2 * k] = r[k].real();
            dxdt[2 * k + 1] = r[k].imag();
        }
    }
};

LinearizedSystem make_system(const SystemParams& p, const SteadyState& s, double omega)
{
    const double scale = 1.0 / p.omega_m;
    LinearizedSystem sys{};
    sys.a = s.a_bar;
    sys.ac = std::conj(s.a_bar);
    sys.g1 = p.g1() * scale;
    sys.g1c = std::conj(sys.g1);
    sys.g2 = p.g2() * scale;
    sys.g2c = std::conj(sys.g2);
    sys.mu = p.mu() * scale;
    sys.muc = std::conj(sys.mu);
    sys.delta = p.delta * scale;
    sys.half_kappa = p.kappa / 2.0 * scale;
    sys.shift = ((p.g1() * std::conj(s.b1_bar) + std::conj(p.g1()) * s.b1_bar) +
                 (p.g2() * std::conj(s.b2_bar) + std::conj(p.g2()) * s.b2_bar))
                    .real() *
                scale;
    sys.omega_m = 1.0;
    sys.half_g1 = p.gamma1 / 2.0 * scale;
    sys.half_g2 = p.gamma2 / 2.0 * scale;
    sys.drive = std::sqrt(p.eta * p.kappa) * scale;
    sys.w = omega * scale;
    return sys;
}

struct Window
{
    cplx a_minus{}, a_plus{}, b_minus{}, c_minus{}, a_2minus{}, a_2plus{};
};

} // namespace

DemodResult integrate_linearized(const SystemParams& p, const SteadyState& s, double omega, const OracleOptions& opt)
{
    if (!(omega > 0.0))
    {
        throw ConfigError("integrate_linearized: probe offset must be positive");
    }
    if (opt.periods < 1 || opt.samples_per_period < 8 || !(opt.rel_tol > 0.0))
    {
        throw ConfigError("integrate_linearized: invalid demodulation options");
    }
    const auto report = classify(build_stability_matrix(p, s));
    if (!report.stable)
    {
        std::ostringstream os;
        os << "refusing to integrate an unstable system (max real part " << report.margin << " rad/s)";
        throw UnstableError(os.str(), report.margin);
    }
    const double min_horizon = 20.0 / std::abs(report.margin);
    const double horizon = opt.horizon > 0.0 ? opt.horizon : 30.0 / std::abs(report.margin);
    if (horizon < min_horizon)
    {
        throw ConfigError("integrate_linearized: horizon shorter than 20/|margin|");
    }

    const LinearizedSystem sys = make_system(p, s, omega);
    const double tau_end = horizon * p.omega_m;
    const double period = kTwoPi / sys.w;
    const int per_window = opt.periods * opt.samples_per_period;
    const double dtau = period / opt.samples_per_period;
    const double tau_start = tau_end - 2.0 * opt.periods * period;
    if (!(tau_start > 0.0))
    {
        throw ConfigError("integrate_linearized: horizon shorter than two demodulation windows");
    }

    std::vector<double> times;
    times.reserve(static_cast<std::size_t>(2 * per_window + 1));
    times.push_back(0.0);
    for (int k = 0; k < 2 * per_window; ++k)
    {
        times.push_back(tau_start + dtau * k);
    }

    std::array<Window, 2> win{};
    double max_abs = 0.0;
    double max_mismatch = 0.0;
    int sample = -1;  // the first call is at τ = 0
    auto observer = [&](const State& x, double tau) {
        const int k = sample++;
        if (k < 0)
        {
            return;
        }
        Window& w = win[static_cast<std::size_t>(k / per_window)];
        const cplx da = at(x, 0);
        const cplx e = std::polar(1.0, sys.w * tau);  // e^{+iωt}
        w.a_minus += da * e;
        w.a_plus += da * std::conj(e);
        w.b_minus += at(x, 2) * e;
        w.c_minus += at(x, 4) * e;
        w.a_2minus += da * e * e;
        w.a_2plus += da * std::conj(e * e);
        max_abs = std::max(max_abs, std::abs(da));
        max_mismatch = std::max(max_mismatch, std::abs(at(x, 1) - std::conj(da)));
    };

    State x{};
    const double amp_scale = 2.0 * std::sqrt(p.eta * p.kappa) / p.kappa;
    auto stepper = odeint::make_controlled<odeint::runge_kutta_fehlberg78<State>>(opt.rel_tol * amp_scale, opt.rel_tol);
    odeint::integrate_times(stepper, sys, x, times.begin(), times.end(), dtau / 4.0, observer);

    const double eps_p = derived_drive(p).eps_p;
    const double inv_n = 1.0 / per_window;
    DemodResult r;
    r.horizon = horizon;
    r.a1_minus = win[1].a_minus * inv_n * eps_p;
    r.a1_plus = win[1].a_plus * inv_n * eps_p;
    r.b1_minus = win[1].b_minus * inv_n * eps_p;
    r.c1_minus = win[1].c_minus * inv_n * eps_p;

    const double fund = std::abs(win[1].a_minus);
    if (fund > 0.0)
    {
        const double drift = std::max({std::abs(win[1].a_minus - win[0].a_minus), std::abs(win[1].a_plus - win[0].a_plus),
                                       std::abs(win[1].b_minus - win[0].b_minus), std::abs(win[1].c_minus - win[0].c_minus)});
        r.transient_decay = drift / fund;
        r.harmonic_ratio = std::max(std::abs(win[1].a_2minus), std::abs(win[1].a_2plus)) / fund;
    }
    r.conjugate_mismatch = max_abs > 0.0 ? max_mismatch / max_abs : 0.0;
    if (r.transient_decay > opt.decay_threshold)
    {
        std::ostringstream os;
        os << "transient has not decayed at the horizon (relative drift " << r.transient_decay << ")";
        throw InconclusiveError(os.str(), r.transient_decay);
    }
    return r;
}

OracleComparison oracle_compare(const SystemParams& p, std::span<const double> omega_grid, const OracleOptions& opt,
                                unsigned threads)
{
    require_stable(p, "oracle_compare");
    const SteadyState s = solve_steady_state(p).state;
    OracleComparison out;
    out.points.resize(omega_grid.size());
    parallel_for(omega_grid.size(), threads, [&](std::size_t i) {
        OraclePoint& pt = out.points[i];
        pt.omega = omega_grid[i];
        pt.formula = transmission(p, s, pt.omega).a1_minus;
        const DemodResult d = integrate_linearized(p, s, pt.omega, opt);
        pt.measured = d.a1_minus;
        pt.transient_decay = d.transient_decay;
        const double ref = std::abs(pt.formula);
        pt.rel_error = ref > 0.0 ? std::abs(pt.measured - pt.formula) / ref : std::abs(pt.measured);
    });
    for (const auto& pt : out.points)
    {
        out.max_rel_error = std::max(out.max_rel_error, pt.rel_error);
    }
    return out;
}

} // namespace ptomit
