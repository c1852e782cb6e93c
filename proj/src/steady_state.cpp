#include "ptomit/steady_state.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/tools/toms748_solve.hpp>

#include "ptomit/errors.hpp"

namespace ptomit
{

namespace
{

constexpr cplx kI{0.0, 1.0};

struct Cubic
{
    // n·[(Δ − c·n)² + (κ/2)²] − F
    double c;
    double delta;
    double half_kappa;
    double forcing;

    double operator()(double n) const
    {
        const double d = delta - c * n;
        return n * (d * d + half_kappa * half_kappa) - forcing;
    }

    // Sum of the magnitudes of the individual terms, for relative residuals.
    double scale(double n) const
    {
        const double d = delta - c * n;
        return std::abs(n) * (d * d + half_kappa * half_kappa) + std::abs(forcing);
    }
};

double bisect_root(const Cubic& f, double lo, double hi)
{
    boost::uintmax_t max_iter = 200;
    auto tol = boost::math::tools::eps_tolerance<double>(52);
    const auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, tol, max_iter);
    return 0.5 * (a + b);
}

} // namespace

MechanicalResponse mechanical_response(const SystemParams& p)
{
    const cplx g1 = p.g1();
    const cplx g2 = p.g2();
    const cplx mu = p.mu();
    const cplx d1 = kI * p.omega_m + p.gamma1 / 2.0;
    const cplx d2 = kI * p.omega_m + p.gamma2 / 2.0;
    const cplx den = d1 * d2 + std::norm(mu);
    if (std::abs(den) < 1e-12 * p.omega_m * p.omega_m)
    {
        throw SingularityError("mechanical denominator (i*omega_m+gamma1/2)(i*omega_m+gamma2/2)+|mu|^2 vanishes");
    }
    MechanicalResponse r;
    r.b1_per_n = (kI * g1 * d2 - mu * g2) / den;
    r.b2_per_n = (kI * g2 + kI * std::conj(mu) * r.b1_per_n) / d2;
    return r;
}

double effective_shift_coefficient(const SystemParams& p)
{
    const auto r = mechanical_response(p);
    return 2.0 * (std::conj(p.g1()) * r.b1_per_n).real() + 2.0 * (std::conj(p.g2()) * r.b2_per_n).real();
}

double cubic_relative_residual(const SystemParams& p, double n)
{
    const double eps = derived_drive(p).eps_l;
    const Cubic f{effective_shift_coefficient(p), p.delta, p.kappa / 2.0, p.eta * p.kappa * eps * eps};
    const double s = f.scale(n);
    return s > 0.0 ? std::abs(f(n)) / s : 0.0;
}

SteadyStateSolution solve_steady_state(const SystemParams& p)
{
    validate(p);
    const auto mech = mechanical_response(p);
    const double c = 2.0 * (std::conj(p.g1()) * mech.b1_per_n).real() + 2.0 * (std::conj(p.g2()) * mech.b2_per_n).real();
    const double eps = derived_drive(p).eps_l;
    const double forcing = p.eta * p.kappa * eps * eps;
    const Cubic f{c, p.delta, p.kappa / 2.0, forcing};

    SteadyStateSolution out;
    if (forcing == 0.0)
    {
        out.diagnostics.cubic_roots = {0.0};
        return out;
    }

    // Every root satisfies n ≤ F/(κ/2)², well inside this bound.
    const double n_upper = 4.0 * p.eta * eps * eps / p.kappa * (1.0 + 4.0 * p.delta * p.delta / (p.kappa * p.kappa));

    // Split [0, n_upper] at the stationary points of the cubic so that each
    // piece is monotone and holds at most one root.
    std::vector<double> knots{0.0};
    if (c != 0.0)
    {
        // d/dn: 3c²n² − 4Δc n + Δ² + κ²/4
        const double qa = 3.0 * c * c;
        const double qb = -4.0 * p.delta * c;
        const double qc = p.delta * p.delta + p.kappa * p.kappa / 4.0;
        const double disc = qb * qb - 4.0 * qa * qc;
        if (disc > 0.0)
        {
            const double sq = std::sqrt(disc);
            const double q = -0.5 * (qb + std::copysign(sq, qb));
            for (double r : {q / qa, qc / q})
            {
                if (r > 0.0 && r < n_upper)
                {
                    knots.push_back(r);
                }
            }
        }
    }
    knots.push_back(n_upper);
    std::sort(knots.begin(), knots.end());

    for (std::size_t i = 0; i + 1 < knots.size(); ++i)
    {
        const double lo = knots[i];
        const double hi = knots[i + 1];
        const double flo = f(lo);
        const double fhi = f(hi);
        if (flo == 0.0)
        {
            out.diagnostics.cubic_roots.push_back(lo);
        }
        else if (flo * fhi < 0.0)
        {
            out.diagnostics.cubic_roots.push_back(bisect_root(f, lo, hi));
        }
    }
    auto& roots = out.diagnostics.cubic_roots;
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
    if (roots.empty() || !(roots.front() > 0.0))
    {
        std::ostringstream os;
        os << "no positive real root for the intracavity photon number (c = " << c << ")";
        throw InfeasibleError(os.str());
    }
    out.diagnostics.selected_index = 0;
    out.diagnostics.multistable = roots.size() >= 3;

    const double n = roots.front();
    SteadyState& s = out.state;
    s.a_bar = std::sqrt(p.eta * p.kappa) * eps / (kI * p.delta + p.kappa / 2.0 - kI * (c * n));
    s.n_cav = std::norm(s.a_bar);
    s.b1_bar = mech.b1_per_n * s.n_cav;
    s.b2_bar = mech.b2_per_n * s.n_cav;
    return out;
}

double steady_residual(const SystemParams& p, const SteadyState& s)
{
    const cplx g1 = p.g1();
    const cplx g2 = p.g2();
    const cplx mu = p.mu();
    const double eps = derived_drive(p).eps_l;
    const double n = std::norm(s.a_bar);
    const cplx shift = (g1 * std::conj(s.b1_bar) + std::conj(g1) * s.b1_bar) +
                       (g2 * std::conj(s.b2_bar) + std::conj(g2) * s.b2_bar);
    const cplx da = -kI * p.delta * s.a_bar + kI * s.a_bar * shift + std::sqrt(p.eta * p.kappa) * eps -
                    p.kappa / 2.0 * s.a_bar;
    const cplx db1 = -kI * p.omega_m * s.b1_bar + kI * mu * s.b2_bar + kI * g1 * n - p.gamma1 / 2.0 * s.b1_bar;
    const cplx db2 =
        -kI * p.omega_m * s.b2_bar + kI * std::conj(mu) * s.b1_bar + kI * g2 * n - p.gamma2 / 2.0 * s.b2_bar;
    return std::max({std::abs(da), std::abs(db1), std::abs(db2)});
}

} // namespace ptomit
