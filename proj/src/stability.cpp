#include "ptomit/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "ptomit/errors.hpp"
#include "ptomit/parallel.hpp"

namespace ptomit
{

namespace
{

constexpr cplx kI{0.0, 1.0};

std::string format_spectrum(const SystemParams& p, std::span<const cplx> ev)
{
    std::ostringstream os;
    os.precision(8);
    os << "[";
    for (std::size_t i = 0; i < ev.size(); ++i)
    {
        os << (i ? ", " : "") << "(" << ev[i].real() / p.gamma_span() << " span, " << ev[i].imag() / p.omega_m
           << " omega_m)";
    }
    os << "]";
    return os.str();
}

void check_monotone(std::span<const double> g, const char* name)
{
    if (g.empty())
    {
        throw ConfigError(std::string(name) + " grid is empty");
    }
    const bool inc = g.size() < 2 || g[1] > g[0];
    for (std::size_t i = 1; i < g.size(); ++i)
    {
        if (inc ? !(g[i] > g[i - 1]) : !(g[i] < g[i - 1]))
        {
            throw ConfigError(std::string(name) + " grid must be strictly monotone");
        }
    }
}

} // namespace

StabilityMatrix build_stability_matrix(const SystemParams& p, const SteadyState& s)
{
    const cplx a = s.a_bar;
    const cplx ac = std::conj(a);
    const cplx g1 = p.g1();
    const cplx g2 = p.g2();
    const cplx g1c = std::conj(g1);
    const cplx g2c = std::conj(g2);
    const cplx mu = p.mu();
    const cplx muc = std::conj(mu);
    const cplx shift = (g1 * std::conj(s.b1_bar) + g1c * s.b1_bar) + (g2 * std::conj(s.b2_bar) + g2c * s.b2_bar);
    const double half_k = p.kappa / 2.0;

    // The δa* row is the conjugate of the δa row, so its detuning enters as +iΔ.
    const cplx m11 = -kI * p.delta - half_k + kI * shift;
    const cplx m22 = kI * p.delta - half_k - kI * shift;

    StabilityMatrix m;
    // clang-format off
    m << m11,             0.0,             kI * a * g1c,                     kI * a * g1,                      kI * a * g2c,                     kI * a * g2,
         0.0,             m22,             -kI * ac * g1c,                   -kI * ac * g1,                    -kI * ac * g2c,                   -kI * ac * g2,
         kI * ac * g1,    kI * a * g1,     -kI * p.omega_m - p.gamma1 / 2.0, 0.0,                              kI * mu,                          0.0,
         -kI * ac * g1c,  -kI * a * g1c,   0.0,                              kI * p.omega_m - p.gamma1 / 2.0,  0.0,                              -kI * muc,
         kI * ac * g2,    kI * a * g2,     kI * muc,                         0.0,                              -kI * p.omega_m - p.gamma2 / 2.0, 0.0,
         -kI * ac * g2c,  -kI * a * g2c,   0.0,                              -kI * mu,                         0.0,                              kI * p.omega_m - p.gamma2 / 2.0;
    // clang-format on
    return m;
}

StabilityReport classify(const StabilityMatrix& m)
{
    if (!m.allFinite())
    {
        throw NumericalError("stability matrix has non-finite entries");
    }
    Eigen::ComplexEigenSolver<StabilityMatrix> solver(m, false);
    if (solver.info() != Eigen::Success)
    {
        throw NumericalError("eigensolver did not converge on the stability matrix");
    }
    StabilityReport r;
    for (int i = 0; i < 6; ++i)
    {
        r.eigenvalues[static_cast<std::size_t>(i)] = solver.eigenvalues()(i);
    }
    std::sort(r.eigenvalues.begin(), r.eigenvalues.end(), [](const cplx& x, const cplx& y) {
        return x.real() != y.real() ? x.real() > y.real() : x.imag() > y.imag();
    });
    r.margin = r.eigenvalues.front().real();
    r.stable = r.margin < 0.0;
    return r;
}

StabilityReport stability_at(const SystemParams& p)
{
    const auto sol = solve_steady_state(p);
    return classify(build_stability_matrix(p, sol.state));
}

void require_stable(const SystemParams& p, const std::string& context)
{
    const auto r = stability_at(p);
    if (!r.stable)
    {
        std::ostringstream os;
        os.precision(10);
        os << (context.empty() ? "" : context + ": ") << "system is unstable; leading eigenvalue "
           << r.eigenvalues.front().real() << (r.eigenvalues.front().imag() < 0 ? " - " : " + ")
           << std::abs(r.eigenvalues.front().imag()) << "i rad/s (max real part = " << r.margin / p.gamma_span()
           << " (gamma1-gamma2))";
        throw UnstableError(os.str(), r.margin);
    }
}

const char* to_string(CellStatus s)
{
    switch (s)
    {
    case CellStatus::stable:
        return "stable";
    case CellStatus::unstable:
        return "unstable";
    case CellStatus::steady_state_failed:
        return "steady_state_failed";
    }
    return "unknown";
}

std::size_t StabilityMap::count(CellStatus s) const
{
    return static_cast<std::size_t>(std::count(cells.begin(), cells.end(), s));
}

StabilityMap stability_map(const SystemParams& p, std::span<const double> g2_mag_grid,
                           std::span<const double> phi2_grid, double mu_mag, unsigned threads)
{
    check_monotone(g2_mag_grid, "g2 magnitude");
    check_monotone(phi2_grid, "phi2");
    StabilityMap map;
    map.g2_mags.assign(g2_mag_grid.begin(), g2_mag_grid.end());
    map.phi2s.assign(phi2_grid.begin(), phi2_grid.end());
    const std::size_t cols = map.phi2s.size();
    const std::size_t total = map.g2_mags.size() * cols;
    map.cells.resize(total);
    map.margins.resize(total);

    parallel_for(total, threads, [&](std::size_t k) {
        SystemParams q = p;
        q.g2_mag = map.g2_mags[k / cols];
        q.g2_phase = normalize_phase(map.phi2s[k % cols]);
        q.mu_mag = mu_mag;
        try
        {
            const auto r = stability_at(q);
            map.cells[k] = r.stable ? CellStatus::stable : CellStatus::unstable;
            map.margins[k] = r.margin;
        }
        catch (const SingularityError&)
        {
            map.cells[k] = CellStatus::steady_state_failed;
            map.margins[k] = std::numeric_limits<double>::quiet_NaN();
        }
        catch (const InfeasibleError&)
        {
            map.cells[k] = CellStatus::steady_state_failed;
            map.margins[k] = std::numeric_limits<double>::quiet_NaN();
        }
    });
    return map;
}

std::array<cplx, 2> mechanical_pair(const SystemParams& p, const MechanicalWindow& window)
{
    const auto r = stability_at(p);
    const cplx centre(-(p.gamma1 + p.gamma2) / 4.0, p.omega_m);
    std::vector<cplx> inside;
    for (const cplx& z : r.eigenvalues)
    {
        const double f = z.imag() / p.omega_m;
        if (f > window.lo && f < window.hi)
        {
            inside.push_back(z);
        }
    }
    if (inside.size() < 2)
    {
        throw SelectionError("fewer than two eigenvalues in the mechanical window; spectrum " +
                             format_spectrum(p, r.eigenvalues));
    }
    std::sort(inside.begin(), inside.end(),
              [&](const cplx& x, const cplx& y) { return std::abs(x - centre) < std::abs(y - centre); });
    std::array<cplx, 2> pair{inside[0], inside[1]};
    if (pair[0].real() < pair[1].real())
    {
        std::swap(pair[0], pair[1]);
    }
    return pair;
}

RootLocus mechanical_root_loci(const SystemParams& p, std::span<const double> phi2_grid, const RootLocusOptions& opt)
{
    check_monotone(phi2_grid, "phi2");
    const std::size_t n = phi2_grid.size();
    std::vector<std::array<cplx, 2>> raw(n);
    parallel_for(n, opt.threads, [&](std::size_t i) {
        SystemParams q = p;
        q.g2_phase = normalize_phase(phi2_grid[i]);
        raw[i] = mechanical_pair(q, opt.window);
    });

    RootLocus locus;
    locus.phi2_grid.assign(phi2_grid.begin(), phi2_grid.end());
    locus.tracks[0].reserve(n);
    locus.tracks[1].reserve(n);
    const double ep_radius = opt.ep_radius_over_span * p.gamma_span();
    for (std::size_t i = 0; i < n; ++i)
    {
        cplx a = raw[i][0];
        cplx b = raw[i][1];
        if (i > 0)
        {
            const cplx pa = locus.tracks[0].back();
            const cplx pb = locus.tracks[1].back();
            // Two tracks: the optimal assignment is the cheaper of two permutations.
            if (std::abs(a - pb) + std::abs(b - pa) < std::abs(a - pa) + std::abs(b - pb))
            {
                std::swap(a, b);
            }
        }
        locus.tracks[0].push_back(a);
        locus.tracks[1].push_back(b);
        locus.gaps.push_back(std::abs(a - b));
        locus.ep_neighborhood.push_back(locus.gaps.back() < ep_radius);
    }
    return locus;
}

double mechanical_gap(const SystemParams& p, double mu_mag, const MechanicalWindow& window)
{
    SystemParams q = p;
    q.mu_mag = mu_mag;
    const auto pair = mechanical_pair(q, window);
    return std::abs(pair[0] - pair[1]);
}

EPResult locate_ep(const SystemParams& p, double mu_lo, double mu_hi, const EPOptions& opt)
{
    if (!(mu_lo >= 0.0) || !(mu_hi > mu_lo))
    {
        throw ConfigError("locate_ep: bracket must satisfy 0 <= lo < hi");
    }
    const double tol = opt.tol_over_span * p.gamma_span();
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    auto gap = [&](double mu) { return mechanical_gap(p, mu, opt.window); };

    double a = mu_lo;
    double b = mu_hi;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = gap(x1);
    double f2 = gap(x2);
    for (int iter = 0; iter < 500 && (b - a) > tol; ++iter)
    {
        if (f1 <= f2)
        {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = gap(x1);
        }
        else
        {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = gap(x2);
        }
    }
    EPResult r;
    r.mu_ep = f1 <= f2 ? x1 : x2;
    r.gap_at_ep = std::min(f1, f2);
    r.bracket_lo = mu_lo;
    r.bracket_hi = mu_hi;
    const double edge = std::max(10.0 * tol, 1e-9 * (mu_hi - mu_lo));
    if (r.mu_ep - mu_lo <= edge || mu_hi - r.mu_ep <= edge)
    {
        std::ostringstream os;
        os.precision(10);
        os << "no interior minimum of the mechanical gap in mu/(gamma1-gamma2) in [" << mu_lo / p.gamma_span()
           << ", " << mu_hi / p.gamma_span() << "]";
        throw BracketError(os.str());
    }
    r.coalesced = r.gap_at_ep <= 1e-6 * p.gamma_span();
    return r;
}

} // namespace ptomit
