#include "ptomit/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ptomit/errors.hpp"
#include "ptomit/parallel.hpp"
#include "ptomit/stability.hpp"

namespace ptomit
{

namespace
{

constexpr std::size_t kMinBandPoints = 50;

std::vector<double> default_omega_grid(const SystemParams& p)
{
    return linspace(0.98 * p.omega_m, 1.02 * p.omega_m, 2001);
}

std::string phi2_label(double phi2)
{
    std::ostringstream os;
    os.precision(10);
    os << "phi2 = " << phi2 << " rad";
    return os.str();
}

SweepTable run_sweep(const SystemParams& p, std::span<const double> phi2_grid, const SweepOptions& opt, Quantity q)
{
    if (phi2_grid.empty())
    {
        throw ConfigError("sweep: empty phi2 grid");
    }
    const std::vector<double> omegas = opt.omega_grid.empty() ? default_omega_grid(p) : opt.omega_grid;
    bool split = opt.mode == BandMode::split;
    if (opt.mode == BandMode::automatic)
    {
        split = is_unbroken_phase(p);
    }

    SweepTable table;
    table.axis_name = "phi2_rad";
    table.rows.resize(phi2_grid.size());
    parallel_for(phi2_grid.size(), opt.threads, [&](std::size_t i) {
        SystemParams v = p;
        v.g2_phase = normalize_phase(phi2_grid[i]);
        require_stable(v, phi2_label(phi2_grid[i]));
        const Spectrum spec = spectrum(v, omegas);
        const std::vector<double> values = curve_values(spec, q);
        SweepRow& row = table.rows[i];
        row.axis_value = phi2_grid[i];
        if (split)
        {
            row.bands.push_back(measure_band(spec.omegas, values, Band::lower, p.omega_m));
            row.bands.push_back(measure_band(spec.omegas, values, Band::upper, p.omega_m));
        }
        else
        {
            row.bands.push_back(measure_band(spec.omegas, values, Band::single, p.omega_m));
        }
        for (const auto& b : row.bands)
        {
            if (b.status == BandStatus::ok)
            {
                row.total += b.product;
            }
        }
    });
    return table;
}

} // namespace

const char* to_string(Band b)
{
    switch (b)
    {
    case Band::lower:
        return "lower";
    case Band::upper:
        return "upper";
    case Band::single:
        return "single";
    }
    return "unknown";
}

const char* to_string(BandStatus s)
{
    switch (s)
    {
    case BandStatus::ok:
        return "ok";
    case BandStatus::advance:
        return "advance";
    case BandStatus::undefined:
        return "undefined";
    }
    return "unknown";
}

std::vector<double> curve_values(const Spectrum& s, Quantity q)
{
    std::vector<double> v(s.responses.size());
    for (std::size_t i = 0; i < v.size(); ++i)
    {
        v[i] = q == Quantity::transmission ? s.responses[i].abs_t : s.responses[i].tau_g;
    }
    return v;
}

std::vector<std::size_t> band_indices(std::span<const double> omegas, Band band, double omega_m)
{
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < omegas.size(); ++i)
    {
        const bool in = band == Band::single || (band == Band::lower && omegas[i] < omega_m) ||
                        (band == Band::upper && omegas[i] > omega_m);
        if (in)
        {
            idx.push_back(i);
        }
    }
    return idx;
}

Peak find_band_peak(std::span<const double> omegas, std::span<const double> values, Band band, double omega_m)
{
    if (omegas.size() != values.size())
    {
        throw ConfigError("find_band_peak: grid and values differ in length");
    }
    const auto idx = band_indices(omegas, band, omega_m);
    if (idx.size() < kMinBandPoints)
    {
        throw ConfigError(std::string("find_band_peak: fewer than 50 grid points in the ") + to_string(band) + " band");
    }
    std::size_t best = 0;
    for (std::size_t k = 1; k < idx.size(); ++k)
    {
        if (values[idx[k]] > values[idx[best]])
        {
            best = k;
        }
    }
    if (best == 0 || best + 1 == idx.size())
    {
        throw BoundaryError(std::string("maximum of the ") + to_string(band) + " band lies on the grid boundary");
    }
    const std::size_t i = idx[best];
    const double y0 = values[i - 1];
    const double y1 = values[i];
    const double y2 = values[i + 1];
    const double h_lo = omegas[i] - omegas[i - 1];
    const double h_hi = omegas[i + 1] - omegas[i];
    // Vertex of the parabola through the three points (non-uniform spacing).
    const double d1 = (y1 - y0) / h_lo;
    const double d2 = (y2 - y1) / h_hi;
    const double curv = (d2 - d1) / (h_lo + h_hi);  // half the second derivative
    Peak pk;
    pk.index = i;
    if (curv < 0.0)
    {
        const double slope_mid = d1 + curv * h_lo;  // slope at omegas[i]
        const double shift = std::clamp(-slope_mid / (2.0 * curv), -h_lo, h_hi);
        pk.omega = omegas[i] + shift;
        pk.value = y1 + slope_mid * shift + curv * shift * shift;
    }
    else
    {
        pk.omega = omegas[i];
        pk.value = y1;
    }
    return pk;
}

Width hwhm(std::span<const double> omegas, std::span<const double> values, const Peak& peak, Band band,
           double omega_m)
{
    if (!(peak.value > 0.0))
    {
        throw BandwidthUndefinedError("bandwidth undefined: peak value is not positive");
    }
    const auto idx = band_indices(omegas, band, omega_m);
    const auto pos = std::find(idx.begin(), idx.end(), peak.index);
    if (pos == idx.end())
    {
        throw ConfigError("hwhm: peak index is outside the band");
    }
    const double half = peak.value / 2.0;
    const std::size_t k0 = static_cast<std::size_t>(pos - idx.begin());

    double lo = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t k = k0; k > 0; --k)
    {
        const std::size_t j = idx[k];
        const std::size_t jm = idx[k - 1];
        if (values[jm] < half && values[j] >= half)
        {
            lo = omegas[jm] + (half - values[jm]) / (values[j] - values[jm]) * (omegas[j] - omegas[jm]);
            break;
        }
    }
    double hi = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t k = k0; k + 1 < idx.size(); ++k)
    {
        const std::size_t j = idx[k];
        const std::size_t jp = idx[k + 1];
        if (values[jp] < half && values[j] >= half)
        {
            hi = omegas[j] + (values[j] - half) / (values[j] - values[jp]) * (omegas[jp] - omegas[j]);
            break;
        }
    }
    Width w;
    if (!std::isnan(lo) && !std::isnan(hi))
    {
        w.hwhm = (hi - lo) / 2.0;
    }
    else if (!std::isnan(hi))
    {
        w.hwhm = hi - peak.omega;
        w.asymmetric_truncation = true;
    }
    else if (!std::isnan(lo))
    {
        w.hwhm = peak.omega - lo;
        w.asymmetric_truncation = true;
    }
    else
    {
        throw BandwidthUndefinedError(std::string("no half-maximum crossing in the ") + to_string(band) + " band");
    }
    return w;
}

BandMetrics measure_band(std::span<const double> omegas, std::span<const double> values, Band band, double omega_m)
{
    BandMetrics m;
    m.band = band;
    Peak pk;
    try
    {
        pk = find_band_peak(omegas, values, band, omega_m);
    }
    catch (const BoundaryError& e)
    {
        m.status = BandStatus::undefined;
        m.note = e.what();
        return m;
    }
    m.peak_omega = pk.omega;
    m.peak_value = pk.value;
    if (!(pk.value > 0.0))
    {
        m.status = BandStatus::advance;
        m.note = "peak value is not positive";
        return m;
    }
    try
    {
        const Width w = hwhm(omegas, values, pk, band, omega_m);
        m.hwhm = w.hwhm;
        m.asymmetric_truncation = w.asymmetric_truncation;
        m.product = m.peak_value * m.hwhm;
        m.status = BandStatus::ok;
    }
    catch (const BandwidthUndefinedError& e)
    {
        m.status = BandStatus::undefined;
        m.note = e.what();
    }
    return m;
}

bool is_unbroken_phase(const SystemParams& p)
{
    SystemParams q = p;
    q.g2_phase = kPi / 2.0;
    const auto pair = mechanical_pair(q);
    const cplx d = pair[0] - pair[1];
    return std::abs(d.imag()) > std::abs(d.real());
}

SweepTable gain_bandwidth_sweep(const SystemParams& p, std::span<const double> phi2_grid, const SweepOptions& opt)
{
    return run_sweep(p, phi2_grid, opt, Quantity::transmission);
}

SweepTable delay_bandwidth_sweep(const SystemParams& p, std::span<const double> phi2_grid, const SweepOptions& opt)
{
    return run_sweep(p, phi2_grid, opt, Quantity::delay);
}

Map2D map2d(const SystemParams& p, std::span<const double> omega_grid, std::span<const double> mu_grid, double phi2,
            unsigned threads)
{
    if (omega_grid.empty() || mu_grid.empty())
    {
        throw ConfigError("map2d: empty grid");
    }
    for (auto g : {omega_grid, mu_grid})
    {
        for (std::size_t i = 1; i < g.size(); ++i)
        {
            if (!(g[i] > g[i - 1]))
            {
                throw ConfigError("map2d: grids must be strictly increasing");
            }
        }
    }
    Map2D m;
    m.omegas.assign(omega_grid.begin(), omega_grid.end());
    m.mus.assign(mu_grid.begin(), mu_grid.end());
    m.omega_m = p.omega_m;
    m.gamma_span = p.gamma_span();
    m.phi2 = normalize_phase(phi2);
    const std::size_t cols = m.omegas.size();
    m.abs_t.assign(m.mus.size() * cols, std::numeric_limits<double>::quiet_NaN());
    std::vector<std::vector<CellError>> row_errors(m.mus.size());

    parallel_for(m.mus.size(), threads, [&](std::size_t r) {
        SystemParams q = p;
        q.mu_mag = m.mus[r];
        q.g2_phase = m.phi2;
        SteadyState s;
        try
        {
            s = solve_steady_state(q).state;
        }
        catch (const PhysicsError& e)
        {
            for (std::size_t c = 0; c < cols; ++c)
            {
                row_errors[r].push_back({r, c, std::string("steady state: ") + e.what()});
            }
            return;
        }
        for (std::size_t c = 0; c < cols; ++c)
        {
            try
            {
                m.abs_t[r * cols + c] = transmission(q, s, m.omegas[c]).abs_t;
            }
            catch (const PhysicsError& e)
            {
                row_errors[r].push_back({r, c, e.what()});
            }
        }
    });
    for (auto& re : row_errors)
    {
        m.errors.insert(m.errors.end(), re.begin(), re.end());
    }
    return m;
}

} // namespace ptomit
