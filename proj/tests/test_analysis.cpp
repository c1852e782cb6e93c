#include <doctest.h>

#include <cmath>
#include <numeric>

#include "ptomit/analysis.hpp"
#include "ptomit/errors.hpp"
#include "test_support.hpp"

using namespace ptomit;

namespace
{

constexpr double kOmegaM = 1.0;

std::vector<double> grid(double lo, double hi, std::size_t n)
{
    return linspace(lo, hi, n);
}

// Lorentzian peak of height a, centre w0 and half width b.
std::vector<double> lorentzian(std::span<const double> w, double a, double w0, double b)
{
    std::vector<double> y(w.size());
    for (std::size_t i = 0; i < w.size(); ++i)
    {
        const double x = (w[i] - w0) / b;
        y[i] = a / (1.0 + x * x);
    }
    return y;
}

} // namespace

TEST_CASE("band bookkeeping")
{
    const auto w = grid(0.98, 1.02, 2001);
    const auto lo = band_indices(w, Band::lower, kOmegaM);
    const auto hi = band_indices(w, Band::upper, kOmegaM);
    CHECK(band_indices(w, Band::single, kOmegaM).size() == w.size());
    // ω_m itself sits on the grid and belongs to neither side.
    CHECK(lo.size() == 1000);
    CHECK(hi.size() == 1000);
    CHECK(w[lo.back()] < kOmegaM);
    CHECK(w[hi.front()] > kOmegaM);
}

TEST_CASE("peak and width on synthetic curves")
{
    const auto w = grid(0.98, 1.02, 2001);
    SUBCASE("Lorentzian")
    {
        const double w0 = 0.99312345;
        const double b = 1.7e-3;
        const auto y = lorentzian(w, 2.5, w0, b);
        const Peak pk = find_band_peak(w, y, Band::lower, kOmegaM);
        CHECK(std::abs(pk.omega - w0) <= 1e-6);
        CHECK(pk.value == doctest::Approx(2.5).epsilon(1e-4));
        const Width width = hwhm(w, y, pk, Band::lower, kOmegaM);
        CHECK_FALSE(width.asymmetric_truncation);
        CHECK(width.hwhm == doctest::Approx(b).epsilon(1e-3));
        const BandMetrics m = measure_band(w, y, Band::lower, kOmegaM);
        CHECK(m.status == BandStatus::ok);
        CHECK(m.product == m.peak_value * m.hwhm);
    }
    SUBCASE("peak on the band edge")
    {
        const auto y = lorentzian(w, 1.0, 1.03, 1e-3);
        CHECK_THROWS_AS(find_band_peak(w, y, Band::upper, kOmegaM), BoundaryError);
        CHECK(measure_band(w, y, Band::upper, kOmegaM).status == BandStatus::undefined);
    }
    SUBCASE("curve never falls to half")
    {
        std::vector<double> y = lorentzian(w, 1.0, 0.99, 5e-3);
        for (double& v : y)
        {
            v += 10.0;
        }
        const Peak pk = find_band_peak(w, y, Band::lower, kOmegaM);
        CHECK_THROWS_AS(hwhm(w, y, pk, Band::lower, kOmegaM), BandwidthUndefinedError);
        CHECK(measure_band(w, y, Band::lower, kOmegaM).status == BandStatus::undefined);
    }
    SUBCASE("one-sided crossing is flagged")
    {
        const auto y = lorentzian(w, 1.0, 0.982, 4e-3);
        const BandMetrics m = measure_band(w, y, Band::lower, kOmegaM);
        CHECK(m.status == BandStatus::ok);
        CHECK(m.asymmetric_truncation);
        CHECK(m.hwhm == doctest::Approx(4e-3).epsilon(2e-3));
    }
    SUBCASE("negative peak is an advance")
    {
        auto y = lorentzian(w, 1.0, 0.99, 1e-3);
        for (double& v : y)
        {
            v -= 2.0;
        }
        CHECK(measure_band(w, y, Band::lower, kOmegaM).status == BandStatus::advance);
    }
    SUBCASE("too few points")
    {
        const auto coarse = grid(0.98, 1.02, 41);
        const auto y = lorentzian(coarse, 1.0, 0.99, 1e-3);
        CHECK_THROWS_AS(find_band_peak(coarse, y, Band::lower, kOmegaM), ConfigError);
    }
}

TEST_CASE("gain-bandwidth sweep")
{
    const SystemParams p = test::scenario(0.5, 0.0);
    const std::vector<double> phis = grid(0.0, kPi, 9);
    CHECK(is_unbroken_phase(p));
    CHECK_FALSE(is_unbroken_phase(test::scenario(0.2, 0.0)));

    const SweepTable t = gain_bandwidth_sweep(p, phis, {.omega_grid = {}, .mode = BandMode::automatic, .threads = 4});
    REQUIRE(t.rows.size() == phis.size());
    for (const auto& row : t.rows)
    {
        REQUIRE(row.bands.size() == 2);
        double total = 0.0;
        for (const auto& b : row.bands)
        {
            CHECK(b.status == BandStatus::ok);
            CHECK(b.product == b.peak_value * b.hwhm);
            total += b.product;
        }
        CHECK(row.total == total);
        CHECK(row.bands[0].peak_omega < p.omega_m);
        CHECK(row.bands[1].peak_omega > p.omega_m);
    }

    SUBCASE("single band mode")
    {
        const SweepTable s = gain_bandwidth_sweep(p, phis, {.omega_grid = {}, .mode = BandMode::single, .threads = 4});
        for (const auto& row : s.rows)
        {
            REQUIRE(row.bands.size() == 1);
            CHECK(row.bands[0].band == Band::single);
        }
    }
    SUBCASE("thread count does not change the table")
    {
        const SweepTable s = gain_bandwidth_sweep(p, phis, {.omega_grid = {}, .mode = BandMode::automatic, .threads = 1});
        for (std::size_t i = 0; i < phis.size(); ++i)
        {
            CHECK(s.rows[i].total == t.rows[i].total);
        }
    }
    SUBCASE("unstable rows abort the sweep")
    {
        SystemParams q = p;
        q.g2_mag = 0.05 * q.g1_mag;
        q.mu_mag = 0.2 * q.gamma_span();
        CHECK_THROWS_AS(gain_bandwidth_sweep(q, phis), UnstableError);
    }
}

TEST_CASE("delay-bandwidth sweep")
{
    const SystemParams p = test::scenario(0.5, 0.0);
    const std::vector<double> phis = {0.7, kTwoPi - 0.7};
    const SweepTable t = delay_bandwidth_sweep(p, phis, {.omega_grid = {}, .mode = BandMode::single, .threads = 2});
    REQUIRE(t.rows.size() == 2);
    const BandMetrics& a = t.rows[0].bands[0];
    const BandMetrics& b = t.rows[1].bands[0];
    CHECK(a.status == BandStatus::ok);
    CHECK(a.peak_value > 0.0);
    // Mirror phases share the transmission, so they share the delay.
    CHECK(test::rel_diff(a.peak_value, b.peak_value) <= 1e-8);
    CHECK(test::rel_diff(a.hwhm, b.hwhm) <= 1e-8);
}

TEST_CASE("two-dimensional map")
{
    const SystemParams p = default_params();
    const auto w = test::omega_grid(p, 0.99, 1.01, 41);
    const std::vector<double> mus = {0.1 * p.gamma_span(), 0.3 * p.gamma_span(), 0.6 * p.gamma_span()};
    const Map2D m = map2d(p, w, mus, kPi / 2, 3);
    CHECK(m.errors.empty());
    CHECK(m.phi2 == kPi / 2);
    for (std::size_t r = 0; r < mus.size(); ++r)
    {
        SystemParams q = p;
        q.mu_mag = mus[r];
        q.g2_phase = kPi / 2;
        const auto s = solve_steady_state(q).state;
        for (std::size_t c = 0; c < w.size(); c += 7)
        {
            CHECK(m.at(r, c) == transmission(q, s, w[c]).abs_t);
        }
    }
    CHECK_THROWS_AS(map2d(p, w, std::vector<double>{0.2, 0.1}, 0.0), ConfigError);
}
