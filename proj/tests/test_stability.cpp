#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "ptomit/errors.hpp"
#include "ptomit/linear_response.hpp"
#include "ptomit/stability.hpp"
#include "test_support.hpp"

using namespace ptomit;

namespace
{

std::vector<double> uniform(double lo, double hi, std::size_t n)
{
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i)
    {
        v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    return v;
}

bool contains_close(const std::array<cplx, 6>& ev, cplx z, double tol)
{
    return std::any_of(ev.begin(), ev.end(), [&](cplx e) { return std::abs(e - z) <= tol; });
}

} // namespace

TEST_CASE("stability matrix structure")
{
    SUBCASE("decoupled system is diagonal")
    {
        SystemParams p = test::bare_cavity();
        p.mu_mag = 0.0;
        const auto m = build_stability_matrix(p, solve_steady_state(p).state);
        for (int i = 0; i < 6; ++i)
        {
            for (int j = 0; j < 6; ++j)
            {
                if (i != j)
                {
                    CHECK(m(i, j) == cplx{});
                }
            }
        }
        CHECK(m(0, 0) == cplx(-p.kappa / 2.0, -p.delta));
        CHECK(m(1, 1) == cplx(-p.kappa / 2.0, p.delta));
        CHECK(m(2, 2) == cplx(-p.gamma1 / 2.0, -p.omega_m));
        CHECK(m(3, 3) == cplx(-p.gamma1 / 2.0, p.omega_m));
        CHECK(m(4, 4) == cplx(-p.gamma2 / 2.0, -p.omega_m));
        CHECK(m(5, 5) == cplx(-p.gamma2 / 2.0, p.omega_m));
    }
    SUBCASE("no pump decouples the optical block")
    {
        SystemParams p = test::scenario(0.5, 1.0);
        p.pump_power = 0.0;
        const auto m = build_stability_matrix(p, solve_steady_state(p).state);
        CHECK(m.block<2, 4>(0, 2).norm() == 0.0);
        CHECK(m.block<4, 2>(2, 0).norm() == 0.0);
        const auto r = classify(m);
        CHECK(contains_close(r.eigenvalues, cplx(-p.kappa / 2.0, -p.delta), 1e-9 * p.kappa));
        CHECK(contains_close(r.eigenvalues, cplx(-p.kappa / 2.0, p.delta), 1e-9 * p.kappa));
    }
    SUBCASE("spectrum closed under conjugation and trace preserved")
    {
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int k = 0; k < 10; ++k)
        {
            SystemParams p = test::scenario(0.05 + 0.6 * u(rng), kTwoPi * u(rng));
            p.g2_mag = 4.0 * p.g1_mag * u(rng);
            const auto m = build_stability_matrix(p, solve_steady_state(p).state);
            const auto r = classify(m);
            for (cplx e : r.eigenvalues)
            {
                CHECK(contains_close(r.eigenvalues, std::conj(e), 1e-9 * p.omega_m));
            }
            cplx trace{};
            for (cplx e : r.eigenvalues)
            {
                trace += e;
            }
            CHECK(std::abs(trace.real() - (-p.kappa - p.gamma1 - p.gamma2)) <= 1e-9 * p.kappa);
            CHECK(std::abs(trace.imag()) <= 1e-9 * p.kappa);
            CHECK(r.margin == r.eigenvalues[0].real());
            CHECK(r.stable == (r.margin < 0.0));
        }
    }
}

TEST_CASE("operating points")
{
    const SystemParams p0 = default_params();
    const double span = p0.gamma_span();
    SUBCASE("default figure point is stable")
    {
        for (double mu : {0.2, 0.5})
        {
            CHECK(stability_at(test::scenario(mu, 0.0)).stable);
            CHECK(stability_at(test::scenario(mu, kPi / 2)).stable);
        }
        CHECK_NOTHROW(require_stable(test::scenario(0.5, 0.0)));
    }
    SUBCASE("weak second coupling leaves the gain resonator unstable")
    {
        SystemParams p = test::scenario(0.2, 0.0);
        p.g2_mag = 0.05 * p.g1_mag;
        const auto r = stability_at(p);
        CHECK_FALSE(r.stable);
        CHECK(r.margin > 0.1 * span);
        try
        {
            require_stable(p, "check");
            FAIL("expected UnstableError");
        }
        catch (const UnstableError& e)
        {
            CHECK(e.margin() == r.margin);
            CHECK(std::string(e.what()).find("check") != std::string::npos);
        }
    }
}

TEST_CASE("stability map")
{
    const SystemParams p = default_params();
    const auto g2 = uniform(0.0, 4.0 * p.g1_mag, 21);
    const auto phi = uniform(0.0, kTwoPi, 33);
    const auto weak = stability_map(p, g2, phi, 0.2 * p.gamma_span(), 4);
    const auto strong = stability_map(p, g2, phi, 0.5 * p.gamma_span(), 4);

    CHECK(weak.count(CellStatus::steady_state_failed) == 0);
    CHECK(weak.count(CellStatus::stable) + weak.count(CellStatus::unstable) == g2.size() * phi.size());

    SUBCASE("|g2| = 2 g1 row")
    {
        const std::size_t row = 10;
        REQUIRE(std::abs(g2[row] - 2.0 * p.g1_mag) <= 1e-9 * p.g1_mag);
        for (std::size_t c = 0; c < phi.size(); ++c)
        {
            CHECK(weak.at(row, c) == CellStatus::stable);
        }
    }
    SUBCASE("periodic in phi2")
    {
        for (std::size_t r = 0; r < g2.size(); ++r)
        {
            CHECK(weak.at(r, 0) == weak.at(r, phi.size() - 1));
            CHECK(strong.at(r, 0) == strong.at(r, phi.size() - 1));
        }
    }
    SUBCASE("map agrees with pointwise classification")
    {
        std::mt19937_64 rng(9);
        std::uniform_int_distribution<std::size_t> ri(0, g2.size() - 1), ci(0, phi.size() - 1);
        for (int k = 0; k < 10; ++k)
        {
            const std::size_t r = ri(rng), c = ci(rng);
            SystemParams q = p;
            q.g2_mag = g2[r];
            q.g2_phase = normalize_phase(phi[c]);
            q.mu_mag = 0.2 * p.gamma_span();
            CHECK((weak.at(r, c) == CellStatus::stable) == stability_at(q).stable);
        }
    }
    SUBCASE("no second coupling is unstable")
    {
        for (std::size_t c = 0; c < phi.size(); ++c)
        {
            CHECK(weak.at(0, c) == CellStatus::unstable);
        }
    }
    SUBCASE("stronger intermechanical coupling enlarges the stable area")
    {
        CHECK(strong.count(CellStatus::stable) >= weak.count(CellStatus::stable));
    }
}

TEST_CASE("mechanical root loci")
{
    const SystemParams p = test::scenario(0.2, 0.0);
    const auto grid = uniform(0.0, kPi, 91);
    const auto loci = mechanical_root_loci(p, grid, {.window = {}, .ep_radius_over_span = 1e-3, .threads = 2});
    REQUIRE(loci.tracks[0].size() == grid.size());

    SUBCASE("tracks stay in the mechanical window")
    {
        for (const auto& t : loci.tracks)
        {
            for (cplx z : t)
            {
                CHECK(z.imag() > 0.9 * p.omega_m);
                CHECK(z.imag() < 1.1 * p.omega_m);
            }
        }
    }
    SUBCASE("endpoints: split in loss at phi2 = 0, the two tracks are continuous")
    {
        const double span = p.gamma_span();
        CHECK(std::abs(loci.tracks[0].front().real() - loci.tracks[1].front().real()) > 1e-3 * span);
        for (std::size_t i = 1; i < grid.size(); ++i)
        {
            for (int k = 0; k < 2; ++k)
            {
                CHECK(std::abs(loci.tracks[k][i] - loci.tracks[k][i - 1]) <= 0.1 * span);
            }
        }
    }
    SUBCASE("gaps equal track separation")
    {
        for (std::size_t i = 0; i < grid.size(); ++i)
        {
            CHECK(loci.gaps[i] == doctest::Approx(std::abs(loci.tracks[0][i] - loci.tracks[1][i])));
            CHECK(loci.ep_neighborhood[i] == (loci.gaps[i] < 1e-3 * p.gamma_span()));
        }
    }
    SUBCASE("mirror symmetry of the loop phase")
    {
        const auto a = mechanical_pair(test::scenario(0.2, 1.0));
        const auto b = mechanical_pair(test::scenario(0.2, kTwoPi - 1.0));
        CHECK(std::abs(a[0] - b[0]) + std::abs(a[1] - b[1]) <= 1e-8 * p.gamma_span());
    }
    SUBCASE("empty window")
    {
        CHECK_THROWS_AS(mechanical_pair(p, {.lo = 2.0, .hi = 3.0}), SelectionError);
    }
}

TEST_CASE("exceptional point")
{
    const SystemParams p0 = default_params();
    const double span = p0.gamma_span();
    SUBCASE("uncoupled mechanical dimer coalesces at a quarter of the span")
    {
        SystemParams p = test::bare_cavity();
        p.g2_phase = kPi / 2;
        const auto ep = locate_ep(p, 0.15 * span, 0.35 * span);
        CHECK(ep.mu_ep / span == doctest::Approx(0.25).epsilon(1e-6));
        CHECK(ep.coalesced);
    }
    SUBCASE("optomechanical coupling shifts the EP")
    {
        const SystemParams p = test::scenario(0.5, kPi / 2);
        const auto ep = locate_ep(p, 0.15 * span, 0.35 * span);
        CHECK(ep.mu_ep / span > 0.2);
        CHECK(ep.mu_ep / span < 0.28);
        CHECK(ep.gap_at_ep == doctest::Approx(mechanical_gap(p, ep.mu_ep)));
        // Minimality against a dense scan.
        for (double x : uniform(0.15, 0.35, 201))
        {
            CHECK(mechanical_gap(p, x * span) >= ep.gap_at_ep * (1.0 - 1e-9));
        }
        CHECK(ep.bracket_lo == 0.15 * span);
        CHECK(ep.bracket_hi == 0.35 * span);
    }
    SUBCASE("bracket missing the minimum")
    {
        const SystemParams p = test::scenario(0.5, kPi / 2);
        CHECK_THROWS_AS(locate_ep(p, 0.4 * span, 0.6 * span), BracketError);
        CHECK_THROWS_AS(locate_ep(p, 0.3 * span, 0.2 * span), ConfigError);
    }
}
