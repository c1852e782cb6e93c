#include <doctest.h>

#include <cmath>

#include "ptomit/errors.hpp"
#include "ptomit/linear_response.hpp"
#include "ptomit/oracle.hpp"
#include "ptomit/stability.hpp"
#include "test_support.hpp"

using namespace ptomit;
using test::rel_diff;

TEST_CASE("no probe, no response")
{
    SystemParams p = test::scenario(0.5, 0.0);
    p.probe_power = 0.0;
    const auto s = solve_steady_state(p).state;
    const DemodResult d = integrate_linearized(p, s, 1.001 * p.omega_m);
    CHECK(d.a1_minus == cplx{});
    CHECK(d.a1_plus == cplx{});
    CHECK(d.b1_minus == cplx{});
    CHECK(d.c1_minus == cplx{});
}

TEST_CASE("passive cavity against its Lorentzian")
{
    // Both resonators lossy and uncoupled from light: stable, and the optical
    // response is a plain Lorentzian.
    SystemParams p = test::bare_cavity();
    p.gamma2 = p.gamma1;
    p.eta = 0.3;
    const auto s = solve_steady_state(p).state;
    const double eps_p = derived_drive(p).eps_p;
    for (double x : {0.995, 1.0, 1.004})
    {
        const double w = x * p.omega_m;
        const DemodResult d = integrate_linearized(p, s, w);
        const cplx expected = std::sqrt(p.eta * p.kappa) * eps_p / cplx(p.kappa / 2.0, p.delta - w);
        CHECK(rel_diff(d.a1_minus, expected) <= 1e-8);
        CHECK(std::abs(d.b1_minus) == 0.0);
        CHECK(std::abs(d.a1_plus) <= 1e-8 * std::abs(d.a1_minus));
    }
}

TEST_CASE("bare cavity comparison")
{
    SystemParams p = test::bare_cavity();
    p.gamma2 = p.gamma1;
    p.eta = 0.3;
    const OracleComparison c = oracle_compare(p, test::omega_grid(p, 0.99, 1.01, 5), {}, 5);
    CHECK(c.max_rel_error <= 1e-8);
}

TEST_CASE("closed form agrees with integration at the default point")
{
    const SystemParams p = test::scenario(0.5, 0.0);
    const auto grid = test::omega_grid(p, 0.99, 1.01, 5);
    const OracleComparison c = oracle_compare(p, grid, {}, 5);
    REQUIRE(c.points.size() == grid.size());
    CHECK(c.max_rel_error <= 1e-4);
    for (const auto& pt : c.points)
    {
        CHECK(pt.transient_decay <= 1e-7);
    }
}

TEST_CASE("demodulation diagnostics")
{
    const SystemParams p = test::scenario(0.5, kPi / 2);
    const auto s = solve_steady_state(p).state;
    const double w = 0.996 * p.omega_m;
    const DemodResult d = integrate_linearized(p, s, w);
    const cplx formula = transmission(p, s, w).a1_minus;
    CHECK(rel_diff(d.a1_minus, formula) <= 1e-4);
    CHECK(d.conjugate_mismatch <= 1e-12);
    CHECK(d.harmonic_ratio <= 1e-10);
    CHECK(d.horizon == doctest::Approx(30.0 / std::abs(stability_at(p).margin)));

    SUBCASE("doubling the demodulation window")
    {
        const DemodResult t = integrate_linearized(p, s, w, {.periods = 40});
        CHECK(std::abs(t.a1_minus - d.a1_minus) <= 1e-7 * std::abs(d.a1_minus));
    }
    SUBCASE("tighter local tolerance")
    {
        const DemodResult t = integrate_linearized(p, s, w, {.rel_tol = 1e-13});
        CHECK(rel_diff(t.a1_minus, d.a1_minus) <= 1e-7);
    }
}

TEST_CASE("option validation and refusals")
{
    const SystemParams p = test::scenario(0.5, 0.0);
    const auto s = solve_steady_state(p).state;
    CHECK_THROWS_AS(integrate_linearized(p, s, 0.0), ConfigError);
    CHECK_THROWS_AS(integrate_linearized(p, s, p.omega_m, {.horizon = 1e-9}), ConfigError);

    SystemParams u = test::scenario(0.2, 0.0);
    u.g2_mag = 0.05 * u.g1_mag;
    CHECK_THROWS_AS(integrate_linearized(u, solve_steady_state(u).state, u.omega_m), UnstableError);
    CHECK_THROWS_AS(oracle_compare(u, std::vector<double>{u.omega_m}), UnstableError);
}
