#include <doctest.h>

#include "sofred/errors.hpp"
#include "sofred/so_core.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace sofred;

TEST_CASE("diameter against all pairs")
{
    std::mt19937 rng(7);
    std::normal_distribution<double> nd;
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<cd> pts;
        for (int i = 0; i < 60; ++i)
            pts.emplace_back(nd(rng), trial % 2 ? 0.0 : nd(rng));
        double brute = 0.0;
        for (auto a : pts)
            for (auto b : pts)
                brute = std::max(brute, std::abs(a - b));
        CHECK(diameter(pts) == doctest::Approx(brute).epsilon(1e-14));
    }
    CHECK(diameter({}) == 0.0);
    CHECK(diameter({cd(1, 1)}) == 0.0);
}

TEST_CASE("oscillation check")
{
    const auto c = SOFunction::constant(2.5);
    auto rc = so_check(c, 6, 1e-3);
    CHECK(rc.pass_zero);
    CHECK(rc.pass_infinity);

    // sin(log t) oscillates by the same amount on every dyadic scale.
    auto bad = so_check(SOFunction::parse("sin(log(t))"), 6, 0.1);
    CHECK_FALSE(bad.pass_zero);
    CHECK_FALSE(bad.pass_infinity);

    auto good = so_check(SOFunction::parse("sin(log(1+abs(log(t))))"), 6, 0.1);
    CHECK(good.pass_zero);
    CHECK(good.pass_infinity);

    auto frac = so_check(SOFunction::parse("2/(1+t)"), 6, 1e-3);
    CHECK(frac.pass_zero);
    CHECK(frac.pass_infinity);
}

TEST_CASE("oscillation modulus of a monotone function is its increment")
{
    const auto f = SOFunction::parse("atan(log(t))");
    for (double r : {0.01, 1.0, 50.0}) {
        const double expect = std::atan(std::log(2 * r)) - std::atan(std::log(r));
        CHECK(oscillation_modulus(f, r) == doctest::Approx(std::abs(expect)).epsilon(1e-12));
    }
}

TEST_CASE("fiber values of elementary functions")
{
    const auto b = SOFunction::parse("2/(1+t)");
    for (const auto& xi : default_fibers(Endpoint::Zero))
        CHECK(std::abs(fiber_value(b, xi).value - 2.0) < 1e-6);
    for (const auto& xi : default_fibers(Endpoint::Infinity))
        CHECK(std::abs(fiber_value(b, xi).value) < 1e-6);
    CHECK(default_fibers(Endpoint::Zero).size() == 12);
    CHECK(default_fibers(Endpoint::Infinity).front().heuristic());
}

TEST_CASE("geometric sequences sample the log-periodic phase")
{
    // sin(2 pi log t / log 2) is constant along t0 * 2^n: it has a partial limit per phase.
    const auto f = SOFunction::parse("sin(2*pi*log(t)/log(2))");
    for (double x0 : {0.1, 0.3}) {
        auto xi = FiberPoint::geometric(Endpoint::Infinity, 2.0, std::exp(x0));
        const double expect = std::sin(2 * std::numbers::pi * x0 / std::log(2.0));
        CHECK(std::abs(fiber_value(f, xi).value - expect) < 1e-9);
    }
}

TEST_CASE("log-phase sequences reach the chosen phase of a slow oscillation")
{
    const auto f = SOFunction::parse("sin(log(1+log(t)^2))");
    for (double theta0 : {1.0, 2.0}) {
        auto xi = FiberPoint::log_phase(Endpoint::Infinity, PhaseMap::Log1pSquare, theta0, 2 * std::numbers::pi);
        CHECK(std::abs(fiber_value(f, xi).value - std::sin(theta0)) < 1e-6);
        auto xz = FiberPoint::log_phase(Endpoint::Zero, PhaseMap::Log1pSquare, theta0, 2 * std::numbers::pi);
        CHECK(xz.log_term(3) < 0.0);
        CHECK(std::abs(fiber_value(f, xz).value - std::sin(theta0)) < 1e-6);
    }
}

TEST_CASE("joint evaluation keeps partial limits on the same sequence")
{
    const auto f = SOFunction::parse("sin(log(1+abs(log(t))))");
    const auto g = SOFunction::parse("cos(log(1+abs(log(t))))");
    auto xi = FiberPoint::log_phase(Endpoint::Infinity, PhaseMap::Log1pAbs, 0.7, 2 * std::numbers::pi);
    const auto ev = fiber_values({f, g}, xi);
    CHECK(std::abs(ev[0].value * ev[0].value + ev[1].value * ev[1].value - 1.0) < 1e-6);
    CHECK(std::abs(ev[0].value - std::sin(0.7)) < 1e-6);
}

TEST_CASE("divergent sequences are reported")
{
    const auto f = SOFunction::parse("sin(log(t))");
    auto xi = FiberPoint::geometric(Endpoint::Infinity, 3.0, 1.0);
    CHECK_THROWS_AS(fiber_value(f, xi, 1e-6, 1 << 12), FiberDivergenceError);
}

TEST_CASE("declared values travel with the function")
{
    auto f = SOFunction::parse("2/(1+t)");
    auto xi = FiberPoint::geometric(Endpoint::Zero, 2.0, 1.0, "z");
    f.declare(xi, 2.0);
    const auto ev = fiber_value(f, xi);
    REQUIRE(ev.declared);
    CHECK(*ev.declared == cd(2.0));
}

TEST_CASE("non-finite values raise")
{
    const auto f = SOFunction::parse("1/(t-1)");
    CHECK_THROWS_AS(f(1.0), EvaluationDomainError);
}

TEST_CASE("algebra of SO functions")
{
    const auto a = SOFunction::parse("2/(1+t)");
    const auto b = SOFunction::parse("t/(1+t)");
    for (double t : {0.1, 1.0, 7.0}) {
        CHECK(std::abs((a + b)(t) - (2.0 + t) / (1 + t)) < 1e-14);
        CHECK(std::abs((a * b)(t) - 2.0 * t / ((1 + t) * (1 + t))) < 1e-14);
        CHECK(std::abs(a.dilated(std::log(3.0))(t) - 2.0 / (1 + 3 * t)) < 1e-14);
    }
}
