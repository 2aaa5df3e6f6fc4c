#include <doctest.h>

#include "sofred/errors.hpp"
#include "sofred/shifts.hpp"

#include <cmath>
#include <numbers>

using namespace sofred;

TEST_CASE("dilation")
{
    const auto a = SOShift::dilation(2.0);
    CHECK(a.eval(3.0) == doctest::Approx(6.0));
    CHECK(a.inverse(6.0) == doctest::Approx(3.0));
    CHECK(a.derivative(5.0) == doctest::Approx(2.0));
    CHECK(a.iterate(3, 1.0) == doctest::Approx(8.0));
    CHECK(a.iterate(-2, 1.0) == doctest::Approx(0.25));
    CHECK(a.exponent_of_iterate(4, 0.7) == doctest::Approx(4 * std::log(2.0)));
    CHECK_THROWS_AS(SOShift::dilation(-1.0), ConfigurationError);
}

TEST_CASE("family invariants")
{
    const auto a = SOShift::family(0.3, 0.2, 1.0);
    const auto inv = a.check_invariants({-30.0, 30.0});
    CHECK(inv.increasing);
    CHECK(inv.inf_one_plus_psi > 0.5);
    CHECK(inv.sup_abs_omega <= 0.5 + 1e-12);
    CHECK(inv.max_psi_fd_error < 1e-8);
    CHECK_THROWS_AS(SOShift::family(0.0, 2.0, 1.0), ConfigurationError);
}

TEST_CASE("derivative of alpha against finite differences")
{
    const auto a = SOShift::family(0.3, 0.2, 1.0);
    for (double t : {0.05, 0.8, 1.0, 4.0, 90.0}) {
        const double h = 1e-6 * t;
        const double fd = (a.eval(t + h) - a.eval(t - h)) / (2 * h);
        CHECK(a.derivative(t) == doctest::Approx(fd).epsilon(1e-7));
    }
}

TEST_CASE("inverse round trips, including far out")
{
    const auto a = SOShift::family(0.3, 0.2, 1.0);
    for (double x : {-200.0, -12.0, -1.0, 0.0, 0.3, 5.0, 1e4, 1e8}) {
        const double y = a.eval_log(x);
        CHECK(std::abs(a.inverse_log(y) - x) <= 1e-10 * std::max(1.0, std::abs(x)));
    }
}

TEST_CASE("expression shifts get psi from the symbolic derivative")
{
    const auto a = SOShift::from_expressions("0.3+0.2*sin(log(1+log(t)^2))");
    const auto b = SOShift::family(0.3, 0.2, 1.0);
    for (double x : {-4.0, -0.5, 0.0, 1.0, 7.0}) {
        CHECK(a.omega_log(x) == doctest::Approx(b.omega_log(x)).epsilon(1e-14));
        CHECK(a.psi_log(x) == doctest::Approx(b.psi_log(x)).epsilon(1e-12));
    }
}

TEST_CASE("iterate exponents are additive along the orbit")
{
    // Oracle: the direct difference log alpha_k(t) - log t at moderate t.
    const auto a = SOShift::family(0.3, 0.2, 1.0);
    for (double x : {-3.0, 0.0, 2.0}) {
        for (int k = -5; k <= 5; ++k) {
            const double direct = a.iterate_log(k, x) - x;
            CHECK(a.exponent_of_iterate_log(k, x) == doctest::Approx(direct).epsilon(1e-12));
        }
    }
}

TEST_CASE("orbits that leave the guard range raise")
{
    const auto a = SOShift::dilation(2.0);
    const LogRange guard{-5.0, 5.0};
    CHECK_THROWS_AS(a.iterate_log(20, 0.0, guard), OrbitEscape);
    CHECK_FALSE(a.try_iterate_log(20, 0.0, guard).has_value());
    CHECK(a.try_iterate_log(3, 0.0, guard).has_value());
    const auto g = guard_range({-1.0, 1.0});
    CHECK(g.hi == doctest::Approx(1.0 + 10 * std::numbers::ln2));
}

TEST_CASE("attracting and repelling points")
{
    const LogRange w{-20.0, 20.0};
    auto d = detect_dynamics(SOShift::dilation(2.0), 1.0, 1000, w);
    CHECK(d.tau_plus == Endpoint::Infinity);
    CHECK(d.tau_minus == Endpoint::Zero);
    d = detect_dynamics(SOShift::dilation(0.5), 1.0, 1000, w);
    CHECK(d.tau_plus == Endpoint::Zero);
    CHECK(d.tau_minus == Endpoint::Infinity);
    d = detect_dynamics(SOShift::family(-0.3, 0.2, 1.0), 3.0, 1000, w);
    CHECK(d.tau_plus == Endpoint::Zero);
    CHECK_THROWS_AS(detect_dynamics(SOShift::identity(), 1.0, 100, w), IndeterminateDynamicsError);
}

TEST_CASE("inverse shift")
{
    const auto a = SOShift::family(0.3, 0.2, 1.0);
    const auto b = a.inverse_shift();
    for (double x : {-6.0, 0.0, 3.0}) {
        CHECK(b.eval_log(a.eval_log(x)) == doctest::Approx(x).epsilon(1e-12));
        // alpha_{-1}'(alpha(t)) alpha'(t) = 1 in log form: (1 + psi_b(alpha x))(1 + psi_a(x)) = 1.
        CHECK((1 + b.psi_log(a.eval_log(x))) * (1 + a.psi_log(x)) == doctest::Approx(1.0).epsilon(1e-12));
    }
}
