#include <doctest.h>

#include "sofred/errors.hpp"
#include "sofred/symbols.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace sofred;

namespace {

constexpr double kPi = std::numbers::pi;
const cd kI(0.0, 1.0);

// Textbook forms, fine away from overflow.
SRP naive(double p, cd gamma, double x)
{
    const cd z = kPi * (x + kI / p + kI * gamma);
    const cd s = std::cosh(z) / std::sinh(z);
    return {s, 1.0 / std::sinh(z), (1.0 + s) / 2.0, (1.0 - s) / 2.0};
}

FiberData constant_fiber(Endpoint e, std::map<int, cd> a, std::map<int, cd> b, double omega, double eta)
{
    FiberData fd{FiberPoint::geometric(e, 2.0, 1.0, e == Endpoint::Zero ? "zero" : "inf"), a, b, omega, eta, 0.0, {}};
    return fd;
}

} // namespace

TEST_CASE("admissibility strip")
{
    CHECK_NOTHROW(check_admissible(2.0, cd(0.0, 0.9)));
    CHECK_NOTHROW(check_admissible(3.0, cd(-0.3, 0.0)));
    CHECK_THROWS_AS(check_admissible(2.0, cd(0.5, 0.0)), AdmissibilityError);
    CHECK_THROWS_AS(check_admissible(2.0, cd(-0.5, 0.0)), AdmissibilityError);
    CHECK_THROWS_AS(check_admissible(1.0, cd(0.0, 0.0)), AdmissibilityError);
    CHECK_THROWS_AS(SymbolContext(4.0, cd(0.8, 0.0)), AdmissibilityError);
}

TEST_CASE("stable symbol forms agree with the textbook ones")
{
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> up(1.25, 5.0), uc(0.05, 0.95), ui(-1, 1), ux(-6, 6);
    for (int i = 0; i < 500; ++i) {
        const double p = up(rng);
        const cd g(uc(rng) - 1.0 / p, ui(rng));
        const double x = ux(rng);
        const SRP a = eval_s_r_p(p, g, x), b = naive(p, g, x);
        CHECK(std::abs(a.s - b.s) < 1e-12);
        CHECK(std::abs(a.r - b.r) < 1e-12);
        CHECK(std::abs(a.p_plus - b.p_plus) < 1e-12);
        CHECK(std::abs(a.p_minus - b.p_minus) < 1e-12);
    }
}

TEST_CASE("symbols stay finite and reach their limits far out")
{
    for (double x : {-1e4, -400.0, 400.0, 1e4}) {
        const SRP v = eval_s_r_p(2.0, cd(0.1, 0.2), x);
        CHECK(std::isfinite(std::abs(v.s)));
        CHECK(std::abs(v.r) < 1e-100);
        CHECK(std::abs(v.s - (x > 0 ? 1.0 : -1.0)) < 1e-12);
    }
}

TEST_CASE("p=2, gamma=0: p+ is the logistic curve")
{
    // p0+(x) = (1 + coth(pi(x + i/2)))/2 = (1 + tanh(pi x))/2.
    for (double x : {-2.0, -0.3, 0.0, 0.5, 3.0}) {
        const SRP v = eval_s_r_p(2.0, 0.0, x);
        CHECK(std::abs(v.p_plus - (1.0 + std::tanh(kPi * x)) / 2.0) < 1e-14);
        CHECK(v.p_plus.real() > 0.0);
        CHECK(v.p_plus.real() < 1.0);
    }
}

TEST_CASE("tail threshold bounds the projections beyond it")
{
    for (auto [p, g] : std::vector<std::pair<double, cd>>{{2.0, 0.0}, {3.0, cd(0.1, 0.9)}, {1.5, cd(-0.2, -0.7)}}) {
        const double x0 = tail_threshold(p, g, 1e-8);
        for (double x = x0; x < x0 + 20; x += 0.37) {
            CHECK(std::abs(eval_s_r_p(p, g, x).p_minus) < 1e-8);
            CHECK(std::abs(eval_s_r_p(p, g, -x).p_plus) < 1e-8);
        }
    }
}

TEST_CASE("binomial fiber symbol: inf |2 - e^{i x log 2}| = 1")
{
    SymbolContext ctx(2.0, 0.0);
    const double w = std::log(2.0);
    ctx.fibers.push_back(constant_fiber(Endpoint::Zero, {{0, 2.0}, {1, -1.0}}, {{0, 2.0}, {1, -1.0}}, w, w));
    ctx.fibers.push_back(constant_fiber(Endpoint::Infinity, {{0, 2.0}, {1, -1.0}}, {{0, 2.0}, {1, -1.0}}, w, w));
    const auto rep = condition_ii_check(ctx);
    CHECK(rep.all_pass);
    // Brute force over a long window.
    double brute = 1e300;
    for (double x = -200; x <= 200; x += 1e-3)
        brute = std::min(brute, std::abs(eval_n(ctx, ctx.fibers[0], x)));
    for (const auto& f : rep.fibers)
        CHECK(std::abs(f.inf_estimate - brute) < 1e-4);
    BinomialFiber bf{2.0, 1.0, 2.0, 1.0, w, w};
    CHECK(std::abs(eval_m(ctx, bf, 0.37) - eval_n(ctx, ctx.fibers[0], 0.37)) < 1e-15);
}

TEST_CASE("degenerate pattern: zeros of 1 - e^{i x log 2} are located")
{
    SymbolContext ctx(2.0, 0.0);
    const double w = std::log(2.0);
    ctx.fibers.push_back(constant_fiber(Endpoint::Zero, {{0, 1.0}, {1, -1.0}}, {{0, 1.0}, {1, -1.0}}, w, w));
    ctx.fibers.push_back(constant_fiber(Endpoint::Infinity, {{0, 1.0}, {1, -1.0}}, {{0, 1.0}, {1, -1.0}}, w, w));
    const auto rep = condition_ii_check(ctx);
    CHECK_FALSE(rep.all_pass);
    const double z = 2 * kPi / w;
    for (const auto& f : rep.fibers) {
        CHECK_FALSE(f.pass);
        double best = 1e300;
        for (double nz : f.near_zeros)
            best = std::min(best, std::abs(nz - z));
        CHECK(best < 1e-6);
    }
}

TEST_CASE("opposite limits of A+ and A- force a zero")
{
    // a+ = 1, a- = -1 gives n = p+ - p- = s = tanh(pi x) at p = 2, gamma = 0: a zero at x = 0.
    SymbolContext ctx(2.0, 0.0);
    ctx.fibers.push_back(constant_fiber(Endpoint::Zero, {{0, 1.0}}, {{0, -1.0}}, 0.0, 0.0));
    ctx.fibers.push_back(constant_fiber(Endpoint::Infinity, {{0, 1.0}}, {{0, 1.0}}, 0.0, 0.0));
    const auto rep = condition_ii_check(ctx);
    CHECK_FALSE(rep.fibers[0].pass);
    CHECK(std::abs(rep.fibers[0].argmin) < 1e-6);
    CHECK(rep.fibers[1].pass);
}

TEST_CASE("zero frequency with a nonconstant pattern is flagged")
{
    SymbolContext ctx(2.0, 0.0);
    ctx.fibers.push_back(constant_fiber(Endpoint::Zero, {{0, 3.0}, {1, -1.0}}, {{0, 3.0}}, 0.0, 0.0));
    ctx.fibers.push_back(constant_fiber(Endpoint::Infinity, {{0, 3.0}}, {{0, 3.0}}, 0.0, 0.0));
    const auto rep = condition_ii_check(ctx);
    CHECK(rep.fibers[0].degenerate);
    CHECK(rep.fibers[0].inf_estimate == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("condition (ii) needs both endpoints")
{
    SymbolContext ctx(2.0, 0.0);
    ctx.fibers.push_back(constant_fiber(Endpoint::Zero, {{0, 1.0}}, {{0, 1.0}}, 0.0, 0.0));
    CHECK_THROWS_AS(condition_ii_check(ctx), ContextError);
    CHECK_THROWS_AS(ctx.fiber("nope"), ContextError);
}

TEST_CASE("fiber data from functions and declarations")
{
    const auto alpha = SOShift::dilation(2.0);
    std::map<int, SOFunction> a{{0, SOFunction::constant(1.0)}, {1, SOFunction::parse("-2/(1+t)")}};
    std::map<int, SOFunction> b{{0, SOFunction::constant(1.0)}};
    const auto z = FiberPoint::geometric(Endpoint::Zero, 2.0, 1.0, "z");
    const auto fd = build_fiber_data(z, a, b, alpha, alpha);
    CHECK(std::abs(fd.a.at(1) + 2.0) < 1e-6);
    CHECK(fd.omega == doctest::Approx(std::log(2.0)));
    CHECK(fd.notes.empty());

    // A wrong declaration wins but is noted.
    a.at(1).declare(z, -1.5);
    const auto fd2 = build_fiber_data(z, a, b, alpha, alpha);
    CHECK(fd2.a.at(1) == cd(-1.5));
    CHECK_FALSE(fd2.notes.empty());
}
