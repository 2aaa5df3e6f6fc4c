#include <doctest.h>

#include "sofred/errors.hpp"
#include "sofred/mellin.hpp"

#include <cmath>
#include <numbers>

using namespace sofred;

namespace {

constexpr double kPi = std::numbers::pi;

Vec gaussian(const LogGrid& g, double c, double s)
{
    return g.sample([c, s](double x) { return cd(std::exp(-0.5 * (x - c) * (x - c) / (s * s))); });
}

} // namespace

TEST_CASE("grid geometry")
{
    LogGrid g(-12, 12, 4096);
    CHECK(g.dx() == doctest::Approx(24.0 / 4095));
    CHECK(g.x(4095) == doctest::Approx(12.0));
    CHECK(g.dxi() == doctest::Approx(2 * kPi / (4096 * g.dx())));
    const auto e = g.extended(4);
    CHECK(e.n() == 4 * 4096);
    CHECK(e.dx() == doctest::Approx(g.dx()));
    CHECK(e.x(g.offset_in(e)) == doctest::Approx(g.x_min()));
    const Vec f = gaussian(g, 0.3, 1.0);
    CHECK((g.restrict(g.embed(f, e), e) - f).norm() == 0.0);
    CHECK_THROWS(LogGrid(-1, 1, 1000));
}

TEST_CASE("L^p norm against quadrature")
{
    // f(t) = exp(-(log t)^2 / 2): ||f||_p^p = int exp(-p x^2/2) e^x dx = sqrt(2 pi / p) e^{1/(2p)}.
    LogGrid g;
    const Vec f = gaussian(g, 0.0, 1.0);
    for (double p : {1.5, 2.0, 3.0}) {
        const double exact = std::pow(std::sqrt(2 * kPi / p) * std::exp(1.0 / (2 * p)), 1.0 / p);
        CHECK(lp_norm(f, g, p) == doctest::Approx(exact).epsilon(1e-10));
    }
}

TEST_CASE("Mellin transform of a log-Gaussian")
{
    LogGrid g;
    const double c = 0.7, s = 0.8;
    const Vec F = mellin_transform(gaussian(g, c, s), g);
    for (int m : {0, 1, 5, 40, g.n() - 3}) {
        const double xi = g.frequency(m);
        const cd exact = s * std::sqrt(2 * kPi) * std::exp(-0.5 * s * s * xi * xi) * std::polar(1.0, -xi * c);
        CHECK(std::abs(F[m] - exact) < 1e-10);
    }
    const Vec back = inverse_mellin_transform(F, g);
    CHECK((back - gaussian(g, c, s)).norm() < 1e-12);
}

TEST_CASE("Mellin convolution with a Gaussian multiplier is a heat step")
{
    // Multiplier e^{-tau xi^2 / 2} turns a Gaussian of width s into one of width sqrt(s^2 + tau).
    LogGrid g;
    const double s = 0.5, tau = 0.3;
    const MellinMultiplier heat([tau](double xi) { return cd(std::exp(-0.5 * tau * xi * xi)); }, "heat");
    const Vec out = mellin_convolution(heat, gaussian(g, 0.0, s), g);
    const double s2 = std::sqrt(s * s + tau);
    const Vec expect = gaussian(g, 0.0, s2) * (s / s2);
    CHECK((out - expect).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("frozen-row PDO reduces to multiplication and convolution")
{
    LogGrid g(-12, 12, 512);
    const Vec f = gaussian(g, 0.2, 0.9);
    const auto a = PDOSymbol::of_t([](double x) { return cd(1.0 + 0.5 * std::tanh(x), 0.0); });
    const Vec m = mellin_pdo(a, f, g);
    for (int j = 0; j < g.n(); ++j)
        CHECK(std::abs(m[j] - (1.0 + 0.5 * std::tanh(g.x(j))) * f[j]) < 1e-12);
    const MellinMultiplier h([](double xi) { return cd(1.0 / std::cosh(xi)); }, "sech");
    const Vec c1 = mellin_pdo(PDOSymbol::of_xi(h), f, g);
    const Vec c2 = mellin_convolution(h, f, g);
    CHECK((c1 - c2).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("PDO composition: t-symbol on the left composes exactly")
{
    LogGrid g(-12, 12, 512);
    std::vector<Vec> ts{gaussian(g, -1.0, 0.7), gaussian(g, 1.0, 0.7)};
    const auto a = PDOSymbol::of_t([](double x) { return cd(2.0 + std::tanh(x), 0.0); });
    const auto b = PDOSymbol::of_xi(MellinMultiplier([](double xi) { return cd(1.0 / std::cosh(xi)); }, "sech"));
    CHECK(pdo_composition_defect(a, b, ts, g).max_relative < 1e-12);
    // The reverse order is a genuine commutator and does not vanish.
    CHECK(pdo_composition_defect(b, a, ts, g).max_relative > 1e-4);
}

TEST_CASE("total variation")
{
    LogGrid g;
    const MellinMultiplier th([](double xi) { return cd(std::tanh(xi), 0.0); }, "tanh");
    const auto v = total_variation(th, g);
    CHECK(v.variation == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(v.sup == doctest::Approx(1.0).epsilon(1e-6));
    CHECK_FALSE(v.truncated);
    CHECK(stechkin_bound(th, g, 2.0) == doctest::Approx(3.0).epsilon(1e-6));
    CHECK_THROWS_AS(stechkin_bound(th, g, 3.0), ConfigurationError);
    CHECK(stechkin_bound(th, g, 3.0, 2.0) == doctest::Approx(6.0).epsilon(1e-6));
    // A slowly decaying tail is flagged.
    const MellinMultiplier at([](double xi) { return cd(std::atan(xi) + 1.0 / (1.0 + std::abs(xi)), 0.0); }, "slow");
    CHECK(total_variation(at, g).truncated);
}

TEST_CASE("multiplier must be finite on the frequency grid")
{
    LogGrid g(-4, 4, 64);
    const MellinMultiplier bad([](double xi) { return cd(1.0 / xi); }, "pole");
    CHECK_THROWS_AS(bad.values(g), EvaluationDomainError);
}
