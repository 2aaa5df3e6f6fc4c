#include <doctest.h>

#include "sofred/errors.hpp"
#include "sofred/operators.hpp"
#include "sofred/symbols.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>

using namespace sofred;

namespace {

constexpr double kPi = std::numbers::pi;
const cd kI(0.0, 1.0);

cd integrate(const std::function<cd(double)>& f, double a, double b)
{
    using boost::math::quadrature::gauss_kronrod;
    auto re = [&](double y) { return f(y).real(); };
    auto im = [&](double y) { return f(y).imag(); };
    return {gauss_kronrod<double, 61>::integrate(re, a, b, 15, 1e-13),
            gauss_kronrod<double, 61>::integrate(im, a, b, 15, 1e-13)};
}

// Direct quadrature of the defining integrals in y = log tau, for f(tau) = F(log tau).
// S: PV int (t/tau)^gamma f(tau) / (tau - t) dtau / (pi i); R: same with tau + t.
cd s_oracle(const std::function<double(double)>& F, cd gamma, double x, double lo, double hi)
{
    // g(y) = (t/tau)^gamma F(y) tau (y - x) / (tau - t) is smooth through y = x.
    auto g = [&](double y) -> cd {
        const double d = y - x;
        const double q = std::abs(d) < 1e-12 ? 1.0 : d / (-std::expm1(-d));
        return std::exp(gamma * (x - y)) * F(y) * q;
    };
    const cd gx = g(x);
    auto h = [&](double y) -> cd { return (g(y) - gx) / (y - x); };
    const cd pv = integrate(h, lo, x) + integrate(h, x, hi) + gx * std::log((hi - x) / (x - lo));
    return pv / (kPi * kI);
}

cd r_oracle(const std::function<double(double)>& F, cd gamma, double x, double lo, double hi)
{
    auto k = [&](double y) -> cd { return std::exp(gamma * (x - y)) * F(y) / (1.0 + std::exp(x - y)); };
    return integrate(k, lo, hi) / (kPi * kI);
}

} // namespace

TEST_CASE("S and R against direct quadrature of their kernels")
{
    const LogGrid g;
    const double c = 0.4, sig = 0.5;
    auto F = [c, sig](double y) { return std::exp(-0.5 * (y - c) * (y - c) / (sig * sig)); };
    const Vec f = g.sample([&](double x) { return cd(F(x)); });
    for (auto [p, gm] : std::vector<std::pair<double, cd>>{{2.0, 0.0}, {2.0, cd(0.1, 0.2)}, {3.0, -0.1}}) {
        const auto Sm = op_S(gm, p, g, Route::Mellin)(f);
        const auto Sp = op_S(gm, p, g, Route::PV)(f);
        const auto Rm = op_R(gm, p, g, Route::Mellin)(f);
        const auto Rp = op_R(gm, p, g, Route::PV)(f);
        for (int j : {1500, 2000, 2048, 2100, 2300, 2900}) {
            const double x = g.x(j);
            const double lo = std::min(x, c) - 12 * sig, hi = std::max(x, c) + 12 * sig;
            const cd s = s_oracle(F, gm, x, lo - 1.0, hi + 1.0);
            const cd r = r_oracle(F, gm, x, lo, hi);
            CHECK(std::abs(Sm[j] - s) < 1e-8);
            CHECK(std::abs(Sp[j] - s) < 1e-5);
            CHECK(std::abs(Rm[j] - r) < 1e-8);
            CHECK(std::abs(Rp[j] - r) < 1e-8);
        }
    }
}

TEST_CASE("projections: P+ + P- = I, P+ is not idempotent")
{
    const LogGrid g;
    const auto ts = inner_testset(g);
    const cd gm(0.1, 0.2);
    const auto Pp = op_P(gm, 2.0, g, +1, Route::Mellin), Pm = op_P(gm, 2.0, g, -1, Route::Mellin);
    const auto P2 = mellin_route(p_multiplier(2.0, gm, +1) * p_multiplier(2.0, gm, +1), 2.0, g);
    const auto R2 = mellin_route(r_multiplier(2.0, gm) * r_multiplier(2.0, gm), 2.0, g);
    for (const auto& f : ts) {
        CHECK(relative_error(Pp(f) + Pm(f), f, g, 2.0) < 1e-15);
        const Vec defect = P2(f) - Pp(f);
        CHECK(lp_norm(defect - 0.25 * R2(f), g, 2.0) / lp_norm(f, g, 2.0) < 1e-10);
        CHECK(lp_norm(defect, g, 2.0) / lp_norm(f, g, 2.0) > 1e-3);
    }
}

TEST_CASE("PR relations on both routes")
{
    const LogGrid g;
    const auto ts = inner_testset(g);
    for (auto [gm, dl] : std::vector<std::pair<cd, cd>>{{0.1, 0.1}, {0.1, cd(0.0, 0.3)}, {cd(-0.2, 0.5), 0.3}}) {
        CHECK(pr_relations_check(gm, dl, 2.0, g, ts, Route::Mellin).max() < 1e-10);
        CHECK(pr_relations_check(gm, dl, 2.0, g, ts, Route::PV).max() < 1e-3);
    }
}

TEST_CASE("U_alpha is an isometry and U^{-1} undoes it")
{
    const LogGrid g;
    const auto ts = inner_testset(g);
    for (const auto& a : {SOShift::family(0.3, 0.2, 1.0), SOShift::dilation(2.0), SOShift::dilation(0.7)}) {
        for (double p : {1.5, 2.0, 3.0}) {
            const auto U = op_U(a, p, g), Ui = op_U_inverse(a, p, g);
            for (const auto& f : ts) {
                CHECK(std::abs(lp_norm(U(f), g, p) / lp_norm(f, g, p) - 1.0) < 1e-4);
                CHECK(relative_error(Ui(U(f)), f, g, p) < 1e-6);
            }
        }
    }
}

TEST_CASE("U reads f at alpha(t)")
{
    const LogGrid g;
    const auto a = SOShift::family(0.3, 0.2, 1.0);
    const Vec f = g.sample([](double x) { return cd(std::exp(-x * x)); });
    const Vec u = op_U(a, 2.0, g)(f);
    for (int j : {1800, 2048, 2222}) {
        const double x = g.x(j);
        const double y = a.eval_log(x);
        const double w = std::sqrt(std::exp(a.omega_log(x)) * (1 + a.psi_log(x)));
        CHECK(std::abs(u[j] - w * std::exp(-y * y)) < 1e-8);
    }
}

TEST_CASE("shifted grid leaving the guard raises")
{
    const LogGrid g(-12, 12, 512);
    CHECK_THROWS_AS(op_U(SOShift::dilation(std::exp(8.0)), 2.0, g), RangeError);
}

TEST_CASE("a dilation commutes with Mellin convolutions")
{
    const LogGrid g(-12, 12, 512);
    const auto R = op_R(0.0, 2.0, g, Route::Mellin).materialized();
    // A dilation by a whole number of grid steps is an exact shift. What is left is the tail
    // of R f (decaying like e^{-|x|/2}) being cut at the grid edge, about e^{-4}.
    const auto U = op_U(SOShift::dilation(std::exp(16 * g.dx())), 2.0, g).materialized();
    const auto rep = commutator_probe(R, U);
    CHECK(rep.sigma.front() < 2e-2);
    // Interpolating off the grid adds little on top.
    const auto rep_2t = commutator_probe(R, op_U(SOShift::dilation(2.0), 2.0, g).materialized());
    CHECK(rep_2t.sigma.front() < 1.2 * rep.sigma.front());
    const Vec th = g.sample([](double x) { return cd(std::tanh(x)); });
    const auto T = DiscretizedOperator::from_matrix(g, 2.0, Mat(th.asDiagonal()), "tanh");
    CHECK(commutator_probe(R, T).sigma.front() > 10 * rep_2t.sigma.front());
    const auto a = SOShift::family(0.3, 0.2, 1.0);
    FunctionalOperatorSeries c(a, {{0, a.omega()}});
    const auto A = (op_functional(c, 2.0, g) * op_R(0.0, 2.0, g, Route::Mellin)).materialized();
    const auto rep2 = commutator_probe(A, op_U(a, 2.0, g).materialized());
    CHECK(rep2.ratio32 < 1e-2);
    CHECK(rep2.sigma.size() == 40);
}

TEST_CASE("functional operators")
{
    const LogGrid g;
    const auto a = SOShift::dilation(2.0);
    FunctionalOperatorSeries A(a, {{0, SOFunction::constant(2.0)}, {1, SOFunction::constant(-1.0)},
                                   {-1, SOFunction::parse("1/(1+t)")}});
    CHECK(A.max_power() == 1);
    CHECK_FALSE(A.is_binomial());
    CHECK(A.wiener_norm(g.range()) == doctest::Approx(4.0).epsilon(1e-3));
    CHECK(A.so_flags().empty());
    FunctionalOperatorSeries B(a, {{0, SOFunction::parse("sin(log(t))")}});
    CHECK(B.so_flags().size() == 1);

    const auto op = op_functional(A, 2.0, g);
    const auto U = op_U(a, 2.0, g), Ui = op_U_inverse(a, 2.0, g);
    const Vec c = g.sample([](double x) { return cd(1.0 / (1.0 + std::exp(x))); });
    for (const auto& f : inner_testset(g)) {
        const Vec expect = 2.0 * f - U(f) + c.cwiseProduct(Ui(f));
        CHECK((op(f) - expect).norm() < 1e-12);
    }
}

TEST_CASE("paired forms agree with N for constant coefficients")
{
    // With A+ = A- the correction terms vanish and both forms reduce to A (P0+ + P0-) = A.
    const LogGrid g;
    const auto a = SOShift::dilation(2.0);
    FunctionalOperatorSeries A(a, {{0, SOFunction::constant(2.0)}, {1, SOFunction::constant(-1.0)}});
    CompositeData d{2.0, cd(0.1, 0.2), A, A};
    const auto [F1, F2] = paired_forms(d, g);
    const auto N = op_N(d, g);
    const auto opA = op_functional(A, 2.0, g);
    for (const auto& f : inner_testset(g)) {
        CHECK(relative_error(N(f), opA(f), g, 2.0) < 1e-12);
        CHECK(relative_error(F1(f), opA(f), g, 2.0) < 1e-12);
        CHECK(relative_error(F2(f), opA(f), g, 2.0) < 1e-12);
    }
}

TEST_CASE("paired forms: pv and Mellin routes agree")
{
    const LogGrid g(-12, 12, 1024);
    const auto a = SOShift::dilation(2.0);
    FunctionalOperatorSeries Ap(a, {{0, SOFunction::constant(2.0)}, {1, SOFunction::constant(-1.0)}});
    FunctionalOperatorSeries Am(a, {{0, SOFunction::constant(1.0)}, {1, SOFunction::constant(0.5)}});
    CompositeData d{2.0, cd(0.1, 0.0), Ap, Am};
    const auto [M1, M2] = paired_forms(d, g, Route::Mellin);
    const auto [V1, V2] = paired_forms(d, g, Route::PV);
    for (const auto& f : inner_testset(g)) {
        CHECK(relative_error(V1(f), M1(f), g, 2.0) < 1e-2);
        CHECK(relative_error(V2(f), M2(f), g, 2.0) < 1e-2);
    }
}

TEST_CASE("inner test set")
{
    const LogGrid g;
    const auto ts = inner_testset(g);
    REQUIRE(ts.size() == 5);
    for (const auto& f : ts) {
        CHECK(std::abs(f[0]) < 1e-30);
        CHECK(std::abs(f[g.n() - 1]) < 1e-30);
    }
}

TEST_CASE("dense matrices are capped")
{
    const LogGrid g;
    CHECK_THROWS_AS(DiscretizedOperator::identity(g, 2.0).matrix(), ConfigurationError);
    const LogGrid s(-4, 4, 64);
    const Mat m = DiscretizedOperator::identity(s, 2.0).matrix();
    CHECK((m - Mat::Identity(64, 64)).norm() == 0.0);
}
