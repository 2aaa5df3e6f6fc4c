#include <doctest.h>

#include "sofred/errors.hpp"
#include "sofred/expr.hpp"

#include <cmath>
#include <numbers>

using sofred::expr::Expression;
using cd = std::complex<double>;

namespace {

double close(cd a, cd b) { return std::abs(a - b); }

} // namespace

TEST_CASE("closed forms at sample points")
{
    const double ts[] = {1e-3, 0.2, 1.0, 3.5, 40.0};
    for (double t : ts) {
        CHECK(close(Expression::parse("2/(1+t)").eval(t), 2.0 / (1.0 + t)) < 1e-14);
        CHECK(close(Expression::parse("2*t/(1+t)").eval(t), 2.0 * t / (1.0 + t)) < 1e-14);
        CHECK(close(Expression::parse("sin(log(1+log(t)^2))").eval(t), std::sin(std::log1p(std::log(t) * std::log(t)))) <
              1e-14);
        CHECK(close(Expression::parse("1.5+0.4*sin(log(1+abs(log(t))))").eval(t),
                    1.5 + 0.4 * std::sin(std::log1p(std::abs(std::log(t))))) < 1e-14);
        CHECK(close(Expression::parse("exp(i*pi*t)").eval(t), std::polar(1.0, std::numbers::pi * t)) < 1e-13);
        CHECK(close(Expression::parse("sqrt(t)*atan(t)-cos(t)").eval(t), std::sqrt(t) * std::atan(t) - std::cos(t)) < 1e-14);
        CHECK(close(Expression::parse("log1p(t)").eval(t), std::log1p(t)) < 1e-14);
    }
}

TEST_CASE("precedence, unary signs, powers")
{
    CHECK(close(Expression::parse("1+2*3^2").eval(1.0), 19.0) < 1e-15);
    CHECK(close(Expression::parse("-2^2").eval(1.0), -4.0) < 1e-15);
    CHECK(close(Expression::parse("(1+t)^-1").eval(3.0), 0.25) < 1e-15);
    CHECK(close(Expression::parse("2-3-4").eval(1.0), -5.0) < 1e-15);
    CHECK(close(Expression::parse("8/4/2").eval(1.0), 1.0) < 1e-15);
    CHECK(close(Expression::parse("1.5e-3*t").eval(2.0), 3e-3) < 1e-18);
    CHECK(close(Expression::parse("2*i").eval(1.0), cd(0, 2)) < 1e-15);
}

TEST_CASE("log-coordinate rewrites stay accurate far out")
{
    // t = e^5000 is not a double; log(t) and log(1+t) still are.
    const double x = 5000.0;
    CHECK(close(Expression::parse("log(t)").eval_log(x), x) < 1e-12);
    CHECK(close(Expression::parse("log(1+t)").eval_log(x), x) < 1e-9);
    CHECK(close(Expression::parse("log1p(t)").eval_log(-x), 0.0) < 1e-300);
    CHECK(close(Expression::parse("sin(log(1+log(t)^2))").eval_log(1e8), std::sin(std::log1p(1e16))) < 1e-12);
    // 2/(1+t) evaluates to its limits through the clamp.
    CHECK(close(Expression::parse("2/(1+t)").eval_log(-1e6), 2.0) < 1e-15);
    CHECK(close(Expression::parse("2/(1+t)").eval_log(1e6), 0.0) < 1e-15);
}

TEST_CASE("symbolic derivative matches finite differences in log t")
{
    const char* srcs[] = {"0.3+0.2*sin(log(1+log(t)^2))", "2/(1+t)", "atan(log(t))*cos(log(t))",
                          "sqrt(1+t^2)", "exp(-t)"};
    for (const char* s : srcs) {
        const auto e = Expression::parse(s);
        const auto d = e.derivative();
        for (double x : {-3.0, -0.7, 0.0, 0.4, 2.5}) {
            const double h = 1e-5;
            const cd fd = (e.eval_log(x + h) - e.eval_log(x - h)) / (2 * h);
            CHECK(close(d.eval_log(x), fd) < 1e-7);
        }
    }
}

TEST_CASE("constants")
{
    CHECK(Expression::parse("2*pi-1").is_constant());
    CHECK(Expression::parse("log(2)").is_constant());
    CHECK(close(Expression::parse("log(2)").eval(5.0), std::log(2.0)) < 1e-15);
}

TEST_CASE("syntax errors carry a position")
{
    auto pos_of = [](const char* s) -> long {
        try {
            Expression::parse(s);
        } catch (const sofred::ParseError& e) {
            return long(e.position);
        }
        return -1;
    };
    CHECK(pos_of("1+") == 2);
    CHECK(pos_of("2*(t+1") == 6);
    CHECK(pos_of("foo(t)") == 0);
    CHECK(pos_of("t^1.5") >= 2);
    CHECK(pos_of("1 $ 2") == 2);
    CHECK(pos_of("x") == 0);
}
