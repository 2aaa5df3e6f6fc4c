#include "sofred/shifts.hpp"

#include "sofred/errors.hpp"
#include "sofred/expr.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <sstream>

namespace sofred {

LogRange guard_range(LogRange working)
{
    const double g = 10.0 * std::numbers::ln2;
    return {working.lo - g, working.hi + g};
}

SOShift::SOShift(SOFunction omega, std::optional<SOFunction> psi, std::string label)
    : omega_(std::move(omega)), psi_(std::move(psi)), label_(std::move(label))
{
}

SOShift SOShift::identity() { return dilation(1.0); }

SOShift SOShift::dilation(double lambda)
{
    if (!(lambda > 0.0))
        throw ConfigurationError("dilation factor must be positive");
    std::ostringstream os;
    os.precision(12);
    os << lambda << "*t";
    return SOShift(SOFunction::constant(std::log(lambda), "log(" + os.str().substr(0, os.str().size() - 2) + ")"),
                   SOFunction::constant(0.0, "0"), os.str());
}

SOShift SOShift::family(double c0, double c1, double nu)
{
    if (!(std::abs(c1) * std::abs(nu) < 1.0))
        throw ConfigurationError("shift family needs |c1| nu < 1 so that 1 + psi stays positive");
    std::ostringstream os;
    os.precision(12);
    os << "family(" << c0 << "," << c1 << "," << nu << ")";
    SOFunction omega(
        [=](double x) { return cd(c0 + c1 * std::sin(nu * std::log1p(x * x)), 0.0); }, "omega:" + os.str());
    SOFunction psi(
        [=](double x) {
            return cd(c1 * nu * std::cos(nu * std::log1p(x * x)) * 2.0 * x / (1.0 + x * x), 0.0);
        },
        "psi:" + os.str());
    return SOShift(std::move(omega), std::move(psi), os.str());
}

SOShift SOShift::from_expressions(std::string_view omega, std::optional<std::string_view> psi)
{
    auto w = expr::Expression::parse(omega);
    auto p = psi ? expr::Expression::parse(*psi) : w.derivative();
    return SOShift(SOFunction::from_expression(w, "omega:" + std::string(omega)),
                   SOFunction::from_expression(p, "psi:" + p.source()), "t*exp(" + std::string(omega) + ")");
}

const SOFunction& SOShift::psi() const
{
    if (!psi_)
        throw ConfigurationError("shift '" + label_ + "' has no psi");
    return *psi_;
}

std::optional<double> SOShift::constant_omega() const
{
    if (auto c = omega_.constant_value())
        return c->real();
    return std::nullopt;
}

double SOShift::omega_log(double x) const
{
    cd v = omega_.at_log(x);
    if (std::abs(v.imag()) > 1e-12 * (1.0 + std::abs(v.real())))
        throw EvaluationDomainError("exponent function of '" + label_ + "' is not real");
    return v.real();
}

double SOShift::psi_log(double x) const { return psi().at_log(x).real(); }

double SOShift::eval_log(double x) const { return x + omega_log(x); }

double SOShift::eval(double t) const { return t * std::exp(omega_log(std::log(t))); }

double SOShift::derivative_log(double x) const { return std::exp(omega_log(x)) * (1.0 + psi_log(x)); }

double SOShift::derivative(double t) const { return derivative_log(std::log(t)); }

double SOShift::inverse_log(double y, double tol) const
{
    if (!std::isfinite(y))
        throw RangeError("inverse shift of a non-finite point");
    auto g = [&](double v) { return v + omega_log(v) - y; };
    const double floor = 8.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(y));
    const double accept = std::max(tol, floor);
    double v = y - omega_log(y);
    double gv = g(v);
    if (std::abs(gv) <= accept)
        return v;
    double lo = v, hi = v;
    double d = 1.0;
    int tries = 0;
    while (!(g(lo) < 0.0)) {
        lo = v - d;
        d *= 2.0;
        if (++tries > 80)
            throw RangeError("cannot bracket inverse shift at log u = " + std::to_string(y));
    }
    d = 1.0;
    tries = 0;
    while (!(g(hi) > 0.0)) {
        hi = v + d;
        d *= 2.0;
        if (++tries > 80)
            throw RangeError("cannot bracket inverse shift at log u = " + std::to_string(y));
    }
    for (int it = 0; it < 200; ++it) {
        gv = g(v);
        if (std::abs(gv) <= accept)
            return v;
        if (gv < 0)
            lo = v;
        else
            hi = v;
        double next;
        if (psi_) {
            next = v - gv / (1.0 + psi_log(v));
        } else {
            next = 0.5 * (lo + hi);
        }
        if (!(next > lo && next < hi))
            next = 0.5 * (lo + hi);
        if (hi - lo <= floor)
            return next;
        v = next;
    }
    return v;
}

double SOShift::inverse(double u, double tol) const
{
    if (!(u > 0.0))
        throw RangeError("inverse shift needs u > 0");
    return std::exp(inverse_log(std::log(u), tol));
}

std::optional<double> SOShift::try_iterate_log(int k, double x, LogRange guard) const
{
    if (!guard.contains(x))
        return std::nullopt;
    if (k >= 0) {
        for (int j = 0; j < k; ++j) {
            x = eval_log(x);
            if (!guard.contains(x))
                return std::nullopt;
        }
    } else {
        for (int j = 0; j < -k; ++j) {
            x = inverse_log(x);
            if (!guard.contains(x))
                return std::nullopt;
        }
    }
    return x;
}

double SOShift::iterate_log(int k, double x, LogRange guard) const
{
    auto r = try_iterate_log(k, x, guard);
    if (!r)
        throw OrbitEscape("orbit of '" + label_ + "' left the guard range");
    return *r;
}

double SOShift::iterate(int k, double t, LogRange guard) const
{
    return std::exp(iterate_log(k, std::log(t), guard));
}

double SOShift::exponent_of_iterate_log(int k, double x, LogRange guard) const
{
    // Summed rather than differenced so large |log t| keeps full precision.
    double sum = 0.0;
    if (k >= 0) {
        for (int j = 0; j < k; ++j) {
            if (!guard.contains(x))
                throw OrbitEscape("orbit of '" + label_ + "' left the guard range");
            const double w = omega_log(x);
            sum += w;
            x += w;
        }
    } else {
        for (int j = 0; j < -k; ++j) {
            x = inverse_log(x);
            if (!guard.contains(x))
                throw OrbitEscape("orbit of '" + label_ + "' left the guard range");
            sum -= omega_log(x);
        }
    }
    return sum;
}

double SOShift::exponent_of_iterate(int k, double t, LogRange guard) const
{
    return exponent_of_iterate_log(k, std::log(t), guard);
}

SOShift SOShift::inverse_shift() const
{
    if (auto c = constant_omega())
        return SOShift(SOFunction::constant(-*c), SOFunction::constant(0.0), "inverse(" + label_ + ")");
    auto self = std::make_shared<SOShift>(*this);
    SOFunction w([self](double x) { return cd(self->inverse_log(x) - x, 0.0); }, "omega:inverse(" + label_ + ")");
    std::optional<SOFunction> p;
    if (psi_) {
        p = SOFunction([self](double x) { return cd(1.0 / (1.0 + self->psi_log(self->inverse_log(x))) - 1.0, 0.0); },
                       "psi:inverse(" + label_ + ")");
    }
    return SOShift(std::move(w), std::move(p), "inverse(" + label_ + ")");
}

SOShift::InvariantReport SOShift::check_invariants(LogRange working, int samples) const
{
    InvariantReport r{std::numeric_limits<double>::infinity(), 0.0, true, 0.0};
    const double h = (working.hi - working.lo) / double(samples - 1);
    double prev = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < samples; ++i) {
        const double x = working.lo + h * i;
        const double w = omega_log(x);
        r.sup_abs_omega = std::max(r.sup_abs_omega, std::abs(w));
        const double y = x + w;
        if (!(y > prev))
            r.increasing = false;
        prev = y;
        if (psi_) {
            const double ps = psi_log(x);
            r.inf_one_plus_psi = std::min(r.inf_one_plus_psi, 1.0 + ps);
            const double e = 1e-5;
            const double fd = (omega_log(x + e) - omega_log(x - e)) / (2 * e);
            r.max_psi_fd_error = std::max(r.max_psi_fd_error, std::abs(fd - ps));
        }
    }
    return r;
}

ShiftDynamics detect_dynamics(const SOShift& alpha, double tau, int k_max, LogRange working, double margin)
{
    if (!(tau > 0.0))
        throw IndeterminateDynamicsError("dynamics start point must be positive");
    const double x0 = std::log(tau);
    ShiftDynamics d{Endpoint::Infinity, Endpoint::Zero, {{0, x0}}};

    auto run = [&](int dir) -> Endpoint {
        double x = x0;
        for (int k = 1; k <= k_max; ++k) {
            if (std::abs(alpha.omega_log(x)) < margin)
                throw IndeterminateDynamicsError("shift '" + alpha.label() + "' is nearly the identity on the orbit");
            x = dir > 0 ? alpha.eval_log(x) : alpha.inverse_log(x);
            d.orbit_samples.emplace_back(dir * k, x);
            if (x > working.hi)
                return Endpoint::Infinity;
            if (x < working.lo)
                return Endpoint::Zero;
        }
        throw IndeterminateDynamicsError("orbit of shift '" + alpha.label() + "' did not escape within " +
                                         std::to_string(k_max) + " steps");
    };
    d.tau_plus = run(+1);
    d.tau_minus = run(-1);
    if (d.tau_plus == d.tau_minus)
        throw IndeterminateDynamicsError("forward and backward orbits escape to the same endpoint");
    std::sort(d.orbit_samples.begin(), d.orbit_samples.end());
    return d;
}

} // namespace sofred
