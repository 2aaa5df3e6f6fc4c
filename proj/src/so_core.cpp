#include "sofred/so_core.hpp"

#include "sofred/errors.hpp"
#include "sofred/expr.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

namespace sofred {

namespace {

std::string fmt_double(double v)
{
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

} // namespace

std::string to_string(Endpoint e) { return e == Endpoint::Zero ? "0" : "inf"; }

Endpoint parse_endpoint(std::string_view s)
{
    if (s == "0" || s == "zero")
        return Endpoint::Zero;
    if (s == "inf" || s == "infinity" || s == "∞")
        return Endpoint::Infinity;
    throw ConfigurationError("unknown endpoint '" + std::string(s) + "'");
}

FiberPoint FiberPoint::geometric(Endpoint e, double ratio, double t0, std::string label)
{
    if (!(ratio > 0.0) || !(t0 > 0.0) || ratio == 1.0 || !std::isfinite(ratio) || !std::isfinite(t0))
        throw ConfigurationError("geometric fiber needs ratio > 0, ratio != 1 and t0 > 0");
    FiberPoint f;
    f.endpoint_ = e;
    f.rule_ = Rule::Geometric;
    f.x0_ = std::log(t0);
    f.step_ = std::abs(std::log(ratio));
    if (label.empty())
        label = to_string(e) + ":ratio=" + fmt_double(std::exp(f.step_)) + ":t0=" + fmt_double(t0);
    f.label_ = std::move(label);
    return f;
}

FiberPoint FiberPoint::log_phase(Endpoint e, PhaseMap map, double theta0, double step, std::string label)
{
    if (!(theta0 > 0.0) || !(step > 0.0))
        throw ConfigurationError("log-phase fiber needs theta0 > 0 and step > 0");
    FiberPoint f;
    f.endpoint_ = e;
    f.rule_ = Rule::LogPhase;
    f.map_ = map;
    f.x0_ = theta0;
    f.step_ = step;
    if (label.empty())
        label = to_string(e) + (map == PhaseMap::Log1pAbs ? ":log1p_abs" : ":log1p_square") +
                ":theta0=" + fmt_double(theta0) + ":step=" + fmt_double(step);
    f.label_ = std::move(label);
    return f;
}

double FiberPoint::log_term(std::int64_t n) const
{
    const double sign = endpoint_ == Endpoint::Infinity ? 1.0 : -1.0;
    if (rule_ == Rule::Geometric)
        return x0_ + sign * step_ * double(n);
    const double theta = x0_ + step_ * double(n);
    const double m = std::expm1(theta);
    return sign * (map_ == PhaseMap::Log1pAbs ? m : std::sqrt(m));
}

double FiberPoint::term(std::int64_t n) const { return std::exp(log_term(n)); }

std::vector<FiberPoint> default_fibers(Endpoint e)
{
    std::vector<FiberPoint> out;
    const double two_pi = 2.0 * std::numbers::pi;
    for (int m : {1, 2, 3, 5}) {
        for (double x0 : {0.0, 0.5, 0.8}) {
            auto f = FiberPoint::geometric(e, std::exp(two_pi / m), std::exp(x0),
                                           to_string(e) + ":m=" + std::to_string(m) + ":x0=" + fmt_double(x0));
            f.set_heuristic(true);
            out.push_back(std::move(f));
        }
    }
    return out;
}

SOFunction::SOFunction() : SOFunction(constant(0.0)) {}

SOFunction::SOFunction(LogEvaluator f, std::string label) : eval_(std::move(f)), label_(std::move(label)) {}

SOFunction SOFunction::constant(cd c, std::string label)
{
    SOFunction f([c](double) { return c; }, std::move(label));
    f.constant_ = c;
    return f;
}

SOFunction SOFunction::from_expression(const expr::Expression& e, std::string label)
{
    if (label.empty())
        label = e.source();
    if (e.is_constant())
        return constant(e.eval_log(0.0), std::move(label));
    return SOFunction([e](double x) { return e.eval_log(x); }, std::move(label));
}

SOFunction SOFunction::parse(std::string_view text, std::string label)
{
    return from_expression(expr::Expression::parse(text), std::move(label));
}

cd SOFunction::at_log(double x) const
{
    cd v = eval_(x);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
        throw EvaluationDomainError("'" + label_ + "' is not finite at log t = " + fmt_double(x));
    return v;
}

cd SOFunction::operator()(double t) const
{
    if (!(t > 0.0))
        throw EvaluationDomainError("'" + label_ + "' evaluated at non-positive t");
    return at_log(std::log(t));
}

void SOFunction::declare(const FiberPoint& xi, cd value)
{
    for (auto& [lbl, v] : declared_) {
        if (lbl == xi.label()) {
            v = value;
            return;
        }
    }
    declared_.emplace_back(xi.label(), value);
}

std::optional<cd> SOFunction::declared(const FiberPoint& xi) const
{
    for (const auto& [lbl, v] : declared_)
        if (lbl == xi.label())
            return v;
    return std::nullopt;
}

SOFunction SOFunction::operator*(const SOFunction& g) const
{
    if (constant_ && g.constant_)
        return constant(*constant_ * *g.constant_, label_ + "*" + g.label_);
    auto a = eval_;
    auto b = g.eval_;
    return SOFunction([a, b](double x) { return a(x) * b(x); }, "(" + label_ + ")*(" + g.label_ + ")");
}

SOFunction SOFunction::operator+(const SOFunction& g) const
{
    if (constant_ && g.constant_)
        return constant(*constant_ + *g.constant_, label_ + "+" + g.label_);
    auto a = eval_;
    auto b = g.eval_;
    return SOFunction([a, b](double x) { return a(x) + b(x); }, "(" + label_ + ")+(" + g.label_ + ")");
}

SOFunction SOFunction::operator-(const SOFunction& g) const
{
    if (constant_ && g.constant_)
        return constant(*constant_ - *g.constant_, label_ + "-" + g.label_);
    auto a = eval_;
    auto b = g.eval_;
    return SOFunction([a, b](double x) { return a(x) - b(x); }, "(" + label_ + ")-(" + g.label_ + ")");
}

SOFunction SOFunction::scaled(cd c) const
{
    if (constant_)
        return constant(c * *constant_, label_);
    auto a = eval_;
    return SOFunction([a, c](double x) { return c * a(x); }, label_);
}

SOFunction SOFunction::conjugate() const
{
    if (constant_)
        return constant(std::conj(*constant_), "conj(" + label_ + ")");
    auto a = eval_;
    return SOFunction([a](double x) { return std::conj(a(x)); }, "conj(" + label_ + ")");
}

SOFunction SOFunction::dilated(double log_c) const
{
    if (constant_)
        return *this;
    auto a = eval_;
    return SOFunction([a, log_c](double x) { return a(x + log_c); }, label_);
}

namespace {

double cross(cd o, cd a, cd b)
{
    return (a.real() - o.real()) * (b.imag() - o.imag()) - (a.imag() - o.imag()) * (b.real() - o.real());
}

} // namespace

double diameter(const std::vector<cd>& values)
{
    if (values.size() < 2)
        return 0.0;
    bool real_only = std::all_of(values.begin(), values.end(), [](cd v) { return v.imag() == 0.0; });
    if (real_only) {
        auto [lo, hi] = std::minmax_element(values.begin(), values.end(),
                                            [](cd a, cd b) { return a.real() < b.real(); });
        return hi->real() - lo->real();
    }
    // Convex hull (monotone chain) followed by rotating calipers.
    std::vector<cd> pts(values);
    std::sort(pts.begin(), pts.end(), [](cd a, cd b) {
        return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
    });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() == 1)
        return 0.0;
    std::vector<cd> hull(2 * pts.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0)
            --k;
        hull[k++] = pts[i];
    }
    for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
        while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0)
            --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    const std::size_t h = hull.size();
    if (h == 2)
        return std::abs(hull[0] - hull[1]);
    double best = 0.0;
    std::size_t j = 1;
    for (std::size_t i = 0; i < h; ++i) {
        std::size_t ni = (i + 1) % h;
        while (std::abs(cross(hull[i], hull[ni], hull[(j + 1) % h])) > std::abs(cross(hull[i], hull[ni], hull[j])))
            j = (j + 1) % h;
        best = std::max({best, std::abs(hull[i] - hull[j]), std::abs(hull[ni] - hull[j])});
    }
    return best;
}

std::vector<double> dyadic_samples(double r, int samples)
{
    if (!(r > 0.0) || samples < 2)
        throw ConfigurationError("dyadic sampling needs r > 0 and at least 2 samples");
    const double a = std::log(r);
    const double h = std::numbers::ln2 / double(samples - 1);
    std::vector<double> xs(samples);
    for (int i = 0; i < samples; ++i)
        xs[i] = a + h * double(i);
    xs.back() = a + std::numbers::ln2;
    return xs;
}

double oscillation_modulus(const SOFunction& f, double r, int samples)
{
    auto xs = dyadic_samples(r, samples);
    std::vector<cd> vals;
    vals.reserve(xs.size());
    for (double x : xs)
        vals.push_back(f.at_log(x));
    return diameter(vals);
}

namespace {

bool tail_passes(const std::vector<ScaleModulus>& seq, double tol)
{
    const std::size_t K = seq.size();
    const std::size_t w = std::max<std::size_t>(4, K / 4);
    if (K < 2 * w)
        return false;
    double lead = 0.0, trail = 0.0;
    for (std::size_t i = 0; i < w; ++i) {
        lead = std::max(lead, seq[i].modulus);
        trail = std::max(trail, seq[K - w + i].modulus);
    }
    const double noise = 1e-12 + 1e-6 * lead;
    return trail < tol && trail <= lead + noise;
}

} // namespace

OscillationReport so_check(const SOFunction& f, int r_decades, double tol, int samples)
{
    if (r_decades < 4)
        throw ConfigurationError("so_check needs at least 4 decades");
    OscillationReport rep;
    rep.tol = tol;
    const int K = int(std::ceil(r_decades * std::log2(10.0)));
    for (int k = 1; k <= K; ++k) {
        const double r0 = std::ldexp(1.0, -k);
        const double r1 = std::ldexp(1.0, k - 1);
        rep.toward_zero.push_back({r0, oscillation_modulus(f, r0, samples)});
        rep.toward_infinity.push_back({r1, oscillation_modulus(f, r1, samples)});
    }
    rep.pass_zero = tail_passes(rep.toward_zero, tol);
    rep.pass_infinity = tail_passes(rep.toward_infinity, tol);
    return rep;
}

FiberEvaluation fiber_value(const SOFunction& f, const FiberPoint& xi, double tol, std::int64_t n_max)
{
    return fiber_values({f}, xi, tol, n_max).front();
}

std::vector<FiberEvaluation> fiber_values(const std::vector<SOFunction>& fs, const FiberPoint& xi, double tol,
                                          std::int64_t n_max)
{
    constexpr int W = 5;
    std::map<std::int64_t, std::vector<cd>> cache;
    auto values_at = [&](std::int64_t n) -> const std::vector<cd>& {
        auto it = cache.find(n);
        if (it != cache.end())
            return it->second;
        const double x = xi.log_term(n);
        std::vector<cd> v;
        v.reserve(fs.size());
        for (const auto& f : fs)
            v.push_back(f.at_log(x));
        return cache.emplace(n, std::move(v)).first->second;
    };
    auto radius_at = [&](std::int64_t n) {
        double rad = 0.0;
        for (std::size_t i = 0; i < fs.size(); ++i) {
            std::vector<cd> window;
            for (int j = 0; j < W; ++j)
                window.push_back(values_at(n + j)[i]);
            rad = std::max(rad, diameter(window));
        }
        return rad;
    };

    // Exponential probing for a stabilized window, then bisection back to
    // the earliest one. Cheap even when stabilization needs millions of terms.
    std::int64_t hi = 0;
    std::int64_t lo = -1;
    while (radius_at(hi) > tol) {
        lo = hi;
        hi = hi == 0 ? 1 : 2 * hi;
        if (hi + W - 1 > n_max)
            throw FiberDivergenceError("test sequence " + xi.label() + " did not stabilize within " +
                                       std::to_string(n_max) + " terms");
    }
    while (hi - lo > 1) {
        std::int64_t mid = lo + (hi - lo) / 2;
        if (radius_at(mid) <= tol)
            hi = mid;
        else
            lo = mid;
    }
    const std::int64_t n_last = hi + W - 1;
    const double rad = radius_at(hi);
    const auto& vals = values_at(n_last);
    std::vector<FiberEvaluation> out;
    for (std::size_t i = 0; i < fs.size(); ++i)
        out.push_back({vals[i], n_last, rad, fs[i].declared(xi)});
    return out;
}

} // namespace sofred
