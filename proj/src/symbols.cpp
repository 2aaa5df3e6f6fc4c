#include "sofred/symbols.hpp"

#include "sofred/errors.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace sofred {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kZeroFrequency = 1e-12;

} // namespace

void check_admissible(double p, cd gamma)
{
    if (!(p > 1.0) || !std::isfinite(p))
        throw AdmissibilityError("Lebesgue exponent must satisfy 1 < p < infinity");
    const double c = 1.0 / p + gamma.real();
    if (!(c > 0.0 && c < 1.0)) {
        std::ostringstream os;
        os << "weight exponent violates 0 < 1/p + Re gamma < 1 (value " << c << ")";
        throw AdmissibilityError(os.str());
    }
}

SRP eval_s_r_p(double p, cd gamma, double x)
{
    const cd z(kPi * (x - gamma.imag()), kPi * (1.0 / p + gamma.real()));
    const bool flip = z.real() < 0.0;
    const cd w = flip ? -z : z;
    const cd q = std::exp(-2.0 * w);
    const cd den = 1.0 - q;
    cd coth = (1.0 + q) / den;
    cd csch = 2.0 * std::exp(-w) / den;
    cd pp = 1.0 / den;
    cd pm = -q / den;
    if (flip) {
        coth = -coth;
        csch = -csch;
        std::swap(pp, pm);
    }
    return {coth, csch, pp, pm};
}

const FiberData& SymbolContext::fiber(const std::string& label) const
{
    for (const auto& f : fibers)
        if (f.fiber.label() == label)
            return f;
    throw ContextError("no fiber data for '" + label + "'");
}

FiberData build_fiber_data(const FiberPoint& xi, const std::map<int, SOFunction>& a_terms,
                           const std::map<int, SOFunction>& b_terms, const SOShift& alpha, const SOShift& beta,
                           double tol, std::int64_t n_max)
{
    std::vector<SOFunction> fs;
    for (const auto& [k, f] : a_terms)
        fs.push_back(f);
    for (const auto& [k, f] : b_terms)
        fs.push_back(f);
    fs.push_back(alpha.omega());
    fs.push_back(beta.omega());

    FiberData fd{xi, {}, {}, 0.0, 0.0, 0.0, {}};
    std::vector<cd> vals(fs.size());
    std::vector<bool> have(fs.size(), false);
    for (std::size_t i = 0; i < fs.size(); ++i) {
        if (auto d = fs[i].declared(xi)) {
            vals[i] = *d;
            have[i] = true;
        }
    }
    try {
        auto ev = fiber_values(fs, xi, tol, n_max);
        fd.radius = ev.front().radius;
        for (std::size_t i = 0; i < fs.size(); ++i) {
            if (have[i]) {
                if (std::abs(ev[i].value - vals[i]) > std::max(tol, 10 * ev[i].radius)) {
                    std::ostringstream os;
                    os << "declared value of '" << fs[i].label() << "' differs from the sequence limit by "
                       << std::abs(ev[i].value - vals[i]);
                    fd.notes.push_back(os.str());
                }
            } else {
                vals[i] = ev[i].value;
                have[i] = true;
            }
        }
    } catch (const FiberDivergenceError&) {
        if (!std::all_of(have.begin(), have.end(), [](bool h) { return h; }))
            throw;
        fd.notes.push_back("test sequence did not stabilize; declared values used");
    }
    std::size_t i = 0;
    for (const auto& [k, f] : a_terms)
        fd.a[k] = vals[i++];
    for (const auto& [k, f] : b_terms)
        fd.b[k] = vals[i++];
    fd.omega = vals[i++].real();
    fd.eta = vals[i++].real();
    return fd;
}

namespace {

cd exp_sum(const std::map<int, cd>& c, double freq, double x)
{
    cd s = 0.0;
    for (const auto& [k, v] : c)
        s += v * std::polar(1.0, double(k) * freq * x);
    return s;
}

double coeff_l1(const std::map<int, cd>& c)
{
    double s = 0.0;
    for (const auto& [k, v] : c)
        s += std::abs(v);
    return s;
}

bool nonconstant(const std::map<int, cd>& c)
{
    for (const auto& [k, v] : c)
        if (k != 0 && v != cd(0.0))
            return true;
    return false;
}

int max_abs_k(const std::map<int, cd>& c)
{
    int m = 0;
    for (const auto& [k, v] : c)
        if (v != cd(0.0))
            m = std::max(m, std::abs(k));
    return m;
}

int min_abs_k(const std::map<int, cd>& c)
{
    int m = 0;
    for (const auto& [k, v] : c)
        if (k != 0 && v != cd(0.0))
            m = m == 0 ? std::abs(k) : std::min(m, std::abs(k));
    return m;
}

struct Minimum {
    double x;
    double value;
};

// Refines local minima of |h| over a sampled window with Brent's method on |h|^2.
template <class F>
std::vector<Minimum> scan_minima(F&& h, double lo, double hi, long N, std::size_t refine_cap)
{
    std::vector<double> v(N);
    const double step = (hi - lo) / double(N - 1);
    for (long i = 0; i < N; ++i)
        v[i] = std::norm(h(lo + step * double(i)));
    std::vector<long> cand;
    for (long i = 0; i < N; ++i) {
        const bool left = i == 0 || v[i] <= v[i - 1];
        const bool right = i == N - 1 || v[i] <= v[i + 1];
        if (left && right)
            cand.push_back(i);
    }
    std::sort(cand.begin(), cand.end(), [&](long a, long b) { return v[a] < v[b] || (v[a] == v[b] && a < b); });
    if (cand.size() > refine_cap)
        cand.resize(refine_cap);
    std::vector<Minimum> out;
    for (long i : cand) {
        const double a = lo + step * double(std::max(0L, i - 1));
        const double b = lo + step * double(std::min(N - 1, i + 1));
        auto r = boost::math::tools::brent_find_minima([&](double x) { return std::norm(h(x)); }, a, b, 52);
        double best_x = r.first, best = r.second;
        if (v[i] < best) {
            best = v[i];
            best_x = lo + step * double(i);
        }
        out.push_back({best_x, std::sqrt(best)});
    }
    std::sort(out.begin(), out.end(), [](const Minimum& a, const Minimum& b) {
        return a.value < b.value || (a.value == b.value && a.x < b.x);
    });
    return out;
}

// inf over one period of a finite exponential sum with base frequency freq.
double periodic_inf(const std::map<int, cd>& c, double freq)
{
    if (!nonconstant(c) || std::abs(freq) < kZeroFrequency)
        return std::abs(exp_sum(c, 0.0, 0.0));
    const double period = 2.0 * kPi / std::abs(freq);
    auto h = [&](double x) { return exp_sum(c, freq, x); };
    auto m = scan_minima(h, 0.0, period, 4096, 16);
    return m.empty() ? 0.0 : m.front().value;
}

} // namespace

std::pair<cd, cd> eval_a_pm(const FiberData& fd, double x)
{
    return {exp_sum(fd.a, fd.omega, x), exp_sum(fd.b, fd.eta, x)};
}

cd eval_n(const SymbolContext& ctx, const FiberData& fd, double x)
{
    auto [ap, am] = eval_a_pm(fd, x);
    auto srp = eval_s_r_p(ctx.p, ctx.gamma, x);
    return ap * srp.p_plus + am * srp.p_minus;
}

cd eval_m(const SymbolContext& ctx, const BinomialFiber& bf, double x)
{
    auto srp = eval_s_r_p(ctx.p, ctx.gamma, x);
    return (bf.a - bf.b * std::polar(1.0, bf.omega * x)) * srp.p_plus +
           (bf.c - bf.d * std::polar(1.0, bf.eta * x)) * srp.p_minus;
}

double tail_threshold(double p, cd gamma, double eps)
{
    // |p-(x)| ~ e^{-2 pi (x - Im gamma)} and |p+(-x)| ~ e^{-2 pi (x + Im gamma)}.
    double x0 = std::log(2.0 / eps) / (2.0 * kPi) + std::abs(gamma.imag()) + 1.0;
    for (int it = 0; it < 200; ++it) {
        const double a = std::abs(eval_s_r_p(p, gamma, -x0).p_plus);
        const double b = std::abs(eval_s_r_p(p, gamma, x0).p_minus);
        if (std::max(a, b) < eps)
            return x0;
        x0 += 0.5;
    }
    return x0;
}

ConditionIIFiber condition_ii_fiber(const SymbolContext& ctx, const FiberData& fd, double eps_tail, double margin,
                                    long max_samples)
{
    ConditionIIFiber r;
    r.label = fd.fiber.label();
    r.endpoint = fd.fiber.endpoint();
    r.heuristic = fd.fiber.heuristic();
    r.x0 = tail_threshold(ctx.p, ctx.gamma, eps_tail);

    FiberData eff = fd;
    if (std::abs(fd.omega) < kZeroFrequency && nonconstant(fd.a)) {
        r.degenerate = true;
        eff.omega = 0.0;
    }
    if (std::abs(fd.eta) < kZeroFrequency && nonconstant(fd.b)) {
        r.degenerate = true;
        eff.eta = 0.0;
    }

    double min_f = 0.0, max_f = 0.0;
    auto account = [&](const std::map<int, cd>& c, double freq) {
        if (!nonconstant(c) || std::abs(freq) < kZeroFrequency)
            return;
        const double lo = std::abs(freq) * min_abs_k(c);
        const double hi = std::abs(freq) * max_abs_k(c);
        min_f = min_f == 0.0 ? lo : std::min(min_f, lo);
        max_f = std::max(max_f, hi);
    };
    account(eff.a, eff.omega);
    account(eff.b, eff.eta);

    const double T = min_f > 0.0 ? 100.0 * 2.0 * kPi / min_f : 0.0;
    r.quasi_period = min_f > 0.0 ? 2.0 * kPi / min_f : 0.0;
    r.window_lo = -r.x0 - T;
    r.window_hi = r.x0 + T;
    const double L = r.window_hi - r.window_lo;
    double h_target = 0.05;
    if (max_f > 0.0)
        h_target = std::min(h_target, 2.0 * kPi / max_f / 64.0);
    r.samples = std::clamp(long(std::ceil(L / h_target)) + 1, 2001L, std::max(2001L, max_samples));

    auto n_of = [&](double x) { return eval_n(ctx, eff, x); };
    auto minima = scan_minima(n_of, r.window_lo, r.window_hi, r.samples, 4096);
    r.dense_min = minima.empty() ? std::abs(n_of(0.0)) : minima.front().value;
    r.argmin = minima.empty() ? 0.0 : minima.front().x;

    std::vector<double> zeros;
    for (const auto& m : minima)
        if (m.value < margin)
            zeros.push_back(m.x);
    std::sort(zeros.begin(), zeros.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
    if (zeros.size() > 16)
        zeros.resize(16);
    std::sort(zeros.begin(), zeros.end());
    r.near_zeros = zeros;

    const double slack = (coeff_l1(eff.a) + coeff_l1(eff.b)) * eps_tail;
    r.tail_plus_inf = periodic_inf(eff.a, eff.omega) - slack;
    r.tail_minus_inf = periodic_inf(eff.b, eff.eta) - slack;
    r.inf_estimate = std::min({r.dense_min, r.tail_plus_inf, r.tail_minus_inf});
    r.inf_estimate = std::max(r.inf_estimate, 0.0);
    r.pass = r.inf_estimate > margin;
    return r;
}

ConditionIIReport condition_ii_check(const SymbolContext& ctx, double eps_tail, double margin, long max_samples)
{
    bool zero = false, inf = false;
    for (const auto& f : ctx.fibers) {
        zero = zero || f.fiber.endpoint() == Endpoint::Zero;
        inf = inf || f.fiber.endpoint() == Endpoint::Infinity;
    }
    if (!zero || !inf)
        throw ContextError("condition (ii) needs at least one fiber over each endpoint");
    ConditionIIReport rep;
    rep.eps_tail = eps_tail;
    rep.margin = margin;
    rep.all_pass = true;
    for (const auto& f : ctx.fibers) {
        rep.fibers.push_back(condition_ii_fiber(ctx, f, eps_tail, margin, max_samples));
        rep.all_pass = rep.all_pass && rep.fibers.back().pass;
    }
    return rep;
}

} // namespace sofred
