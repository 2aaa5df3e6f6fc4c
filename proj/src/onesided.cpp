#include "sofred/onesided.hpp"

#include "sofred/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace sofred {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double gap(const SOFunction& a, const SOFunction& b, double x) { return std::abs(a.at_log(x)) - std::abs(b.at_log(x)); }

std::vector<double> window_points(double r, int samples)
{
    std::vector<double> xs(samples);
    for (int i = 0; i < samples; ++i)
        xs[i] = r * (1.0 + double(i) / double(samples - 1));
    return xs;
}

int last_window(int decades) { return int(std::floor(decades * std::log2(10.0))) - 1; }

} // namespace

LimitBounds limit_bounds(const SOFunction& a, const SOFunction& b, Endpoint s, int decades, int samples)
{
    if (decades < 6)
        throw ConfigurationError("limit bounds need at least 6 decades");
    const double sign = s == Endpoint::Infinity ? 1.0 : -1.0;
    LimitBounds out;
    const int J = last_window(decades);
    for (int j = 0; j <= J; ++j) {
        const double r = std::ldexp(1.0, j);
        WindowExtrema w{r, kInf, -kInf};
        for (double u : window_points(r, samples)) {
            const double v = gap(a, b, sign * u);
            w.min = std::min(w.min, v);
            w.max = std::max(w.max, v);
        }
        out.windows.push_back(w);
    }
    const std::size_t W = out.windows.size();
    const std::size_t first = W / 2;
    std::vector<double> run_min, run_max;
    double lo = kInf, hi = -kInf;
    for (std::size_t i = first; i < W; ++i) {
        lo = std::min(lo, out.windows[i].min);
        hi = std::max(hi, out.windows[i].max);
        run_min.push_back(lo);
        run_max.push_back(hi);
    }
    out.lower = lo;
    out.upper = hi;
    // Running extrema of the trailing half must not move over the last 4 windows.
    const std::size_t m = run_min.size();
    if (m > 4) {
        out.stabilized = std::abs(run_min[m - 1] - run_min[m - 5]) < kLimitStabilization &&
                         std::abs(run_max[m - 1] - run_max[m - 5]) < kLimitStabilization;
    }
    return out;
}

std::string to_string(BinomialVerdict v)
{
    switch (v) {
    case BinomialVerdict::InvertibleI1: return "invertible_I1";
    case BinomialVerdict::InvertibleI2: return "invertible_I2";
    case BinomialVerdict::StrictlyLeftLI: return "strictly_left_LI";
    case BinomialVerdict::StrictlyRightRI: return "strictly_right_RI";
    case BinomialVerdict::Unclassified: return "unclassified";
    }
    return "unclassified";
}

std::string to_string(Side s) { return s == Side::Left ? "left" : "right"; }

BinomialVerdict binomial_verdict_from(const BinomialClassification& c)
{
    const double th = c.sign_threshold;
    if (c.lower_minus() > th && c.lower_plus() > th && c.inf_abs_a > th)
        return BinomialVerdict::InvertibleI1;
    if (c.upper_minus() < -th && c.upper_plus() < -th && c.inf_abs_b > th)
        return BinomialVerdict::InvertibleI2;
    if (c.upper_minus() < -th && c.lower_plus() > th && c.scan.li_holds)
        return BinomialVerdict::StrictlyLeftLI;
    if (c.upper_plus() < -th && c.lower_minus() > th && c.scan.ri_holds)
        return BinomialVerdict::StrictlyRightRI;
    return BinomialVerdict::Unclassified;
}

namespace {

OrbitScan zero_scan(const SOShift& alpha, const SOFunction& a, const SOFunction& b)
{
    OrbitScan scan;
    const double x0 = 0.0;
    const double x1 = alpha.eval_log(x0);
    for (int i = 0; i < scan.points; ++i) {
        const double x = x0 + (x1 - x0) * double(i) / double(scan.points);
        int max_za = std::numeric_limits<int>::min(), min_za = std::numeric_limits<int>::max();
        int max_zb = std::numeric_limits<int>::min(), min_zb = std::numeric_limits<int>::max();
        bool any = false;
        for (int k = -scan.k_range; k <= scan.k_range; ++k) {
            const double xk = alpha.iterate_log(k, x);
            if (std::abs(a.at_log(xk)) < scan.zero_threshold) {
                max_za = std::max(max_za, k);
                min_za = std::min(min_za, k);
                any = true;
            }
            if (std::abs(b.at_log(xk)) < scan.zero_threshold) {
                max_zb = std::max(max_zb, k);
                min_zb = std::min(min_zb, k);
                any = true;
            }
        }
        if (any)
            ++scan.orbits_with_zeros;
        // Empty zero sets compare as -inf / +inf.
        if (!(max_za <= min_zb))
            scan.li_holds = false;
        if (!(max_zb < min_za))
            scan.ri_holds = false;
    }
    return scan;
}

} // namespace

double sampled_inf_abs(const SOFunction& f, int decades)
{
    if (auto c = f.constant_value())
        return std::abs(*c);
    double m = std::abs(f.at_log(0.0));
    const int J = last_window(decades);
    for (int j = -8; j <= J; ++j)
        for (double u : window_points(std::ldexp(1.0, j), 128))
            m = std::min({m, std::abs(f.at_log(u)), std::abs(f.at_log(-u))});
    return m;
}

BinomialClassification classify_binomial(const SOShift& alpha, const SOFunction& a, const SOFunction& b,
                                         int decades, double sign_threshold)
{
    BinomialClassification c;
    c.sign_threshold = sign_threshold;
    const auto dyn = detect_dynamics(alpha, 1.0, 100000, LogRange{-40.0, 40.0});
    c.tau_plus = dyn.tau_plus;
    c.tau_minus = dyn.tau_minus;
    c.at_minus = limit_bounds(a, b, c.tau_minus, decades);
    c.at_plus = limit_bounds(a, b, c.tau_plus, decades);
    if (!c.at_minus.stabilized || !c.at_plus.stabilized)
        throw ClassificationError("limits of |a| - |b| did not stabilize");
    c.inf_abs_a = sampled_inf_abs(a, decades);
    c.inf_abs_b = sampled_inf_abs(b, decades);
    c.scan = zero_scan(alpha, a, b);
    c.verdict = binomial_verdict_from(c);
    return c;
}

FunctionalOperatorSeries formal_adjoint(const FunctionalOperatorSeries& A)
{
    std::map<int, SOFunction> terms;
    const SOShift shift = A.shift;
    for (const auto& [k, ak] : A.terms) {
        const std::string label = "conj(" + ak.label() + ")o" + std::to_string(-k);
        if (auto c = ak.constant_value()) {
            terms[-k] = SOFunction::constant(std::conj(*c), label);
            continue;
        }
        if (k == 0) {
            terms[0] = ak.conjugate();
            continue;
        }
        const int kk = k;
        const SOFunction f = ak;
        terms[-k] = SOFunction([f, shift, kk](double x) { return std::conj(f.at_log(shift.iterate_log(-kk, x))); },
                               label);
    }
    return FunctionalOperatorSeries(A.shift, std::move(terms));
}

namespace {

Mat select_rows(const Mat& m, const std::vector<int>& idx)
{
    Mat out(idx.size(), m.cols());
    for (std::size_t i = 0; i < idx.size(); ++i)
        out.row(i) = m.row(idx[i]);
    return out;
}

Mat select_cols(const Mat& m, const std::vector<int>& idx)
{
    Mat out(m.rows(), idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i)
        out.col(i) = m.col(idx[i]);
    return out;
}

} // namespace

OneSidedInverse one_sided_inverse(const FunctionalOperatorSeries& A, Side side, double p, const LogGrid& g,
                                  double tol)
{
    const int n = g.n();
    if (n > kMaxDenseSize)
        throw ConfigurationError("one-sided inverses are built densely; use n <= 1024");
    const auto inv = A.shift.check_invariants(guard_range(g.range()));
    const double guard = A.max_power() * inv.sup_abs_omega + 4.0 * g.dx();
    std::vector<int> D;
    for (int j = 0; j < n; ++j)
        if (g.x(j) >= g.x_min() + guard && g.x(j) <= g.x_max() - guard)
            D.push_back(j);
    if (D.size() < 8)
        throw ConfigurationError("grid is too short for the shift; no interior domain left");

    const auto opA = op_functional(A, p, g);
    const Mat MA = opA.matrix();
    const Mat MAd = op_functional(formal_adjoint(A), p, g).matrix();

    Mat B = Mat::Zero(n, n);
    double cond = 0.0;
    if (side == Side::Left) {
        const Mat Ad_D = select_rows(MAd, D);
        const Mat N = Ad_D * select_cols(MA, D);
        Eigen::PartialPivLU<Mat> lu(N);
        cond = 1.0 / lu.rcond();
        if (!(cond < kConditionCap))
            throw NoCertificateError("normal matrix A#A is too ill-conditioned (cond ~ " + std::to_string(cond) + ")");
        const Mat X = lu.solve(Ad_D);
        for (std::size_t i = 0; i < D.size(); ++i)
            B.row(D[i]) = X.row(i);
    } else {
        const Mat Ad_D = select_cols(MAd, D);
        const Mat N = select_rows(MA, D) * Ad_D;
        Eigen::PartialPivLU<Mat> lu(N.transpose());
        cond = 1.0 / lu.rcond();
        if (!(cond < kConditionCap))
            throw NoCertificateError("normal matrix AA# is too ill-conditioned (cond ~ " + std::to_string(cond) + ")");
        // X = Ad_D N^{-1}, solved as N^T X^T = Ad_D^T.
        const Mat X = lu.solve(Ad_D.transpose()).transpose();
        for (std::size_t i = 0; i < D.size(); ++i)
            B.col(D[i]) = X.col(i);
    }

    OneSidedInverse out{DiscretizedOperator::from_matrix(g, p, std::move(B), to_string(side) + "-inverse"), side};
    out.condition = cond;
    out.domain_size = int(D.size());
    for (const auto& f : inner_testset(g)) {
        out.left_residual = std::max(out.left_residual, relative_error(out.op(opA(f)), f, g, p));
        out.right_residual = std::max(out.right_residual, relative_error(opA(out.op(f)), f, g, p));
    }
    out.certified = (side == Side::Left ? out.left_residual : out.right_residual) < tol;
    return out;
}

NeumannInverse neumann_inverse(const SOShift& alpha, const SOFunction& a, const SOFunction& b, int K, double p,
                               const LogGrid& g, double slack)
{
    if (K < 0)
        throw ConfigurationError("Neumann order must be non-negative");
    const LogRange gr = guard_range(g.range());
    double rho = 0.0, inf_a = kInf;
    auto visit = [&](double x) {
        const double aa = std::abs(a.at_log(x));
        inf_a = std::min(inf_a, aa);
        rho = std::max(rho, std::abs(b.at_log(x)) / aa);
    };
    const int m = 8192;
    for (int i = 0; i < m; ++i)
        visit(gr.lo + (gr.hi - gr.lo) * i / double(m - 1));
    for (int j = 0; j <= last_window(6); ++j)
        for (double u : window_points(std::ldexp(1.0, j), 64)) {
            visit(u);
            visit(-u);
        }
    if (!(inf_a > 0.0))
        throw SeriesDivergenceError("a vanishes on the sampled range");
    if (!(rho < 1.0))
        throw SeriesDivergenceError("sup |b/a| = " + std::to_string(rho) + " is not below 1");

    auto U = std::make_shared<DiscretizedOperator>(op_U(alpha, p, g));
    auto ainv = std::make_shared<Vec>(g.sample([&a](double x) { return 1.0 / a.at_log(x); }));
    auto bv = std::make_shared<Vec>(g.sample([&b](double x) { return b.at_log(x); }));
    DiscretizedOperator N(
        g, p,
        [U, ainv, bv, K](const Vec& f) -> Vec {
            const Vec base = ainv->cwiseProduct(f);
            Vec v = base;
            for (int k = 0; k < K; ++k)
                v = base + ainv->cwiseProduct(bv->cwiseProduct(U->apply(v)));
            return v;
        },
        "neumann(" + std::to_string(K) + ")");

    NeumannInverse out{N, rho, std::pow(rho, K + 1) * (1.0 + slack), 0.0, K};

    // Probe centred where both the probe and its (K+1)-fold shift stay on the grid.
    const double w = g.x_max() - g.x_min();
    const double sigma = w / 60.0;
    const double mid = 0.5 * (g.x_min() + g.x_max());
    double c = alpha.iterate_log((K + 2) / 2, mid);
    c = std::clamp(c, g.x_min() + 6 * sigma, g.x_max() - 6 * sigma);
    const Vec f = g.sample([c, sigma](double x) { return cd(std::exp(-0.5 * (x - c) * (x - c) / (sigma * sigma))); });
    const Vec Nf = N(f);
    const Vec ANf = g.sample([&a](double x) { return a.at_log(x); }).cwiseProduct(Nf) - bv->cwiseProduct(U->apply(Nf));
    out.residual = relative_error(ANf, f, g, p);
    return out;
}

} // namespace sofred
