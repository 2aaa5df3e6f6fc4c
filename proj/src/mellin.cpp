#include "sofred/mellin.hpp"

#include "sofred/errors.hpp"
#include "sofred/fft.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace sofred {

LogGrid::LogGrid(double x_min, double x_max, int n) : x_min_(x_min), dx_(0.0), n_(n)
{
    if (n < 2 || (n & (n - 1)) != 0)
        throw ConfigurationError("grid size must be a power of two");
    if (!(x_max > x_min))
        throw ConfigurationError("grid needs x_max > x_min");
    dx_ = (x_max - x_min) / double(n - 1);
}

LogGrid::LogGrid(double x_min, double dx, int n, bool) : x_min_(x_min), dx_(dx), n_(n) {}

double LogGrid::frequency(int m) const
{
    const int k = m < n_ / 2 ? m : m - n_;
    return dxi() * double(k);
}

double LogGrid::dxi() const { return 2.0 * std::numbers::pi / (double(n_) * dx_); }

LogGrid LogGrid::extended(int factor) const
{
    if (factor < 1 || (factor & (factor - 1)) != 0)
        throw ConfigurationError("grid extension factor must be a power of two");
    const int ne = n_ * factor;
    const int off = (ne - n_) / 2;
    return LogGrid(x_min_ - dx_ * off, dx_, ne, true);
}

int LogGrid::offset_in(const LogGrid& ext) const
{
    return int(std::lround((x_min_ - ext.x_min_) / dx_));
}

Vec LogGrid::embed(const Vec& f, const LogGrid& ext) const
{
    Vec F = Vec::Zero(ext.n());
    F.segment(offset_in(ext), n_) = f;
    return F;
}

Vec LogGrid::restrict(const Vec& F, const LogGrid& ext) const { return F.segment(offset_in(ext), n_); }

Vec LogGrid::sample(const std::function<cd(double)>& f_of_x) const
{
    Vec f(n_);
    for (int j = 0; j < n_; ++j)
        f[j] = f_of_x(x(j));
    return f;
}

std::vector<int> LogGrid::inner_indices(double fraction) const
{
    const double mid = 0.5 * (x_min() + x_max());
    const double half = 0.5 * fraction * (x_max() - x_min());
    std::vector<int> idx;
    for (int j = 0; j < n_; ++j)
        if (std::abs(x(j) - mid) <= half)
            idx.push_back(j);
    return idx;
}

double lp_norm(const Vec& f, const LogGrid& g, double p)
{
    double s = 0.0;
    for (int j = 0; j < g.n(); ++j)
        s += std::pow(std::abs(f[j]), p) * g.weight(j);
    return std::pow(s, 1.0 / p);
}

Vec mellin_transform(const Vec& f, const LogGrid& g)
{
    Vec F = f;
    fft::forward(F.data(), g.n());
    for (int m = 0; m < g.n(); ++m)
        F[m] *= g.dx() * std::polar(1.0, -g.frequency(m) * g.x_min());
    return F;
}

Vec inverse_mellin_transform(const Vec& F, const LogGrid& g)
{
    Vec f(g.n());
    for (int m = 0; m < g.n(); ++m)
        f[m] = F[m] * std::polar(1.0, g.frequency(m) * g.x_min());
    fft::inverse(f.data(), g.n());
    return f / (double(g.n()) * g.dx());
}

MellinMultiplier::MellinMultiplier(Fn f, std::string label) : f_(std::move(f)), label_(std::move(label)) {}

MellinMultiplier MellinMultiplier::constant(cd c)
{
    return MellinMultiplier([c](double) { return c; }, "const");
}

Vec MellinMultiplier::values(const LogGrid& g) const
{
    Vec v(g.n());
    for (int m = 0; m < g.n(); ++m) {
        v[m] = f_(g.frequency(m));
        if (!std::isfinite(v[m].real()) || !std::isfinite(v[m].imag()))
            throw EvaluationDomainError("multiplier '" + label_ + "' is not finite on the frequency grid");
    }
    return v;
}

MellinMultiplier MellinMultiplier::operator*(const MellinMultiplier& b) const
{
    auto fa = f_;
    auto fb = b.f_;
    return MellinMultiplier([fa, fb](double x) { return fa(x) * fb(x); }, label_ + "*" + b.label_);
}

MellinMultiplier MellinMultiplier::operator+(const MellinMultiplier& b) const
{
    auto fa = f_;
    auto fb = b.f_;
    return MellinMultiplier([fa, fb](double x) { return fa(x) + fb(x); }, label_ + "+" + b.label_);
}

MellinMultiplier MellinMultiplier::operator-(const MellinMultiplier& b) const
{
    auto fa = f_;
    auto fb = b.f_;
    return MellinMultiplier([fa, fb](double x) { return fa(x) - fb(x); }, label_ + "-" + b.label_);
}

MellinMultiplier MellinMultiplier::scaled(cd c) const
{
    auto fa = f_;
    return MellinMultiplier([fa, c](double x) { return c * fa(x); }, label_);
}

Vec mellin_convolution_values(const Vec& a_values, const Vec& f)
{
    const int n = int(f.size());
    Vec F = f;
    fft::forward(F.data(), n);
    F.array() *= a_values.array();
    fft::inverse(F.data(), n);
    return F / double(n);
}

Vec mellin_convolution(const MellinMultiplier& a, const Vec& f, const LogGrid& g)
{
    return mellin_convolution_values(a.values(g), f);
}

PDOSymbol::PDOSymbol(Fn f, bool t_only, bool xi_only) : f_(std::move(f)), t_only_(t_only), xi_only_(xi_only) {}

PDOSymbol PDOSymbol::of_t(std::function<cd(double)> c)
{
    return PDOSymbol([c](double x, double) { return c(x); }, true, false);
}

PDOSymbol PDOSymbol::of_xi(const MellinMultiplier& a)
{
    return PDOSymbol([a](double, double xi) { return a(xi); }, false, true);
}

PDOSymbol PDOSymbol::operator*(const PDOSymbol& b) const
{
    auto fa = f_;
    auto fb = b.f_;
    return PDOSymbol([fa, fb](double x, double xi) { return fa(x, xi) * fb(x, xi); },
                     t_only_ && b.t_only_, xi_only_ && b.xi_only_);
}

Mat mellin_pdo_columns(const PDOSymbol& a, const Mat& F, const LogGrid& g, int row_begin, int row_end)
{
    const int n = g.n();
    const int cols = int(F.cols());
    if (row_end < 0)
        row_end = n;
    Mat G = F;
    for (int c = 0; c < cols; ++c)
        fft::forward(G.col(c).data(), n);
    // e^{i xi_m (x_j - x_min)} = e^{2 pi i m j / n}; indices taken mod n keep it exact.
    std::vector<cd> roots(n);
    for (int q = 0; q < n; ++q)
        roots[q] = std::polar(1.0, 2.0 * std::numbers::pi * double(q) / double(n));
    std::vector<double> xi(n);
    for (int m = 0; m < n; ++m)
        xi[m] = g.frequency(m);
    Mat out = Mat::Zero(n, cols);
    std::vector<cd> acc(cols);
    for (int j = row_begin; j < row_end; ++j) {
        const double xj = g.x(j);
        std::fill(acc.begin(), acc.end(), cd(0.0));
        long long idx = 0;
        for (int m = 0; m < n; ++m) {
            const cd w = a(xj, xi[m]) * roots[idx];
            for (int c = 0; c < cols; ++c)
                acc[c] += w * G(m, c);
            idx += j;
            if (idx >= n)
                idx %= n;
        }
        for (int c = 0; c < cols; ++c)
            out(j, c) = acc[c] / double(n);
    }
    return out;
}

Vec mellin_pdo(const PDOSymbol& a, const Vec& f, const LogGrid& g, int row_begin, int row_end)
{
    Mat F = f;
    return mellin_pdo_columns(a, F, g, row_begin, row_end).col(0);
}

namespace {

double l2_dmu(const Vec& f, const LogGrid& g) { return std::sqrt(f.squaredNorm() * g.dx()); }

} // namespace

DefectReport pdo_composition_defect(const PDOSymbol& a, const PDOSymbol& b, const std::vector<Vec>& testset,
                                    const LogGrid& g)
{
    DefectReport rep;
    const PDOSymbol ab = a * b;
    for (const auto& f : testset) {
        Vec lhs = mellin_pdo(a, mellin_pdo(b, f, g), g);
        Vec rhs = mellin_pdo(ab, f, g);
        const double nf = l2_dmu(f, g);
        const double d = nf > 0 ? l2_dmu(lhs - rhs, g) / nf : 0.0;
        rep.per_function.push_back(d);
        rep.max_relative = std::max(rep.max_relative, d);
    }
    return rep;
}

VariationReport total_variation(const MellinMultiplier& a, const LogGrid& g, int refine)
{
    const double lo = g.frequency(g.n() / 2);
    const double hi = -lo;
    const long N = long(g.n()) * refine;
    const double h = (hi - lo) / double(N);
    VariationReport rep;
    cd prev = a(lo);
    rep.sup = std::abs(prev);
    double outer = 0.0;
    const long edge = N / 20;
    for (long i = 1; i <= N; ++i) {
        cd cur = a(lo + h * double(i));
        const double d = std::abs(cur - prev);
        rep.variation += d;
        if (i <= edge || i > N - edge)
            outer += d;
        rep.sup = std::max(rep.sup, std::abs(cur));
        prev = cur;
    }
    rep.truncated = outer > 1e-6 * std::max(1.0, rep.variation);
    return rep;
}

double stechkin_bound(const MellinMultiplier& a, const LogGrid& g, double p, std::optional<double> c_p)
{
    double c = 1.0;
    if (c_p)
        c = *c_p;
    else if (p != 2.0)
        throw ConfigurationError("the Stechkin constant c_p must be supplied for p != 2");
    auto v = total_variation(a, g);
    return c * (v.sup + v.variation);
}

} // namespace sofred
