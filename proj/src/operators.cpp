#include "sofred/operators.hpp"

#include "sofred/errors.hpp"
#include "sofred/fft.hpp"
#include "sofred/symbols.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

namespace sofred {

namespace {

constexpr double kPi = std::numbers::pi;
const cd kI(0.0, 1.0);

} // namespace

DiscretizedOperator::DiscretizedOperator(LogGrid g, double p, Action a, std::string label)
    : grid_(std::move(g)), p_(p), action_(std::move(a)), label_(std::move(label))
{
}

DiscretizedOperator DiscretizedOperator::identity(const LogGrid& g, double p)
{
    return DiscretizedOperator(g, p, [](const Vec& f) { return f; }, "I");
}

DiscretizedOperator DiscretizedOperator::from_matrix(const LogGrid& g, double p, Mat m, std::string label)
{
    if (m.rows() != g.n() || m.cols() != g.n())
        throw ConfigurationError("matrix does not match the grid");
    auto mp = std::make_shared<const Mat>(std::move(m));
    DiscretizedOperator op(g, p, [mp](const Vec& f) -> Vec { return (*mp) * f; }, std::move(label));
    op.matrix_ = mp;
    return op;
}

Vec DiscretizedOperator::apply(const Vec& f) const
{
    if (f.size() != grid_.n())
        throw ConfigurationError("grid function has the wrong length for operator '" + label_ + "'");
    return action_(f);
}

Mat DiscretizedOperator::matrix() const
{
    if (matrix_)
        return *matrix_;
    const int n = grid_.n();
    if (n > kMaxDenseSize)
        throw ConfigurationError("dense matrices are limited to n <= 1024");
    Mat m(n, n);
    Vec e = Vec::Zero(n);
    for (int k = 0; k < n; ++k) {
        e[k] = 1.0;
        m.col(k) = action_(e);
        e[k] = 0.0;
    }
    return m;
}

DiscretizedOperator DiscretizedOperator::materialized() const
{
    if (matrix_)
        return *this;
    return from_matrix(grid_, p_, matrix(), label_);
}

DiscretizedOperator DiscretizedOperator::operator*(const DiscretizedOperator& b) const
{
    auto fa = action_;
    auto fb = b.action_;
    return DiscretizedOperator(grid_, p_, [fa, fb](const Vec& f) { return fa(fb(f)); }, label_ + "*" + b.label_);
}

DiscretizedOperator DiscretizedOperator::operator+(const DiscretizedOperator& b) const
{
    auto fa = action_;
    auto fb = b.action_;
    return DiscretizedOperator(grid_, p_, [fa, fb](const Vec& f) -> Vec { return fa(f) + fb(f); },
                               label_ + "+" + b.label_);
}

DiscretizedOperator DiscretizedOperator::operator-(const DiscretizedOperator& b) const
{
    auto fa = action_;
    auto fb = b.action_;
    return DiscretizedOperator(grid_, p_, [fa, fb](const Vec& f) -> Vec { return fa(f) - fb(f); },
                               label_ + "-" + b.label_);
}

DiscretizedOperator DiscretizedOperator::scaled(cd c) const
{
    auto fa = action_;
    return DiscretizedOperator(grid_, p_, [fa, c](const Vec& f) -> Vec { return c * fa(f); }, label_);
}

DiscretizedOperator DiscretizedOperator::relabeled(std::string label) const
{
    DiscretizedOperator op(*this);
    op.label_ = std::move(label);
    return op;
}

std::string to_string(Route r) { return r == Route::PV ? "pv" : "mellin"; }

namespace {

// Row j reads f at a target point y_j by 4-point Lagrange interpolation and
// multiplies by w_j. Targets outside the grid read zero.
struct InterpRows {
    std::vector<int> start;
    std::vector<std::array<double, 4>> c;
    std::vector<double> w;
};

InterpRows build_rows(const LogGrid& g, const std::function<double(double)>& target,
                      const std::function<double(double)>& weight, LogRange guard)
{
    const int n = g.n();
    InterpRows rows;
    rows.start.resize(n);
    rows.c.resize(n);
    rows.w.resize(n);
    for (int j = 0; j < n; ++j) {
        const double y = target(g.x(j));
        if (!guard.contains(y))
            throw RangeError("shifted grid point leaves the guard range");
        rows.w[j] = weight(g.x(j));
        const double s = (y - g.x_min()) / g.dx();
        if (s < 0.0 || s > double(n - 1)) {
            rows.start[j] = 0;
            rows.c[j] = {0.0, 0.0, 0.0, 0.0};
            continue;
        }
        int i0 = int(std::floor(s)) - 1;
        i0 = std::clamp(i0, 0, n - 4);
        const double u = s - i0;
        rows.start[j] = i0;
        rows.c[j] = {-(u - 1) * (u - 2) * (u - 3) / 6.0, u * (u - 2) * (u - 3) / 2.0, -u * (u - 1) * (u - 3) / 2.0,
                     u * (u - 1) * (u - 2) / 6.0};
    }
    return rows;
}

Vec apply_rows(const InterpRows& rows, const Vec& f)
{
    const int n = int(f.size());
    Vec out(n);
    for (int j = 0; j < n; ++j) {
        const int i0 = rows.start[j];
        const auto& c = rows.c[j];
        out[j] = rows.w[j] * (c[0] * f[i0] + c[1] * f[i0 + 1] + c[2] * f[i0 + 2] + c[3] * f[i0 + 3]);
    }
    return out;
}

DiscretizedOperator rows_operator(const LogGrid& g, double p, InterpRows rows, std::string label)
{
    auto r = std::make_shared<const InterpRows>(std::move(rows));
    return DiscretizedOperator(g, p, [r](const Vec& f) { return apply_rows(*r, f); }, std::move(label));
}

} // namespace

DiscretizedOperator op_U(const SOShift& alpha, double p, const LogGrid& g)
{
    auto rows = build_rows(
        g, [&](double x) { return alpha.eval_log(x); },
        [&](double x) { return std::exp((alpha.omega_log(x) + std::log1p(alpha.psi_log(x))) / p); },
        guard_range(g.range()));
    return rows_operator(g, p, std::move(rows), "U[" + alpha.label() + "]");
}

DiscretizedOperator op_U_inverse(const SOShift& alpha, double p, const LogGrid& g)
{
    auto rows = build_rows(
        g, [&](double x) { return alpha.inverse_log(x); },
        [&](double x) {
            const double y = alpha.inverse_log(x);
            return std::exp(-(alpha.omega_log(y) + std::log1p(alpha.psi_log(y))) / p);
        },
        guard_range(g.range()));
    return rows_operator(g, p, std::move(rows), "U^-1[" + alpha.label() + "]");
}

MellinMultiplier s_multiplier(double p, cd gamma)
{
    check_admissible(p, gamma);
    return MellinMultiplier([p, gamma](double x) { return eval_s_r_p(p, gamma, x).s; }, "s");
}

MellinMultiplier r_multiplier(double p, cd gamma)
{
    check_admissible(p, gamma);
    return MellinMultiplier([p, gamma](double x) { return eval_s_r_p(p, gamma, x).r; }, "r");
}

MellinMultiplier p_multiplier(double p, cd gamma, int sign)
{
    check_admissible(p, gamma);
    if (sign >= 0)
        return MellinMultiplier([p, gamma](double x) { return eval_s_r_p(p, gamma, x).p_plus; }, "p+");
    return MellinMultiplier([p, gamma](double x) { return eval_s_r_p(p, gamma, x).p_minus; }, "p-");
}

DiscretizedOperator mellin_route(const MellinMultiplier& a, double p, const LogGrid& g, int pad, std::string label)
{
    const LogGrid ext = g.extended(pad);
    auto av = std::make_shared<const Vec>(a.values(ext));
    auto phi = std::make_shared<Vec>(g.n());
    auto phi_inv = std::make_shared<Vec>(g.n());
    for (int j = 0; j < g.n(); ++j) {
        (*phi)[j] = std::exp(g.x(j) / p);
        (*phi_inv)[j] = std::exp(-g.x(j) / p);
    }
    if (label.empty())
        label = "Co(" + a.label() + ")";
    return DiscretizedOperator(
        g, p,
        [g, ext, av, phi, phi_inv](const Vec& f) -> Vec {
            Vec F = g.embed(f.cwiseProduct(*phi), ext);
            Vec out = g.restrict(mellin_convolution_values(*av, F), ext);
            return out.cwiseProduct(*phi_inv);
        },
        std::move(label));
}

namespace {

// Toeplitz operator (Tf)_j = sum_k kappa(j - k) f_k applied through a
// circulant embedding of length 2n.
DiscretizedOperator toeplitz(const LogGrid& g, double p, const std::function<cd(int)>& kappa, std::string label)
{
    const int n = g.n();
    auto c = std::make_shared<Vec>(Vec::Zero(2 * n));
    for (int d = 0; d < n; ++d)
        (*c)[d] = kappa(d);
    for (int d = 1; d < n; ++d)
        (*c)[2 * n - d] = kappa(-d);
    fft::forward(c->data(), 2 * n);
    return DiscretizedOperator(
        g, p,
        [c, n](const Vec& f) -> Vec {
            Vec buf = Vec::Zero(2 * n);
            buf.head(n) = f;
            fft::forward(buf.data(), 2 * n);
            buf.array() *= c->array();
            fft::inverse(buf.data(), 2 * n);
            return buf.head(n) / double(2 * n);
        },
        std::move(label));
}

cd kernel_s(cd gamma, double s)
{
    // e^{gamma s} / (1 - e^s), arranged to avoid overflow.
    if (s > 0)
        return -std::exp((gamma - 1.0) * s) / (-std::expm1(-s));
    return std::exp(gamma * s) / (-std::expm1(s));
}

cd kernel_r(cd gamma, double s)
{
    if (s > 0)
        return std::exp((gamma - 1.0) * s) / (1.0 + std::exp(-s));
    return std::exp(gamma * s) / (1.0 + std::exp(s));
}

DiscretizedOperator pv_S(cd gamma, double p, const LogGrid& g)
{
    const double dx = g.dx();
    // Punctured trapezoid sum of the log-coordinate kernel. The 1/(y - x) part
    // needs F'(x) dx, added with a fourth-order stencil; the regular part of
    // the kernel at s = 0 is 1/2 - gamma.
    auto kappa = [gamma, dx](int d) -> cd {
        cd v = d == 0 ? (0.5 - gamma) * dx : kernel_s(gamma, d * dx) * dx;
        switch (d) {
        case 2: v += 1.0 / 12.0; break;
        case 1: v += -8.0 / 12.0; break;
        case -1: v += 8.0 / 12.0; break;
        case -2: v += -1.0 / 12.0; break;
        default: break;
        }
        return v / (kPi * kI);
    };
    return toeplitz(g, p, kappa, "S_pv");
}

DiscretizedOperator pv_R(cd gamma, double p, const LogGrid& g)
{
    const double dx = g.dx();
    auto kappa = [gamma, dx](int d) -> cd { return kernel_r(gamma, d * dx) * dx / (kPi * kI); };
    return toeplitz(g, p, kappa, "R_pv");
}

} // namespace

DiscretizedOperator op_S(cd gamma, double p, const LogGrid& g, Route route, int pad)
{
    check_admissible(p, gamma);
    if (route == Route::Mellin)
        return mellin_route(s_multiplier(p, gamma), p, g, pad, "S");
    return pv_S(gamma, p, g);
}

DiscretizedOperator op_R(cd gamma, double p, const LogGrid& g, Route route, int pad)
{
    check_admissible(p, gamma);
    if (route == Route::Mellin)
        return mellin_route(r_multiplier(p, gamma), p, g, pad, "R");
    return pv_R(gamma, p, g);
}

DiscretizedOperator op_P(cd gamma, double p, const LogGrid& g, int sign, Route route, int pad)
{
    auto S = op_S(gamma, p, g, route, pad);
    const double sg = sign >= 0 ? 1.0 : -1.0;
    return DiscretizedOperator(
        g, p, [S, sg](const Vec& f) -> Vec { return 0.5 * (f + sg * S.apply(f)); }, sign >= 0 ? "P+" : "P-");
}

DiscretizedOperator on_extended_grid(const LogGrid& g, int factor,
                                     const std::function<DiscretizedOperator(const LogGrid&)>& build)
{
    const LogGrid ext = g.extended(factor);
    auto op = std::make_shared<const DiscretizedOperator>(build(ext));
    return DiscretizedOperator(
        g, op->p(), [g, ext, op](const Vec& f) { return g.restrict(op->apply(g.embed(f, ext)), ext); },
        op->label() + "@x" + std::to_string(factor));
}

FunctionalOperatorSeries FunctionalOperatorSeries::identity(const SOShift& s)
{
    return FunctionalOperatorSeries(s, {{0, SOFunction::constant(1.0, "1")}});
}

double FunctionalOperatorSeries::wiener_norm(LogRange working, int samples) const
{
    const LogRange gr = guard_range(working);
    double total = 0.0;
    for (const auto& [k, a] : terms) {
        if (auto c = a.constant_value()) {
            total += std::abs(*c);
            continue;
        }
        double sup = 0.0;
        for (int i = 0; i < samples; ++i)
            sup = std::max(sup, std::abs(a.at_log(gr.lo + (gr.hi - gr.lo) * i / double(samples - 1))));
        total += sup;
    }
    return total;
}

int FunctionalOperatorSeries::max_power() const
{
    int m = 0;
    for (const auto& [k, a] : terms)
        m = std::max(m, std::abs(k));
    return m;
}

bool FunctionalOperatorSeries::is_binomial() const
{
    return std::all_of(terms.begin(), terms.end(), [](const auto& kv) { return kv.first == 0 || kv.first == 1; });
}

std::vector<std::string> FunctionalOperatorSeries::so_flags(int r_decades, double tol) const
{
    std::vector<std::string> flags;
    for (const auto& [k, a] : terms) {
        if (a.constant_value())
            continue;
        auto rep = so_check(a, r_decades, tol);
        if (!rep.pass_zero || !rep.pass_infinity)
            flags.push_back(a.label());
    }
    return flags;
}

DiscretizedOperator op_functional(const FunctionalOperatorSeries& series, double p, const LogGrid& g)
{
    int kmax = 0, kmin = 0;
    for (const auto& [k, a] : series.terms) {
        kmax = std::max(kmax, k);
        kmin = std::min(kmin, k);
    }
    std::optional<DiscretizedOperator> U, Ui;
    if (kmax > 0)
        U = op_U(series.shift, p, g);
    if (kmin < 0)
        Ui = op_U_inverse(series.shift, p, g);
    auto coeffs = std::make_shared<std::map<int, Vec>>();
    for (const auto& [k, a] : series.terms)
        (*coeffs)[k] = g.sample([&a](double x) { return a.at_log(x); });
    return DiscretizedOperator(
        g, p,
        [coeffs, U, Ui, kmax, kmin](const Vec& f) -> Vec {
            Vec out = Vec::Zero(f.size());
            if (auto it = coeffs->find(0); it != coeffs->end())
                out += it->second.cwiseProduct(f);
            Vec v = f;
            for (int k = 1; k <= kmax; ++k) {
                v = U->apply(v);
                if (auto it = coeffs->find(k); it != coeffs->end())
                    out += it->second.cwiseProduct(v);
            }
            v = f;
            for (int k = -1; k >= kmin; --k) {
                v = Ui->apply(v);
                if (auto it = coeffs->find(k); it != coeffs->end())
                    out += it->second.cwiseProduct(v);
            }
            return out;
        },
        "A[" + series.shift.label() + "]");
}

namespace {

cd k_plus(cd gamma) { return 2.0 * std::sinh(kPi * kI * gamma) * std::exp(kPi * kI * gamma); }
cd k_minus(cd gamma) { return 2.0 * std::sinh(kPi * kI * gamma) * std::exp(-kPi * kI * gamma); }

DiscretizedOperator build_N(const CompositeData& d, const LogGrid& g, Route route)
{
    auto Ap = op_functional(d.a_plus, d.p, g);
    auto Am = op_functional(d.a_minus, d.p, g);
    return Ap * op_P(d.gamma, d.p, g, +1, route) + Am * op_P(d.gamma, d.p, g, -1, route);
}

} // namespace

DiscretizedOperator op_N(const CompositeData& d, const LogGrid& g, Route route)
{
    check_admissible(d.p, d.gamma);
    if (route == Route::Mellin)
        return build_N(d, g, route).relabeled("N");
    return on_extended_grid(g, 4, [&](const LogGrid& e) { return build_N(d, e, route); }).relabeled("N_pv");
}

std::pair<DiscretizedOperator, DiscretizedOperator> paired_forms(const CompositeData& d, const LogGrid& g,
                                                                 Route route)
{
    check_admissible(d.p, d.gamma);
    const double p = d.p;
    const cd gm = d.gamma;
    if (route == Route::Mellin) {
        auto Ap = op_functional(d.a_plus, p, g);
        auto Am = op_functional(d.a_minus, p, g);
        auto P0p = mellin_route(p_multiplier(p, 0.0, +1), p, g);
        auto P0m = mellin_route(p_multiplier(p, 0.0, -1), p, g);
        // Products of Mellin convolutions are formed on the multiplier side.
        auto PgpP0m = mellin_route(p_multiplier(p, gm, +1) * p_multiplier(p, 0.0, -1), p, g);
        auto PgmP0p = mellin_route(p_multiplier(p, gm, -1) * p_multiplier(p, 0.0, +1), p, g);
        auto base = Ap * P0p + Am * P0m;
        auto diff = Ap - Am;
        auto first = base + (diff * PgpP0m).scaled(k_minus(gm));
        auto second = base + (diff * PgmP0p).scaled(k_plus(gm));
        return {first.relabeled("A+P0+ + C-P0-"), second.relabeled("C+P0+ + A-P0-")};
    }
    auto build = [&](const LogGrid& e, int which) {
        auto Ap = op_functional(d.a_plus, p, e);
        auto Am = op_functional(d.a_minus, p, e);
        auto P0p = op_P(0.0, p, e, +1, Route::PV);
        auto P0m = op_P(0.0, p, e, -1, Route::PV);
        auto Pgp = op_P(gm, p, e, +1, Route::PV);
        auto Pgm = op_P(gm, p, e, -1, Route::PV);
        auto diff = Ap - Am;
        if (which == 0) {
            auto Cm = Am + (diff * Pgp).scaled(k_minus(gm));
            return Ap * P0p + Cm * P0m;
        }
        auto Cp = Ap + (diff * Pgm).scaled(k_plus(gm));
        return Cp * P0p + Am * P0m;
    };
    auto first = on_extended_grid(g, 4, [&](const LogGrid& e) { return build(e, 0); });
    auto second = on_extended_grid(g, 4, [&](const LogGrid& e) { return build(e, 1); });
    return {first.relabeled("A+P0+ + C-P0- (pv)"), second.relabeled("C+P0+ + A-P0- (pv)")};
}

std::vector<Vec> inner_testset(const LogGrid& g, int count)
{
    const double w = g.x_max() - g.x_min();
    const double mid = 0.5 * (g.x_min() + g.x_max());
    const double sigma = w / 60.0;
    std::vector<Vec> out;
    for (int i = 0; i < count; ++i) {
        const double c = count == 1 ? mid : mid + w * (-0.15 + 0.3 * i / double(count - 1));
        out.push_back(g.sample([c, sigma](double x) { return cd(std::exp(-0.5 * (x - c) * (x - c) / (sigma * sigma))); }));
    }
    return out;
}

double relative_error(const Vec& a, const Vec& b, const LogGrid& g, double p)
{
    const double nb = lp_norm(b, g, p);
    return lp_norm(a - b, g, p) / (nb > 0 ? nb : 1.0);
}

PRReport pr_relations_check(cd gamma, cd delta, double p, const LogGrid& g, const std::vector<Vec>& testset,
                            Route route)
{
    check_admissible(p, gamma);
    check_admissible(p, delta);
    const cd c1 = 0.5 * std::sinh(kPi * kI * (gamma - delta));
    const cd c2 = -std::exp(kI * kPi * (delta - gamma)) / 4.0;
    PRReport rep;
    auto record = [&](const DiscretizedOperator& lhs1, const DiscretizedOperator& rhs1,
                      const DiscretizedOperator& lhs2, const DiscretizedOperator& rhs2) {
        for (const auto& f : testset) {
            const double nf = lp_norm(f, g, p);
            rep.difference_relation = std::max(rep.difference_relation, lp_norm(lhs1(f) - rhs1(f), g, p) / nf);
            rep.product_relation = std::max(rep.product_relation, lp_norm(lhs2(f) - rhs2(f), g, p) / nf);
        }
    };
    if (route == Route::Mellin) {
        auto Pdp = mellin_route(p_multiplier(p, delta, +1), p, g);
        auto Pgp = mellin_route(p_multiplier(p, gamma, +1), p, g);
        auto RR = mellin_route(r_multiplier(p, gamma) * r_multiplier(p, delta), p, g);
        auto PmP = mellin_route(p_multiplier(p, gamma, -1) * p_multiplier(p, delta, +1), p, g);
        record(Pdp - Pgp, RR.scaled(c1), PmP, RR.scaled(c2));
        return rep;
    }
    const int factor = 4;
    auto lhs1 = on_extended_grid(g, factor, [&](const LogGrid& e) {
        return op_P(delta, p, e, +1, Route::PV) - op_P(gamma, p, e, +1, Route::PV);
    });
    auto rr = on_extended_grid(g, factor, [&](const LogGrid& e) {
        return op_R(gamma, p, e, Route::PV) * op_R(delta, p, e, Route::PV);
    });
    auto lhs2 = on_extended_grid(g, factor, [&](const LogGrid& e) {
        return op_P(gamma, p, e, -1, Route::PV) * op_P(delta, p, e, +1, Route::PV);
    });
    record(lhs1, rr.scaled(c1), lhs2, rr.scaled(c2));
    return rep;
}

CommutatorReport commutator_probe(const DiscretizedOperator& A, const DiscretizedOperator& B, int k_report)
{
    const LogGrid& g = A.grid();
    const Mat a = A.matrix();
    const Mat b = B.matrix();
    const Mat K = a * b - b * a;
    const auto inner = g.inner_indices(0.5);
    Mat Kw(g.n(), inner.size());
    for (std::size_t c = 0; c < inner.size(); ++c) {
        const int k = inner[c];
        for (int j = 0; j < g.n(); ++j)
            Kw(j, c) = K(j, k) * std::sqrt(g.weight(j) / g.weight(k));
    }
    Eigen::BDCSVD<Mat> svd(Kw);
    const auto& sv = svd.singularValues();
    CommutatorReport rep;
    for (int i = 0; i < std::min<int>(k_report, int(sv.size())); ++i)
        rep.sigma.push_back(sv[i]);
    if (sv.size() == 0 || sv[0] == 0.0) {
        rep.zero = true;
        rep.ratio32 = 0.0;
        return rep;
    }
    const int idx = std::min<int>(31, int(sv.size()) - 1);
    rep.ratio32 = sv[idx] / sv[0];
    return rep;
}

ShiftRReport shift_r_discrepancy(const SOShift& alpha, cd gamma, double p, const LogGrid& g,
                                 const std::vector<Vec>& testset, int ext_factor)
{
    check_admissible(p, gamma);
    const LogGrid ext = g.extended(ext_factor);
    const int off = g.offset_in(ext);
    const int n = g.n();
    const int ne = ext.n();

    auto R = op_R(gamma, p, ext, Route::Mellin);
    auto U = op_U(alpha, p, ext);
    // e^{omega/p} (R f) o alpha, the exact image of the shifted-symbol operator.
    auto structural = build_rows(
        ext, [&](double x) { return alpha.eval_log(x); }, [&](double x) { return std::exp(alpha.omega_log(x) / p); },
        guard_range(ext.range()));

    // Rows are evaluated one at a time, so omega is cached per row and r is
    // tabulated on the frequency grid.
    const Vec r_tab = r_multiplier(p, gamma).values(ext);
    const double dxi = ext.dxi();
    struct RowCache {
        double x = std::numeric_limits<double>::quiet_NaN();
        double omega = 0.0;
    };
    auto cache = std::make_shared<RowCache>();
    PDOSymbol sym([&alpha, &r_tab, dxi, ne, cache](double x, double xi) {
        if (x != cache->x) {
            cache->x = x;
            cache->omega = alpha.omega_log(x);
        }
        long m = std::lround(xi / dxi);
        if (m < 0)
            m += ne;
        return std::polar(1.0, cache->omega * xi) * r_tab[m];
    });

    Mat F(ne, int(testset.size()));
    for (std::size_t c = 0; c < testset.size(); ++c) {
        Vec fe = g.embed(testset[c], ext);
        for (int j = 0; j < ne; ++j)
            fe[j] *= std::exp(ext.x(j) / p);
        F.col(int(c)) = fe;
    }
    Mat B = mellin_pdo_columns(sym, F, ext, off, off + n);

    ShiftRReport rep;
    for (std::size_t c = 0; c < testset.size(); ++c) {
        const Vec& f = testset[c];
        const Vec fe = g.embed(f, ext);
        const Vec Rf = R.apply(fe);
        const Vec A = g.restrict(U.apply(Rf), ext);
        Vec Bv = g.restrict(B.col(int(c)), ext);
        for (int j = 0; j < n; ++j)
            Bv[j] *= std::exp(-g.x(j) / p);
        const Vec S = g.restrict(apply_rows(structural, Rf), ext);
        Vec pred(n);
        for (int j = 0; j < n; ++j)
            pred[j] = (std::pow(1.0 + alpha.psi_log(g.x(j)), 1.0 / p) - 1.0) * S[j];
        const double nf = lp_norm(f, g, p);
        rep.discrepancy = std::max(rep.discrepancy, lp_norm(A - Bv, g, p) / nf);
        rep.structural_residual = std::max(rep.structural_residual, lp_norm(Bv - S, g, p) / nf);
        rep.predicted = std::max(rep.predicted, lp_norm(pred, g, p) / nf);
    }
    return rep;
}

} // namespace sofred
