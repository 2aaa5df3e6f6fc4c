#include "sofred/checks.hpp"

#include "sofred/errors.hpp"
#include "sofred/symbols.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace sofred {

namespace {
constexpr double kPi = std::numbers::pi;
const cd kI(0.0, 1.0);
} // namespace

Check make_check(std::string name, double measured, double threshold, bool upper)
{
    Check c{std::move(name), measured, threshold, upper, false};
    c.pass = std::isfinite(measured) && (upper ? measured < threshold : measured > threshold);
    return c;
}

std::vector<AdmissibleSample> random_admissible(int count, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> up(1.25, 5.0), uc(0.05, 0.95), ui(-1.0, 1.0), ux(-5.0, 5.0);
    std::vector<AdmissibleSample> out;
    out.reserve(count);
    for (int i = 0; i < count; ++i) {
        const double p = up(rng);
        const double c = uc(rng);
        const double im = ui(rng);
        out.push_back({p, cd(c - 1.0 / p, im), ux(rng)});
    }
    return out;
}

std::pair<double, double> multiplier_identity_errors(int count, std::uint64_t seed)
{
    double e1 = 0.0, e2 = 0.0;
    for (const auto& s : random_admissible(count, seed)) {
        const SRP v = eval_s_r_p(s.p, s.gamma, s.x);
        e1 = std::max(e1, std::abs(v.s * v.s - v.r * v.r - 1.0));
        e2 = std::max(e2, std::abs(v.p_plus + v.p_minus - 1.0));
    }
    return {e1, e2};
}

std::pair<double, double> scalar_pr_errors(int count, std::uint64_t seed)
{
    // delta shares p with gamma; its own real part is drawn in the admissible strip.
    const auto a = random_admissible(count, seed);
    const auto b = random_admissible(count, seed ^ 0x9e3779b97f4a7c15ULL);
    double e1 = 0.0, e2 = 0.0;
    for (int i = 0; i < count; ++i) {
        const double p = a[i].p;
        const cd g = a[i].gamma;
        const cd d(b[i].gamma.real() + 1.0 / b[i].p - 1.0 / p, b[i].gamma.imag());
        const double x = a[i].x;
        const SRP sg = eval_s_r_p(p, g, x);
        const SRP sd = eval_s_r_p(p, d, x);
        const cd rr = sg.r * sd.r;
        e1 = std::max(e1, std::abs(sd.p_plus - sg.p_plus - 0.5 * std::sinh(kPi * kI * (g - d)) * rr));
        e2 = std::max(e2, std::abs(sg.p_minus * sd.p_plus + std::exp(kI * kPi * (d - g)) / 4.0 * rr));
    }
    return {e1, e2};
}

RouteComparison route_independence(double p, cd gamma, const LogGrid& g)
{
    RouteComparison rc;
    const auto ts = inner_testset(g);
    const auto Sm = op_S(gamma, p, g, Route::Mellin), Sp = op_S(gamma, p, g, Route::PV);
    const auto Rm = op_R(gamma, p, g, Route::Mellin), Rp = op_R(gamma, p, g, Route::PV);
    for (const auto& f : ts) {
        rc.s_error = std::max(rc.s_error, relative_error(Sp(f), Sm(f), g, p));
        rc.r_error = std::max(rc.r_error, relative_error(Rp(f), Rm(f), g, p));
    }
    return rc;
}

double u_isometry_defect(const SOShift& alpha, double p, const LogGrid& g)
{
    const auto U = op_U(alpha, p, g);
    double e = 0.0;
    for (const auto& f : inner_testset(g)) {
        const double nf = lp_norm(f, g, p);
        e = std::max(e, std::abs(lp_norm(U(f), g, p) - nf) / nf);
    }
    return e;
}

IterateExponentReport iterate_exponent_linearity(const SOShift& alpha, const std::vector<FiberPoint>& fibers,
                                                 int k_max)
{
    IterateExponentReport rep;
    const SOShift a = alpha;
    for (const auto& xi : fibers) {
        std::vector<SOFunction> fs{alpha.omega()};
        for (int k = -k_max; k <= k_max; ++k)
            fs.emplace_back([a, k](double x) { return cd(a.exponent_of_iterate_log(k, x), 0.0); },
                            "omega_" + std::to_string(k));
        const auto ev = fiber_values(fs, xi);
        const double w = ev[0].value.real();
        for (int k = -k_max; k <= k_max; ++k) {
            const double e = std::abs(ev[std::size_t(k + k_max + 1)].value.real() - k * w);
            if (e >= rep.max_error) {
                rep.max_error = e;
                rep.worst_fiber = xi.label();
                rep.worst_k = k;
            }
        }
    }
    return rep;
}

std::vector<Check> identities_checks(const LogGrid& g)
{
    std::vector<Check> out;
    const auto [e_sr, e_pp] = multiplier_identity_errors(1000, 1);
    out.push_back(make_check("s^2 - r^2 = 1", e_sr, 1e-12));
    out.push_back(make_check("p+ + p- = 1", e_pp, 1e-12));
    const auto [e_d, e_p] = scalar_pr_errors(1000, 2);
    out.push_back(make_check("scalar PR difference relation", e_d, 1e-12));
    out.push_back(make_check("scalar PR product relation", e_p, 1e-12));

    for (auto [p, gm] : std::vector<std::pair<double, cd>>{{2.0, 0.0}, {2.0, cd(0.1, 0.2)}, {3.0, -0.1}}) {
        const auto rc = route_independence(p, gm, g);
        std::ostringstream os;
        os << "(p=" << p << ", gamma=" << gm.real() << (gm.imag() < 0 ? "" : "+") << gm.imag() << "i)";
        out.push_back(make_check("route independence S " + os.str(), rc.s_error, 1e-3));
        out.push_back(make_check("route independence R " + os.str(), rc.r_error, 1e-3));
    }

    const auto ts = inner_testset(g);
    for (auto [gm, dl] : std::vector<std::pair<cd, cd>>{{0.1, 0.1}, {cd(0.1, 0.2), cd(0.1, 0.2)}, {0.1, cd(0.0, 0.3)}}) {
        std::ostringstream os;
        os << "(gamma=" << gm << ", delta=" << dl << ")";
        out.push_back(make_check("operator PR mellin " + os.str(), pr_relations_check(gm, dl, 2.0, g, ts, Route::Mellin).max(), 1e-10));
        out.push_back(make_check("operator PR pv " + os.str(), pr_relations_check(gm, dl, 2.0, g, ts, Route::PV).max(), 1e-3));
    }

    {
        const auto Pp = op_P(cd(0.1, 0.2), 2.0, g, +1, Route::Mellin);
        const auto Pm = op_P(cd(0.1, 0.2), 2.0, g, -1, Route::Mellin);
        double e = 0.0;
        for (const auto& f : ts)
            e = std::max(e, relative_error(Pp(f) + Pm(f), f, g, 2.0));
        out.push_back(make_check("P+ + P- = I", e, 1e-15));
        // P+ is not idempotent: (p+)^2 - p+ = r^2 / 4.
        const cd gm(0.1, 0.2);
        const auto lhs = mellin_route(p_multiplier(2.0, gm, +1) * p_multiplier(2.0, gm, +1) - p_multiplier(2.0, gm, +1), 2.0, g);
        const auto rhs = mellin_route((r_multiplier(2.0, gm) * r_multiplier(2.0, gm)).scaled(0.25), 2.0, g);
        double e2 = 0.0;
        for (const auto& f : ts)
            e2 = std::max(e2, lp_norm(lhs(f) - rhs(f), g, 2.0) / lp_norm(f, g, 2.0));
        out.push_back(make_check("P+P+ - P+ = R^2/4", e2, 1e-10));
    }

    for (double p : {2.0, 3.0}) {
        out.push_back(make_check("U isometry family(0.3,0.2,1) p=" + std::to_string(int(p)),
                                 u_isometry_defect(SOShift::family(0.3, 0.2, 1.0), p, g), 1e-4));
        out.push_back(make_check("U isometry 2t p=" + std::to_string(int(p)),
                                 u_isometry_defect(SOShift::dilation(2.0), p, g), 1e-4));
    }
    return out;
}

std::vector<Check> probe_checks()
{
    std::vector<Check> out;
    const LogGrid g512(-12.0, 12.0, 512);
    const LogGrid g;
    const auto fam = SOShift::family(0.3, 0.2, 1.0);
    {
        FunctionalOperatorSeries c(fam, {{0, fam.omega()}});
        const auto A = (op_functional(c, 2.0, g512) * op_R(0.0, 2.0, g512, Route::Mellin)).materialized();
        const auto cr = commutator_probe(A, op_U(fam, 2.0, g512).materialized());
        out.push_back(make_check("commutator [cR0, U] sigma32/sigma1", cr.ratio32, 1e-2));
    }
    const auto ts = inner_testset(g);
    const auto sr = shift_r_discrepancy(fam, 0.0, 2.0, g, ts);
    out.push_back(make_check("U R vs Op(e^{i omega x} r) family(0.3,0.2,1)", sr.discrepancy, 1e-2));
    out.push_back(make_check("U R vs Op(e^{i omega x} r) structural part", sr.structural_residual, 1e-6));
    const auto sr2 = shift_r_discrepancy(SOShift::dilation(2.0), 0.0, 2.0, g, ts);
    out.push_back(make_check("U R vs Op(e^{i omega x} r) 2t", sr2.discrepancy, 1e-2));

    {
        const PDOSymbol a = PDOSymbol::of_t([](double x) { return cd(2.0 + std::tanh(x), 0.0); });
        const PDOSymbol b = PDOSymbol::of_xi(r_multiplier(2.0, 0.0));
        std::vector<Vec> tsd;
        for (const auto& f : ts)
            tsd.push_back(f);
        out.push_back(make_check("Op(a(t)) Op(b(xi)) = Op(a b)", pdo_composition_defect(a, b, tsd, g).max_relative, 1e-10));
    }

    {
        const auto d2 = SOShift::dilation(2.0);
        FunctionalOperatorSeries A(d2, {{0, SOFunction::constant(1.0)}, {1, SOFunction::parse("2/(1+t)").scaled(-1.0)}});
        const auto inv = one_sided_inverse(A, Side::Left, 2.0, g512, 1e-2);
        out.push_back(make_check("LI left inverse, left residual", inv.left_residual, 1e-2));
        out.push_back(make_check("LI left inverse, right residual", inv.right_residual, 0.5, false));
        FunctionalOperatorSeries B(d2, {{0, SOFunction::constant(2.0)}, {1, SOFunction::constant(-1.0)}});
        for (Side s : {Side::Left, Side::Right}) {
            const auto r = one_sided_inverse(B, s, 2.0, g512, 1e-3);
            out.push_back(make_check("I1 " + to_string(s) + " inverse, left residual", r.left_residual, 1e-3));
            out.push_back(make_check("I1 " + to_string(s) + " inverse, right residual", r.right_residual, 1e-3));
        }
        const auto nr = neumann_inverse(d2, SOFunction::constant(2.0), SOFunction::constant(1.0), 20, 2.0, g);
        // bound / residual inside [1/2, 2], boundary included up to 1e-4 relative.
        const double ratio = nr.bound / nr.residual;
        out.push_back(make_check("Neumann K=20 max(bound/residual, residual/bound)", std::max(ratio, 1.0 / ratio),
                                 2.0 * (1.0 + 1e-4)));
    }
    return out;
}

} // namespace sofred
