#include "sofred/advisor.hpp"

#include "sofred/checks.hpp"
#include "sofred/errors.hpp"

#include <chrono>
#include <ctime>
#include <future>
#include <iomanip>
#include <set>
#include <sstream>

namespace sofred {

using ojson = nlohmann::ordered_json;

namespace {

std::set<int> support(const FunctionalOperatorSeries& s)
{
    std::set<int> out;
    for (const auto& [k, a] : s.terms) {
        auto c = a.constant_value();
        if (!c || *c != cd(0.0))
            out.insert(k);
    }
    return out;
}

bool subset(const std::set<int>& s, std::initializer_list<int> of)
{
    const std::set<int> o(of);
    return std::all_of(s.begin(), s.end(), [&](int k) { return o.count(k) > 0; });
}

SOFunction term_or_zero(const FunctionalOperatorSeries& s, int k)
{
    auto it = s.terms.find(k);
    return it == s.terms.end() ? SOFunction::constant(0.0, "0") : it->second;
}

LogGrid certificate_grid(const ProblemInstance& inst)
{
    return LogGrid(inst.grid.x_min(), inst.grid.x_max(), inst.thresholds.certificate_n);
}

void set_sides(ConditionIEntry& e, BinomialVerdict v)
{
    e.left = v == BinomialVerdict::InvertibleI1 || v == BinomialVerdict::InvertibleI2 ||
             v == BinomialVerdict::StrictlyLeftLI;
    e.right = v == BinomialVerdict::InvertibleI1 || v == BinomialVerdict::InvertibleI2 ||
              v == BinomialVerdict::StrictlyRightRI;
}

ConditionIEntry condition_i_entry(const std::string& name, const FunctionalOperatorSeries& A,
                                  const ProblemInstance& inst)
{
    ConditionIEntry e;
    e.name = name;
    const Thresholds& th = inst.thresholds;
    const auto sup = support(A);
    try {
        if (sup.empty()) {
            e.method = "multiplication";
            e.notes.push_back("operator is zero");
            return e;
        }
        if (subset(sup, {0})) {
            // a I: invertible exactly when inf |a| > 0. Stored as a binomial with b = 0.
            e.method = "multiplication";
            BinomialClassification c;
            const SOFunction a = term_or_zero(A, 0), zero = SOFunction::constant(0.0);
            c.sign_threshold = th.sign_threshold;
            c.at_minus = limit_bounds(a, zero, Endpoint::Zero, th.limit_decades);
            c.at_plus = limit_bounds(a, zero, Endpoint::Infinity, th.limit_decades);
            c.inf_abs_a = sampled_inf_abs(a, th.limit_decades);
            c.inf_abs_b = 0.0;
            c.verdict = c.inf_abs_a > th.sign_threshold ? BinomialVerdict::InvertibleI1 : BinomialVerdict::Unclassified;
            e.left = e.right = c.verdict == BinomialVerdict::InvertibleI1;
            e.classification = c;
            return e;
        }
        if (subset(sup, {0, 1}) || subset(sup, {-1, 0})) {
            e.method = "binomial_classifier";
            e.inverse_shift = !subset(sup, {0, 1});
            const SOShift alpha = e.inverse_shift ? A.shift.inverse_shift() : A.shift;
            const SOFunction a = term_or_zero(A, 0);
            const SOFunction b = term_or_zero(A, e.inverse_shift ? -1 : 1).scaled(-1.0);
            auto c = classify_binomial(alpha, a, b, th.limit_decades, th.sign_threshold);
            set_sides(e, c.verdict);
            e.classification = c;
            return e;
        }
        e.method = "numerical certificate";
        const LogGrid g = certificate_grid(inst);
        for (Side s : {Side::Left, Side::Right}) {
            try {
                const auto r = one_sided_inverse(A, s, inst.p, g, th.certificate_tol);
                (s == Side::Left ? e.left_residual : e.right_residual) =
                    s == Side::Left ? r.left_residual : r.right_residual;
                (s == Side::Left ? e.left : e.right) = r.certified;
            } catch (const NoCertificateError& err) {
                e.notes.push_back(to_string(s) + ": " + err.what());
            }
        }
        if (!e.left && !e.right)
            e.inconclusive = true;
    } catch (const Error& err) {
        e.inconclusive = true;
        e.left = e.right = false;
        e.notes.push_back(err.what());
    }
    return e;
}

ProbeEntry probe_entry(const std::string& name, const FunctionalOperatorSeries& A, const ProblemInstance& inst)
{
    ProbeEntry pr;
    pr.name = name;
    const LogGrid g = certificate_grid(inst);
    for (Side s : {Side::Left, Side::Right}) {
        try {
            const auto r = one_sided_inverse(A, s, inst.p, g, inst.thresholds.certificate_tol);
            if (s == Side::Left)
                pr.left_residual = r.left_residual;
            else
                pr.right_residual = r.right_residual;
            std::ostringstream os;
            os << to_string(s) << " inverse: left residual " << r.left_residual << ", right residual "
               << r.right_residual << ", condition " << r.condition;
            pr.notes.push_back(os.str());
        } catch (const Error& err) {
            pr.notes.push_back(to_string(s) + ": " + err.what());
        }
    }
    return pr;
}

} // namespace

FredholmVerdict run_advisor(const ProblemInstance& inst)
{
    FredholmVerdict v;
    const Thresholds& th = inst.thresholds;

    // The two operators and the fibers are independent; results are joined in a fixed order.
    auto fut_plus = std::async(std::launch::async, [&] { return condition_i_entry("A+", inst.a_plus, inst); });
    auto fut_minus = std::async(std::launch::async, [&] { return condition_i_entry("A-", inst.a_minus, inst); });

    std::vector<std::future<FiberData>> fut_fibers;
    for (const auto& xi : inst.fibers)
        fut_fibers.push_back(std::async(std::launch::async, [&inst, &th, xi] {
            return build_fiber_data(xi, inst.a_plus.terms, inst.a_minus.terms, inst.alpha(), inst.beta(), th.fiber_tol,
                                    th.fiber_n_max);
        }));

    SymbolContext ctx(inst.p, inst.gamma);
    bool fibers_ok = true;
    for (std::size_t i = 0; i < fut_fibers.size(); ++i) {
        try {
            ctx.fibers.push_back(fut_fibers[i].get());
            if (!ctx.fibers.back().notes.empty())
                v.fiber_notes.emplace_back(inst.fibers[i].label(), ctx.fibers.back().notes);
        } catch (const Error& err) {
            fibers_ok = false;
            v.condition_ii_notes.push_back("fiber " + inst.fibers[i].label() + ": " + err.what());
        }
    }
    if (fibers_ok) {
        try {
            std::vector<std::future<ConditionIIFiber>> fut;
            for (const auto& fd : ctx.fibers)
                fut.push_back(std::async(std::launch::async, [&ctx, &th, &fd] {
                    return condition_ii_fiber(ctx, fd, th.eps_tail, th.symbol_margin, th.max_symbol_samples);
                }));
            ConditionIIReport rep;
            rep.eps_tail = th.eps_tail;
            rep.margin = th.symbol_margin;
            rep.all_pass = true;
            bool zero = false, inf = false;
            for (auto& f : fut) {
                rep.fibers.push_back(f.get());
                rep.all_pass = rep.all_pass && rep.fibers.back().pass;
                zero = zero || rep.fibers.back().endpoint == Endpoint::Zero;
                inf = inf || rep.fibers.back().endpoint == Endpoint::Infinity;
            }
            if (!zero || !inf)
                throw ContextError("condition (ii) needs at least one fiber over each endpoint");
            v.condition_ii = rep;
            v.condition_ii_pass = rep.all_pass;
        } catch (const Error& err) {
            v.condition_ii_notes.push_back(err.what());
        }
    }

    v.operators.push_back(fut_plus.get());
    v.operators.push_back(fut_minus.get());

    const bool left = std::all_of(v.operators.begin(), v.operators.end(), [](const auto& e) { return e.left; });
    const bool right = std::all_of(v.operators.begin(), v.operators.end(), [](const auto& e) { return e.right; });
    const bool inconclusive =
        std::any_of(v.operators.begin(), v.operators.end(), [](const auto& e) { return e.inconclusive; });
    if (left && right)
        v.condition_i = "both";
    else if (left)
        v.condition_i = "left_certified";
    else if (right)
        v.condition_i = "right_certified";
    else
        v.condition_i = inconclusive ? "inconclusive" : "none";

    if (v.condition_ii_pass && left && right)
        v.claim = "fredholm";
    else if (v.condition_ii_pass && left)
        v.claim = "left_fredholm";
    else if (v.condition_ii_pass && right)
        v.claim = "right_fredholm";
    else
        v.claim = "no_claim";

    std::ostringstream detail;
    if (v.claim == "no_claim") {
        detail << "sufficient conditions not established:";
        if (!left && !right)
            detail << " condition (i) " << v.condition_i << ";";
        if (!v.condition_ii_pass)
            detail << " condition (ii) " << (v.condition_ii ? "fails on a fiber" : "not evaluated") << ";";
    } else {
        detail << "condition (i) " << v.condition_i << " and condition (ii) on all fibers";
    }
    for (const auto& e : v.operators)
        if (e.method == "numerical certificate")
            detail << " [" << e.name << ": numerical certificate]";
    if (!inst.fibers_declared)
        detail << " [default fiber family, heuristic]";
    v.claim_detail = detail.str();

    // Corroboration only; never feeds the claim.
    for (const auto& [name, A] : {std::pair<std::string, const FunctionalOperatorSeries*>{"A+", &inst.a_plus},
                                  std::pair<std::string, const FunctionalOperatorSeries*>{"A-", &inst.a_minus}}) {
        const auto& entry = name == "A+" ? v.operators[0] : v.operators[1];
        if (entry.method == "binomial_classifier")
            v.probes.push_back(probe_entry(name, *A, inst));
    }
    return v;
}

namespace {

ojson cjson(cd z) { return ojson{{"re", z.real()}, {"im", z.imag()}}; }

ojson classification_json(const BinomialClassification& c)
{
    ojson j;
    j["verdict"] = to_string(c.verdict);
    j["repelling_point"] = to_string(c.tau_minus);
    j["attracting_point"] = to_string(c.tau_plus);
    j["margins"] = {{"L_lower_repelling", c.lower_minus()},
                    {"L_upper_repelling", c.upper_minus()},
                    {"L_lower_attracting", c.lower_plus()},
                    {"L_upper_attracting", c.upper_plus()}};
    j["limits_stabilized"] = c.at_minus.stabilized && c.at_plus.stabilized;
    j["inf_abs_a"] = c.inf_abs_a;
    j["inf_abs_b"] = c.inf_abs_b;
    j["sign_threshold"] = c.sign_threshold;
    j["zero_scan"] = {{"k_range", c.scan.k_range},
                      {"points", c.scan.points},
                      {"zero_threshold", c.scan.zero_threshold},
                      {"orbits_with_zeros", c.scan.orbits_with_zeros},
                      {"li_holds", c.scan.li_holds},
                      {"ri_holds", c.scan.ri_holds}};
    return j;
}

ojson coeffs_json(const std::map<int, cd>& m)
{
    ojson j = ojson::object();
    for (const auto& [k, v] : m)
        j[std::to_string(k)] = cjson(v);
    return j;
}

std::string timestamp_now()
{
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

} // namespace

ojson verdict_to_json(const FredholmVerdict& v, const ProblemInstance& inst, bool timestamp)
{
    ojson j;
    j["schema"] = "sofred-verdict/1";
    ojson ij;
    ij["name"] = inst.name;
    ij["p"] = inst.p;
    ij["gamma"] = cjson(inst.gamma);
    ij["grid"] = {{"x_min", inst.grid.x_min()}, {"x_max", inst.grid.x_max()}, {"n", inst.grid.n()}};
    ij["alpha"] = inst.alpha().label();
    ij["beta"] = inst.beta().label();
    ij["fibers"] = inst.fibers_declared ? "declared" : "default_heuristic";
    j["instance"] = ij;
    j["thresholds"] = thresholds_to_json(inst.thresholds);

    ojson ci;
    ci["summary"] = v.condition_i;
    ci["operators"] = ojson::array();
    for (const auto& e : v.operators) {
        ojson o;
        o["name"] = e.name;
        o["method"] = e.method;
        o["left"] = e.left;
        o["right"] = e.right;
        o["inconclusive"] = e.inconclusive;
        o["inverse_shift"] = e.inverse_shift;
        if (e.classification)
            o["classification"] = classification_json(*e.classification);
        if (e.left_residual)
            o["left_residual"] = *e.left_residual;
        if (e.right_residual)
            o["right_residual"] = *e.right_residual;
        o["notes"] = e.notes;
        ci["operators"].push_back(o);
    }
    j["condition_i"] = ci;

    ojson cii;
    cii["pass"] = v.condition_ii_pass;
    cii["evaluated"] = v.condition_ii.has_value();
    if (v.condition_ii) {
        cii["eps_tail"] = v.condition_ii->eps_tail;
        cii["margin"] = v.condition_ii->margin;
        cii["fibers"] = ojson::array();
        for (const auto& f : v.condition_ii->fibers) {
            ojson fj;
            fj["label"] = f.label;
            fj["endpoint"] = to_string(f.endpoint);
            fj["heuristic"] = f.heuristic;
            fj["x0"] = f.x0;
            fj["quasi_period"] = f.quasi_period;
            fj["window"] = {f.window_lo, f.window_hi};
            fj["samples"] = f.samples;
            fj["dense_min"] = f.dense_min;
            fj["tail_plus_inf"] = f.tail_plus_inf;
            fj["tail_minus_inf"] = f.tail_minus_inf;
            fj["inf_estimate"] = f.inf_estimate;
            fj["argmin"] = f.argmin;
            fj["degenerate"] = f.degenerate;
            fj["pass"] = f.pass;
            fj["near_zeros"] = f.near_zeros;
            cii["fibers"].push_back(fj);
        }
    }
    cii["notes"] = v.condition_ii_notes;
    ojson fv = ojson::object();
    for (const auto& [label, notes] : v.fiber_notes)
        fv[label] = notes;
    cii["fiber_notes"] = fv;
    j["condition_ii"] = cii;

    j["claim"] = v.claim;
    j["claim_detail"] = v.claim_detail;

    ojson probes = ojson::array();
    for (const auto& p : v.probes) {
        ojson pj;
        pj["name"] = p.name;
        pj["left_residual"] = p.left_residual ? ojson(*p.left_residual) : ojson(nullptr);
        pj["right_residual"] = p.right_residual ? ojson(*p.right_residual) : ojson(nullptr);
        pj["notes"] = p.notes;
        probes.push_back(pj);
    }
    j["probes"] = probes;

    const std::string re = rederive_claim(j);
    j["soundness"] = {{"rederived_claim", re}, {"consistent", re == v.claim}};
    if (timestamp)
        j["generated_at"] = timestamp_now();
    return j;
}

std::string rederive_claim(const ojson& j)
{
    // Works from the serialized evidence only; the rules are restated here on purpose.
    const ojson& th = j.at("thresholds");
    bool left = true, right = true;
    for (const auto& o : j.at("condition_i").at("operators")) {
        bool l = false, r = false;
        const std::string method = o.at("method");
        if (o.contains("classification")) {
            const auto& c = o.at("classification");
            const auto& m = c.at("margins");
            const double t = c.at("sign_threshold");
            const double lm = m.at("L_lower_repelling"), um = m.at("L_upper_repelling");
            const double lp = m.at("L_lower_attracting"), up = m.at("L_upper_attracting");
            const double ia = c.at("inf_abs_a"), ib = c.at("inf_abs_b");
            if (method == "multiplication") {
                l = r = ia > t;
            } else if (c.at("limits_stabilized").get<bool>()) {
                const bool i1 = lm > t && lp > t && ia > t;
                const bool i2 = um < -t && up < -t && ib > t;
                const bool li = um < -t && lp > t && c.at("zero_scan").at("li_holds").get<bool>();
                const bool ri = up < -t && lm > t && c.at("zero_scan").at("ri_holds").get<bool>();
                l = i1 || i2 || li;
                r = i1 || i2 || ri;
            }
        } else if (method == "numerical certificate") {
            const double tol = th.at("certificate_tol");
            l = o.contains("left_residual") && o.at("left_residual").get<double>() < tol;
            r = o.contains("right_residual") && o.at("right_residual").get<double>() < tol;
        }
        left = left && l;
        right = right && r;
    }
    const auto& cii = j.at("condition_ii");
    bool ii = cii.at("evaluated").get<bool>() && cii.at("notes").empty() && !cii.at("fibers").empty();
    if (ii) {
        const double margin = cii.at("margin");
        for (const auto& f : cii.at("fibers")) {
            const double est = std::max(0.0, std::min({f.at("dense_min").get<double>(), f.at("tail_plus_inf").get<double>(),
                                                       f.at("tail_minus_inf").get<double>()}));
            ii = ii && est > margin;
        }
    }
    if (ii && left && right)
        return "fredholm";
    if (ii && left)
        return "left_fredholm";
    if (ii && right)
        return "right_fredholm";
    return "no_claim";
}

namespace {

ojson checks_json(const std::vector<Check>& cs)
{
    ojson arr = ojson::array();
    for (const auto& c : cs)
        arr.push_back({{"name", c.name},
                       {"measured", c.measured},
                       {"threshold", c.threshold},
                       {"relation", c.upper ? "<" : ">"},
                       {"pass", c.pass}});
    return arr;
}

} // namespace

ojson run_suite(const std::string& name, const ProblemInstance* inst)
{
    ojson j;
    j["suite"] = name;
    std::vector<Check> checks;
    if (name == "identities") {
        checks = identities_checks(inst ? inst->grid : LogGrid());
    } else if (name == "probes") {
        checks = probe_checks();
        if (inst) {
            ojson ip = ojson::array();
            for (const auto& [label, A] : {std::pair<std::string, const FunctionalOperatorSeries*>{"A+", &inst->a_plus},
                                           std::pair<std::string, const FunctionalOperatorSeries*>{"A-", &inst->a_minus}}) {
                const auto pe = probe_entry(label, *A, *inst);
                ip.push_back({{"name", pe.name},
                              {"left_residual", pe.left_residual ? ojson(*pe.left_residual) : ojson(nullptr)},
                              {"right_residual", pe.right_residual ? ojson(*pe.right_residual) : ojson(nullptr)},
                              {"notes", pe.notes}});
            }
            j["instance_probes"] = ip;
        }
    } else if (name == "symbols") {
        if (!inst)
            throw ConfigurationError("the symbols suite needs an instance");
        const Thresholds& th = inst->thresholds;
        SymbolContext ctx(inst->p, inst->gamma);
        for (const auto& xi : inst->fibers)
            ctx.fibers.push_back(build_fiber_data(xi, inst->a_plus.terms, inst->a_minus.terms, inst->alpha(),
                                                  inst->beta(), th.fiber_tol, th.fiber_n_max));
        ojson fibers = ojson::array();
        for (const auto& fd : ctx.fibers) {
            const auto r = condition_ii_fiber(ctx, fd, th.eps_tail, th.symbol_margin, th.max_symbol_samples);
            checks.push_back(make_check("inf |n| on " + r.label, r.inf_estimate, th.symbol_margin, false));
            fibers.push_back({{"label", r.label},
                              {"omega", fd.omega},
                              {"eta", fd.eta},
                              {"a_plus", coeffs_json(fd.a)},
                              {"a_minus", coeffs_json(fd.b)},
                              {"dense_min", r.dense_min},
                              {"argmin", r.argmin},
                              {"near_zeros", r.near_zeros}});
        }
        j["fibers"] = fibers;
    } else {
        throw ConfigurationError("unknown suite '" + name + "' (identities, probes, symbols)");
    }
    j["checks"] = checks_json(checks);
    j["pass"] = std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
    return j;
}

void write_symbol_csv(const ProblemInstance& inst, const std::string& fiber_label, std::ostream& out)
{
    const auto it = std::find_if(inst.fibers.begin(), inst.fibers.end(),
                                 [&](const FiberPoint& f) { return f.label() == fiber_label; });
    if (it == inst.fibers.end())
        throw ContextError("no fiber labelled '" + fiber_label + "'");
    const Thresholds& th = inst.thresholds;
    SymbolContext ctx(inst.p, inst.gamma);
    const FiberData fd = build_fiber_data(*it, inst.a_plus.terms, inst.a_minus.terms, inst.alpha(), inst.beta(),
                                          th.fiber_tol, th.fiber_n_max);
    const auto r = condition_ii_fiber(ctx, fd, th.eps_tail, th.symbol_margin, th.max_symbol_samples);
    out << "x,re_n,im_n,abs_n\n";
    out << std::setprecision(17);
    const long N = r.samples;
    for (long i = 0; i < N; ++i) {
        const double x = r.window_lo + (r.window_hi - r.window_lo) * double(i) / double(N - 1);
        const cd n = eval_n(ctx, fd, x);
        out << x << ',' << n.real() << ',' << n.imag() << ',' << std::abs(n) << '\n';
    }
}

} // namespace sofred
