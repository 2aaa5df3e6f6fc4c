#include "sofred/instance.hpp"

#include "sofred/errors.hpp"
#include "sofred/symbols.hpp"

#include <fstream>
#include <regex>
#include <set>
#include <sstream>

namespace sofred {

using nlohmann::json;

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigurationError("cannot open '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where)
{
    if (!j.is_object())
        throw ConfigurationError(where + " must be an object");
    for (const auto& [k, v] : j.items())
        if (!allowed.count(k))
            throw ConfigurationError("unknown field '" + k + "' in " + where);
}

double number(const json& j, const std::string& what)
{
    if (!j.is_number())
        throw ConfigurationError(what + " must be a number");
    return j.get<double>();
}

cd complex_value(const json& j, const std::string& what)
{
    if (j.is_number())
        return j.get<double>();
    if (j.is_object()) {
        check_keys(j, {"re", "im"}, what);
        return {j.contains("re") ? number(j["re"], what + ".re") : 0.0,
                j.contains("im") ? number(j["im"], what + ".im") : 0.0};
    }
    throw ConfigurationError(what + " must be a number or {re, im}");
}

SOFunction expression(const json& j, const std::string& what)
{
    if (j.is_number())
        return SOFunction::constant(j.get<double>(), what);
    if (!j.is_string())
        throw ConfigurationError(what + " must be an expression string");
    try {
        return SOFunction::parse(j.get<std::string>(), j.get<std::string>());
    } catch (const ParseError& e) {
        throw ParseError(what + ": " + e.reason, e.position);
    }
}

SOShift shift(const json& j, const std::string& what)
{
    check_keys(j, {"family", "expr", "psi", "dilation"}, what);
    const int forms = int(j.contains("family")) + int(j.contains("expr")) + int(j.contains("dilation"));
    if (forms != 1)
        throw ConfigurationError(what + " needs exactly one of family, expr, dilation");
    SOShift s = SOShift::identity();
    if (j.contains("family")) {
        const auto& f = j["family"];
        check_keys(f, {"c0", "c1", "nu"}, what + ".family");
        s = SOShift::family(number(f.value("c0", json(0.0)), "c0"), number(f.value("c1", json(0.0)), "c1"),
                            number(f.value("nu", json(1.0)), "nu"));
    } else if (j.contains("dilation")) {
        s = SOShift::dilation(number(j["dilation"], what + ".dilation"));
    } else {
        if (!j["expr"].is_string() || (j.contains("psi") && !j["psi"].is_string()))
            throw ConfigurationError(what + ".expr and .psi must be strings");
        const std::string om = j["expr"].get<std::string>();
        const std::string ps = j.value("psi", std::string());
        try {
            s = j.contains("psi") ? SOShift::from_expressions(om, std::string_view(ps)) : SOShift::from_expressions(om);
        } catch (const ParseError& e) {
            throw ParseError(what + ": " + e.reason, e.position);
        }
    }
    if (j.contains("psi") && !j.contains("expr"))
        throw ConfigurationError(what + ".psi is only meaningful with expr");
    return s;
}

std::map<int, SOFunction> coefficients(const json& j, const std::string& what)
{
    if (!j.is_array() || j.empty())
        throw ConfigurationError(what + " must be a non-empty array of {k, expr}");
    std::map<int, SOFunction> out;
    for (const auto& term : j) {
        check_keys(term, {"k", "expr"}, what);
        if (!term.contains("k") || !term["k"].is_number_integer() || !term.contains("expr"))
            throw ConfigurationError(what + " entries need an integer k and an expr");
        const int k = term["k"].get<int>();
        if (out.count(k))
            throw ConfigurationError(what + " lists k = " + std::to_string(k) + " twice");
        out.emplace(k, expression(term["expr"], what + "[" + std::to_string(k) + "]"));
    }
    return out;
}

void check_shift(const SOShift& s, const LogGrid& g, const std::string& what)
{
    const auto inv = s.check_invariants(guard_range(g.range()));
    if (!inv.increasing || !(inv.inf_one_plus_psi > 0.0))
        throw AdmissibilityError(what + " is not an orientation-preserving shift on the sampled range");
}

struct Declared {
    std::string key;
    cd value;
};

FiberPoint fiber(const json& j)
{
    check_keys(j, {"endpoint", "ratio", "phase", "rule", "theta0", "step", "label", "declared"}, "fiber");
    if (!j.contains("endpoint") || !j["endpoint"].is_string())
        throw ConfigurationError("fiber needs an endpoint");
    const Endpoint e = parse_endpoint(j["endpoint"].get<std::string>());
    const std::string label = j.value("label", std::string());
    std::optional<FiberPoint> f;
    if (j.contains("rule")) {
        const std::string rule = j["rule"].get<std::string>();
        PhaseMap map;
        if (rule == "log1p_abs")
            map = PhaseMap::Log1pAbs;
        else if (rule == "log1p_square")
            map = PhaseMap::Log1pSquare;
        else
            throw ConfigurationError("unknown fiber rule '" + rule + "'");
        f = FiberPoint::log_phase(e, map, number(j.value("theta0", json(0.0)), "theta0"),
                                  number(j.value("step", json(1.0)), "step"), label);
    } else {
        f = FiberPoint::geometric(e, number(j.value("ratio", json(2.0)), "ratio"),
                                  number(j.value("phase", json(1.0)), "phase"), label);
    }
    return *f;
}

const std::regex kDeclaredKey(R"(^(alpha\.omega|beta\.omega|a_plus\[(-?\d+)\]|a_minus\[(-?\d+)\])$)");

} // namespace

Thresholds parse_thresholds(const json& j, Thresholds t)
{
    check_keys(j,
               {"eps_tail", "symbol_margin", "max_symbol_samples", "sign_threshold", "limit_decades",
                "certificate_tol", "certificate_n", "fiber_tol", "fiber_n_max"},
               "thresholds");
    auto num = [&](const char* k, auto& field) {
        if (j.contains(k))
            field = static_cast<std::remove_reference_t<decltype(field)>>(number(j[k], k));
    };
    num("eps_tail", t.eps_tail);
    num("symbol_margin", t.symbol_margin);
    num("max_symbol_samples", t.max_symbol_samples);
    num("sign_threshold", t.sign_threshold);
    num("limit_decades", t.limit_decades);
    num("certificate_tol", t.certificate_tol);
    num("certificate_n", t.certificate_n);
    num("fiber_tol", t.fiber_tol);
    num("fiber_n_max", t.fiber_n_max);
    if (!(t.eps_tail > 0 && t.symbol_margin > 0 && t.sign_threshold > 0 && t.certificate_tol > 0 && t.fiber_tol > 0))
        throw ConfigurationError("thresholds must be positive");
    if (t.limit_decades < 6)
        throw ConfigurationError("limit_decades must be at least 6");
    if (t.certificate_n < 64 || t.certificate_n > kMaxDenseSize || (t.certificate_n & (t.certificate_n - 1)))
        throw ConfigurationError("certificate_n must be a power of two in [64, 1024]");
    return t;
}

json thresholds_to_json(const Thresholds& t)
{
    json j = json::object();
    j["eps_tail"] = t.eps_tail;
    j["symbol_margin"] = t.symbol_margin;
    j["max_symbol_samples"] = t.max_symbol_samples;
    j["sign_threshold"] = t.sign_threshold;
    j["limit_decades"] = t.limit_decades;
    j["certificate_tol"] = t.certificate_tol;
    j["certificate_n"] = t.certificate_n;
    j["fiber_tol"] = t.fiber_tol;
    j["fiber_n_max"] = t.fiber_n_max;
    return j;
}

ProblemInstance parse_instance(std::string_view text)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("instance is not valid JSON: ") + e.what(), e.byte);
    }
    check_keys(j, {"name", "description", "p", "gamma", "grid", "alpha", "beta", "a_plus", "a_minus", "fibers",
                   "thresholds"},
               "instance");
    for (const char* k : {"p", "alpha", "a_plus", "a_minus"})
        if (!j.contains(k))
            throw ConfigurationError(std::string("instance is missing '") + k + "'");

    const double p = number(j["p"], "p");
    const cd gamma = j.contains("gamma") ? complex_value(j["gamma"], "gamma") : cd(0.0);
    check_admissible(p, gamma);

    LogGrid grid;
    if (j.contains("grid")) {
        const auto& gj = j["grid"];
        check_keys(gj, {"x_min", "x_max", "n"}, "grid");
        grid = LogGrid(number(gj.value("x_min", json(-12.0)), "grid.x_min"),
                       number(gj.value("x_max", json(12.0)), "grid.x_max"), gj.value("n", 4096));
    }

    SOShift alpha = shift(j["alpha"], "alpha");
    SOShift beta = j.contains("beta") ? shift(j["beta"], "beta") : alpha;
    auto ap = coefficients(j["a_plus"], "a_plus");
    auto am = coefficients(j["a_minus"], "a_minus");

    std::vector<FiberPoint> fibers;
    std::vector<std::vector<Declared>> decls;
    if (j.contains("fibers")) {
        if (!j["fibers"].is_array())
            throw ConfigurationError("fibers must be an array");
        for (const auto& fj : j["fibers"]) {
            std::vector<Declared> d;
            fibers.push_back(fiber(fj));
            if (fibers.back().label().empty())
                fibers.back().set_label(to_string(fibers.back().endpoint()) + ":" + std::to_string(fibers.size()));
            if (fj.contains("declared")) {
                if (!fj["declared"].is_object())
                    throw ConfigurationError("fiber.declared must be an object");
                for (const auto& [k, v] : fj["declared"].items()) {
                    if (!std::regex_match(k, kDeclaredKey))
                        throw ConfigurationError("unknown declared key '" + k + "'");
                    d.push_back({k, complex_value(v, "declared " + k)});
                }
            }
            decls.push_back(std::move(d));
        }
    }

    // Declarations attach to the functions they name.
    SOFunction om_a = alpha.omega(), om_b = beta.omega();
    for (std::size_t i = 0; i < fibers.size(); ++i) {
        for (const auto& d : decls[i]) {
            std::smatch m;
            std::regex_match(d.key, m, kDeclaredKey);
            if (d.key == "alpha.omega") {
                om_a.declare(fibers[i], d.value);
            } else if (d.key == "beta.omega") {
                om_b.declare(fibers[i], d.value);
            } else {
                const bool plus = d.key.rfind("a_plus", 0) == 0;
                const int k = std::stoi(plus ? m[2].str() : m[3].str());
                auto& terms = plus ? ap : am;
                auto it = terms.find(k);
                if (it == terms.end())
                    throw ConfigurationError("declared value for missing coefficient '" + d.key + "'");
                it->second.declare(fibers[i], d.value);
            }
        }
    }
    const SOShift alpha_d(om_a, alpha.has_psi() ? std::optional<SOFunction>(alpha.psi()) : std::nullopt, alpha.label());
    const SOShift beta_d(om_b, beta.has_psi() ? std::optional<SOFunction>(beta.psi()) : std::nullopt, beta.label());
    check_shift(alpha_d, grid, "alpha");
    check_shift(beta_d, grid, "beta");

    const bool declared = !fibers.empty();
    if (!declared) {
        for (auto e : {Endpoint::Zero, Endpoint::Infinity})
            for (auto& f : default_fibers(e))
                fibers.push_back(f);
    }

    Thresholds th = j.contains("thresholds") ? parse_thresholds(j["thresholds"]) : Thresholds{};
    return ProblemInstance{j.value("name", std::string()),
                           p,
                           gamma,
                           grid,
                           FunctionalOperatorSeries(alpha_d, std::move(ap)),
                           FunctionalOperatorSeries(beta_d, std::move(am)),
                           std::move(fibers),
                           declared,
                           th};
}

ProblemInstance load_instance(const std::string& path) { return parse_instance(read_file(path)); }

} // namespace sofred
