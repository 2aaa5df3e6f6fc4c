#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sofred {

namespace expr { class Expression; }

using cd = std::complex<double>;

enum class Endpoint { Zero, Infinity };

std::string to_string(Endpoint e);
Endpoint parse_endpoint(std::string_view s);

// How a log-phase sequence maps its phase theta_n to |log t_n|.
//   Log1pAbs:    log(1 + |log t|)   = theta
//   Log1pSquare: log(1 + (log t)^2) = theta
enum class PhaseMap { Log1pAbs, Log1pSquare };

// A point of the fiber over 0 or infinity, given by a test sequence t_n.
// Everything is stored in x = log t.
class FiberPoint {
public:
    // t_n = t0 * ratio^(+-n); the sign is chosen by the endpoint, ratio > 1.
    static FiberPoint geometric(Endpoint e, double ratio, double t0, std::string label = {});
    // theta_n = theta0 + n * step, mapped through `map`.
    static FiberPoint log_phase(Endpoint e, PhaseMap map, double theta0, double step, std::string label = {});

    double log_term(std::int64_t n) const;
    double term(std::int64_t n) const;

    Endpoint endpoint() const { return endpoint_; }
    const std::string& label() const { return label_; }
    bool heuristic() const { return heuristic_; }
    void set_heuristic(bool h) { heuristic_ = h; }
    void set_label(std::string l) { label_ = std::move(l); }

private:
    enum class Rule { Geometric, LogPhase };
    FiberPoint() = default;
    Endpoint endpoint_ = Endpoint::Infinity;
    Rule rule_ = Rule::Geometric;
    PhaseMap map_ = PhaseMap::Log1pAbs;
    double x0_ = 0.0;
    double step_ = 1.0;
    std::string label_;
    bool heuristic_ = false;
};

// Ratios e^(2 pi/m), m in {1,2,3,5}, phases t0 in {1, e^(1/2), e^(4/5)}.
// Flagged heuristic.
std::vector<FiberPoint> default_fibers(Endpoint e);

class SOFunction {
public:
    using LogEvaluator = std::function<cd(double)>;

    SOFunction();
    SOFunction(LogEvaluator f, std::string label);

    static SOFunction constant(cd c, std::string label = {});
    static SOFunction from_expression(const expr::Expression& e, std::string label = {});
    static SOFunction parse(std::string_view text, std::string label = {});

    // Both throw EvaluationDomainError on non-finite values.
    cd operator()(double t) const;
    cd at_log(double x) const;

    void declare(const FiberPoint& xi, cd value);
    std::optional<cd> declared(const FiberPoint& xi) const;
    const std::vector<std::pair<std::string, cd>>& declarations() const { return declared_; }

    const std::string& label() const { return label_; }
    void set_label(std::string l) { label_ = std::move(l); }
    std::optional<cd> constant_value() const { return constant_; }

    SOFunction operator*(const SOFunction& g) const;
    SOFunction operator+(const SOFunction& g) const;
    SOFunction operator-(const SOFunction& g) const;
    SOFunction scaled(cd c) const;
    SOFunction conjugate() const;
    // x -> f(x + shift): the function t -> f(c t) with c = e^shift.
    SOFunction dilated(double log_c) const;

private:
    LogEvaluator eval_;
    std::string label_;
    std::optional<cd> constant_;
    std::vector<std::pair<std::string, cd>> declared_;
};

// Diameter of a finite planar point set (max pairwise distance).
double diameter(const std::vector<cd>& values);

// Log-uniform sample positions (in x) over [r, 2r]; shared by the samplers.
std::vector<double> dyadic_samples(double r, int samples);

double oscillation_modulus(const SOFunction& f, double r, int samples = 256);

struct ScaleModulus {
    double r;
    double modulus;
};

struct OscillationReport {
    std::vector<ScaleModulus> toward_zero;
    std::vector<ScaleModulus> toward_infinity;
    bool pass_zero = false;
    bool pass_infinity = false;
    double tol = 0.0;
};

OscillationReport so_check(const SOFunction& f, int r_decades, double tol, int samples = 256);

struct FiberEvaluation {
    cd value;
    std::int64_t n_used = 0;
    double radius = 0.0;
    std::optional<cd> declared;
};

inline constexpr double kFiberTol = 1e-6;
inline constexpr std::int64_t kFiberNMax = std::int64_t(1) << 26;

FiberEvaluation fiber_value(const SOFunction& f, const FiberPoint& xi, double tol = kFiberTol,
                            std::int64_t n_max = kFiberNMax);

// Evaluates several functions along one test sequence, stopping at the first
// window where all of them have stabilized. Partial limits of different
// functions stay attached to the same fiber this way.
std::vector<FiberEvaluation> fiber_values(const std::vector<SOFunction>& fs, const FiberPoint& xi,
                                          double tol = kFiberTol, std::int64_t n_max = kFiberNMax);

} // namespace sofred
