#pragma once

#include "sofred/shifts.hpp"
#include "sofred/so_core.hpp"

#include <map>
#include <string>
#include <vector>

namespace sofred {

// Throws AdmissibilityError unless 0 < 1/p + Re gamma < 1 and p > 1.
void check_admissible(double p, cd gamma);

struct SRP {
    cd s;
    cd r;
    cd p_plus;
    cd p_minus;
};

// s = coth(pi(x + i/p + i gamma)), r = csch(same), p± = (1 ± s)/2.
// Evaluated in forms that stay accurate for large |x|.
SRP eval_s_r_p(double p, cd gamma, double x);

// Fiber values of everything the symbol needs at one fiber point.
struct FiberData {
    FiberPoint fiber;
    std::map<int, cd> a; // coefficients of A+
    std::map<int, cd> b; // coefficients of A-
    double omega = 0.0;  // exponent of alpha
    double eta = 0.0;    // exponent of beta
    double radius = 0.0; // stabilization radius achieved
    std::vector<std::string> notes;
};

struct SymbolContext {
    double p = 2.0;
    cd gamma = 0.0;
    std::vector<FiberData> fibers;

    SymbolContext(double p_, cd gamma_) : p(p_), gamma(gamma_) { check_admissible(p, gamma); }
    const FiberData& fiber(const std::string& label) const;
};

// Joint fiber evaluation of coefficients and shift exponents. Declared values
// take precedence; mismatches against the computed limit land in notes.
FiberData build_fiber_data(const FiberPoint& xi, const std::map<int, SOFunction>& a_terms,
                           const std::map<int, SOFunction>& b_terms, const SOShift& alpha, const SOShift& beta,
                           double tol = kFiberTol, std::int64_t n_max = kFiberNMax);

std::pair<cd, cd> eval_a_pm(const FiberData& fd, double x);
cd eval_n(const SymbolContext& ctx, const FiberData& fd, double x);

// Binomial form (a - b e^{i omega x}) p+ + (c - d e^{i eta x}) p-.
struct BinomialFiber {
    cd a, b, c, d;
    double omega, eta;
};
cd eval_m(const SymbolContext& ctx, const BinomialFiber& bf, double x);

// Smallest X0 with max(|p+(-x)|, |p-(x)|) < eps for all x > X0.
double tail_threshold(double p, cd gamma, double eps);

struct ConditionIIFiber {
    std::string label;
    Endpoint endpoint = Endpoint::Infinity;
    bool heuristic = false;
    double x0 = 0.0;
    double quasi_period = 0.0;
    double window_lo = 0.0;
    double window_hi = 0.0;
    long samples = 0;
    double dense_min = 0.0;
    double tail_plus_inf = 0.0;
    double tail_minus_inf = 0.0;
    double inf_estimate = 0.0;
    double argmin = 0.0;
    bool degenerate = false;
    bool pass = false;
    std::vector<double> near_zeros;
};

struct ConditionIIReport {
    std::vector<ConditionIIFiber> fibers;
    double eps_tail = 0.0;
    double margin = 0.0;
    bool all_pass = false;
};

inline constexpr double kEpsTail = 1e-8;
inline constexpr double kSymbolMargin = 1e-3;
inline constexpr long kMaxSymbolSamples = 100000;

ConditionIIFiber condition_ii_fiber(const SymbolContext& ctx, const FiberData& fd, double eps_tail = kEpsTail,
                                    double margin = kSymbolMargin, long max_samples = kMaxSymbolSamples);
ConditionIIReport condition_ii_check(const SymbolContext& ctx, double eps_tail = kEpsTail,
                                     double margin = kSymbolMargin, long max_samples = kMaxSymbolSamples);

} // namespace sofred
