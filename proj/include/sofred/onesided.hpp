#pragma once

#include "sofred/operators.hpp"

#include <string>
#include <vector>

namespace sofred {

struct WindowExtrema {
    double r; // window is r <= |log t| <= 2r
    double min;
    double max;
};

struct LimitBounds {
    double lower = 0.0; // liminf (|a| - |b|)
    double upper = 0.0; // limsup
    bool stabilized = false;
    std::vector<WindowExtrema> windows;
};

inline constexpr double kLimitStabilization = 1e-3;

// Extrema of |a| - |b| over the windows [2^j, 2^{j+1}] in |log t|, up to
// |log t| = 10^decades. The trailing half of the windows gives the estimate.
LimitBounds limit_bounds(const SOFunction& a, const SOFunction& b, Endpoint s, int decades = 10,
                         int samples = 256);

// inf |f| over (0, inf), sampled on the same windows plus a neighbourhood of t = 1.
double sampled_inf_abs(const SOFunction& f, int decades = 10);

enum class BinomialVerdict { InvertibleI1, InvertibleI2, StrictlyLeftLI, StrictlyRightRI, Unclassified };
std::string to_string(BinomialVerdict v);

struct OrbitScan {
    int k_range = 40;
    int points = 16;
    double zero_threshold = 1e-9;
    int orbits_with_zeros = 0;
    bool li_holds = true; // max Z_a <= min Z_b on every scanned orbit
    bool ri_holds = true; // max Z_b <  min Z_a on every scanned orbit
};

struct BinomialClassification {
    BinomialVerdict verdict = BinomialVerdict::Unclassified;
    Endpoint tau_minus = Endpoint::Zero; // repelling point
    Endpoint tau_plus = Endpoint::Infinity; // attracting point
    LimitBounds at_minus;
    LimitBounds at_plus;
    double inf_abs_a = 0.0;
    double inf_abs_b = 0.0;
    double sign_threshold = 1e-3;
    OrbitScan scan;

    double lower_minus() const { return at_minus.lower; }
    double upper_minus() const { return at_minus.upper; }
    double lower_plus() const { return at_plus.lower; }
    double upper_plus() const { return at_plus.upper; }
};

// A = a I - b U_alpha.
BinomialClassification classify_binomial(const SOShift& alpha, const SOFunction& a, const SOFunction& b,
                                         int decades = 10, double sign_threshold = 1e-3);

// Verdict from the recorded evidence alone; used by the re-derivation check.
BinomialVerdict binomial_verdict_from(const BinomialClassification& c);

// sum_k (conj(a_k) o alpha_{-k}) U^{-k}
FunctionalOperatorSeries formal_adjoint(const FunctionalOperatorSeries& A);

enum class Side { Left, Right };
std::string to_string(Side s);

struct OneSidedInverse {
    DiscretizedOperator op;
    Side side;
    double left_residual = 0.0;  // max_f || B A f - f || / || f ||
    double right_residual = 0.0; // max_f || A B f - f || / || f ||
    double condition = 0.0;      // estimate for the normal matrix
    int domain_size = 0;
    bool certified = false;      // residual on `side` below tol
};

inline constexpr double kConditionCap = 1e8;

// (A^# A)^{-1} A^# or A^# (A A^#)^{-1}, with A^# the formal adjoint, on the
// part of the grid the shifts cannot push off the edge.
OneSidedInverse one_sided_inverse(const FunctionalOperatorSeries& A, Side side, double p, const LogGrid& g,
                                  double tol);

struct NeumannInverse {
    DiscretizedOperator op;
    double rho = 0.0;
    double bound = 0.0;    // rho^{K+1} (1 + slack)
    double residual = 0.0; // measured on the probe
    int K = 0;
};

// sum_{k=0}^{K} (a^{-1} b U)^k a^{-1}, the truncated inverse of a I - b U_alpha.
NeumannInverse neumann_inverse(const SOShift& alpha, const SOFunction& a, const SOFunction& b, int K, double p,
                               const LogGrid& g, double slack = 1.0);

} // namespace sofred
