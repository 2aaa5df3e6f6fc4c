#pragma once

#include "sofred/onesided.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace sofred {

// One measured quantity against its threshold. `upper` means measured < threshold passes,
// otherwise measured > threshold passes.
struct Check {
    std::string name;
    double measured = 0.0;
    double threshold = 0.0;
    bool upper = true;
    bool pass = false;
};

Check make_check(std::string name, double measured, double threshold, bool upper = true);

struct AdmissibleSample {
    double p;
    cd gamma;
    double x;
};

// p in [1.25, 5], 1/p + Re gamma in [0.05, 0.95], Im gamma in [-1, 1], x in [-5, 5].
std::vector<AdmissibleSample> random_admissible(int count, std::uint64_t seed);

// max |s^2 - r^2 - 1| and max |p+ + p- - 1|
std::pair<double, double> multiplier_identity_errors(int count, std::uint64_t seed);
// The two scalar PR relations, max error over random (p, gamma, delta, x).
std::pair<double, double> scalar_pr_errors(int count, std::uint64_t seed);

struct RouteComparison {
    double s_error = 0.0;
    double r_error = 0.0;
};
RouteComparison route_independence(double p, cd gamma, const LogGrid& g);

double u_isometry_defect(const SOShift& alpha, double p, const LogGrid& g);

// max over fibers and k in [-k_max, k_max] of |omega_k(xi) - k omega(xi)|.
struct IterateExponentReport {
    double max_error = 0.0;
    std::string worst_fiber;
    int worst_k = 0;
};
IterateExponentReport iterate_exponent_linearity(const SOShift& alpha, const std::vector<FiberPoint>& fibers,
                                                 int k_max = 5);

// The criteria-level suites, shared by the CLI and the acceptance binary.
std::vector<Check> identities_checks(const LogGrid& g);
std::vector<Check> probe_checks();

} // namespace sofred
