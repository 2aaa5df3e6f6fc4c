#pragma once

#include "sofred/so_core.hpp"

#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace sofred {

// Closed interval in x = log t.
struct LogRange {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    bool contains(double x) const { return x >= lo && x <= hi; }
};

// Working range extended by 10 dyadic scales on each side.
LogRange guard_range(LogRange working);

// alpha(t) = t e^{omega(t)}; psi(t) = t omega'(t).
class SOShift {
public:
    SOShift(SOFunction omega, std::optional<SOFunction> psi, std::string label);

    static SOShift identity();
    static SOShift dilation(double lambda);
    // omega = c0 + c1 sin(nu log(1 + (log t)^2)); requires |c1| nu < 1.
    static SOShift family(double c0, double c1, double nu);
    // psi defaults to the symbolic derivative of omega.
    static SOShift from_expressions(std::string_view omega, std::optional<std::string_view> psi = std::nullopt);

    const SOFunction& omega() const { return omega_; }
    const SOFunction& psi() const;
    bool has_psi() const { return psi_.has_value(); }
    const std::string& label() const { return label_; }
    std::optional<double> constant_omega() const;

    double omega_log(double x) const;
    double psi_log(double x) const;

    double eval(double t) const;
    double eval_log(double x) const;
    double derivative(double t) const;
    double derivative_log(double x) const;

    double inverse(double u, double tol = 1e-12) const;
    double inverse_log(double y, double tol = 1e-12) const;

    double iterate(int k, double t, LogRange guard = {}) const;
    double iterate_log(int k, double x, LogRange guard = {}) const;
    std::optional<double> try_iterate_log(int k, double x, LogRange guard) const;

    double exponent_of_iterate(int k, double t, LogRange guard = {}) const;
    double exponent_of_iterate_log(int k, double x, LogRange guard = {}) const;

    // alpha_{-1} packaged as a shift of its own.
    SOShift inverse_shift() const;

    struct InvariantReport {
        double inf_one_plus_psi;
        double sup_abs_omega;
        bool increasing;
        double max_psi_fd_error;
    };
    InvariantReport check_invariants(LogRange working, int samples = 4096) const;

private:
    SOFunction omega_;
    std::optional<SOFunction> psi_;
    std::string label_;
};

struct ShiftDynamics {
    Endpoint tau_plus;
    Endpoint tau_minus;
    std::vector<std::pair<int, double>> orbit_samples; // (k, log alpha_k(tau))
};

ShiftDynamics detect_dynamics(const SOShift& alpha, double tau, int k_max, LogRange working,
                              double margin = 1e-6);

} // namespace sofred
