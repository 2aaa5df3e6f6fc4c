#pragma once

#include "sofred/mellin.hpp"
#include "sofred/shifts.hpp"
#include "sofred/so_core.hpp"

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace sofred {

class DiscretizedOperator {
public:
    using Action = std::function<Vec(const Vec&)>;

    DiscretizedOperator(LogGrid g, double p, Action a, std::string label);
    static DiscretizedOperator identity(const LogGrid& g, double p);
    static DiscretizedOperator from_matrix(const LogGrid& g, double p, Mat m, std::string label);

    Vec apply(const Vec& f) const;
    Vec operator()(const Vec& f) const { return apply(f); }

    // Dense matrix; built column by column from the action when absent.
    Mat matrix() const;
    DiscretizedOperator materialized() const;
    bool has_matrix() const { return matrix_ != nullptr; }

    const LogGrid& grid() const { return grid_; }
    double p() const { return p_; }
    const std::string& label() const { return label_; }

    DiscretizedOperator operator*(const DiscretizedOperator& b) const;
    DiscretizedOperator operator+(const DiscretizedOperator& b) const;
    DiscretizedOperator operator-(const DiscretizedOperator& b) const;
    DiscretizedOperator scaled(cd c) const;
    DiscretizedOperator relabeled(std::string label) const;

private:
    LogGrid grid_;
    double p_;
    Action action_;
    std::shared_ptr<const Mat> matrix_;
    std::string label_;
};

inline constexpr int kMaxDenseSize = 1024;

enum class Route { PV, Mellin };
std::string to_string(Route r);

inline constexpr int kMellinPadding = 8;

// U_alpha f = (alpha')^{1/p} f o alpha, cubic interpolation in log t.
DiscretizedOperator op_U(const SOShift& alpha, double p, const LogGrid& g);
// U_alpha^{-1} = U_{alpha_{-1}}.
DiscretizedOperator op_U_inverse(const SOShift& alpha, double p, const LogGrid& g);

MellinMultiplier s_multiplier(double p, cd gamma);
MellinMultiplier r_multiplier(double p, cd gamma);
MellinMultiplier p_multiplier(double p, cd gamma, int sign);

// Phi^{-1} Co(a) Phi with the convolution done on a grid `pad` times longer.
DiscretizedOperator mellin_route(const MellinMultiplier& a, double p, const LogGrid& g, int pad = kMellinPadding,
                                 std::string label = {});

DiscretizedOperator op_S(cd gamma, double p, const LogGrid& g, Route route, int pad = kMellinPadding);
DiscretizedOperator op_R(cd gamma, double p, const LogGrid& g, Route route, int pad = kMellinPadding);
DiscretizedOperator op_P(cd gamma, double p, const LogGrid& g, int sign, Route route, int pad = kMellinPadding);

// Builds an operator on g.extended(factor) and wraps it as embed -> apply -> restrict.
DiscretizedOperator on_extended_grid(const LogGrid& g, int factor,
                                     const std::function<DiscretizedOperator(const LogGrid&)>& build);

struct FunctionalOperatorSeries {
    SOShift shift;
    std::map<int, SOFunction> terms;

    FunctionalOperatorSeries(SOShift s, std::map<int, SOFunction> t) : shift(std::move(s)), terms(std::move(t)) {}
    static FunctionalOperatorSeries identity(const SOShift& s);

    // sum_k sup |a_k|, sup estimated over the guard range of `working`.
    double wiener_norm(LogRange working, int samples = 4096) const;
    int max_power() const;
    bool is_binomial() const; // support within {0, 1}
    // Coefficients that fail the oscillation check; empty means all passed.
    std::vector<std::string> so_flags(int r_decades = 6, double tol = 0.1) const;
};

DiscretizedOperator op_functional(const FunctionalOperatorSeries& series, double p, const LogGrid& g);

struct CompositeData {
    double p;
    cd gamma;
    FunctionalOperatorSeries a_plus;
    FunctionalOperatorSeries a_minus;
};

DiscretizedOperator op_N(const CompositeData& d, const LogGrid& g, Route route = Route::Mellin);
// A+ P0+ + C- P0-  and  C+ P0+ + A- P0-.
std::pair<DiscretizedOperator, DiscretizedOperator> paired_forms(const CompositeData& d, const LogGrid& g,
                                                                 Route route = Route::Mellin);

// Five Gaussians in log t, centred in the inner half of the grid.
std::vector<Vec> inner_testset(const LogGrid& g, int count = 5);

double relative_error(const Vec& a, const Vec& b, const LogGrid& g, double p);

struct PRReport {
    double difference_relation = 0.0; // P_d+ - P_g+ - (1/2) sinh[pi i (g - d)] R_g R_d
    double product_relation = 0.0;    // P_g- P_d+ + (e^{i pi (d - g)}/4) R_g R_d
    double max() const { return std::max(difference_relation, product_relation); }
};

PRReport pr_relations_check(cd gamma, cd delta, double p, const LogGrid& g, const std::vector<Vec>& testset,
                            Route route);

struct CommutatorReport {
    std::vector<double> sigma;
    double ratio32 = 0.0;
    bool zero = false;
};

// Singular values of AB - BA on inner-supported inputs, in the L^2 weighted basis.
CommutatorReport commutator_probe(const DiscretizedOperator& A, const DiscretizedOperator& B, int k_report = 40);

struct ShiftRReport {
    double discrepancy = 0.0;       // || (U R - Phi^{-1} Op Phi) f || / || f ||
    double structural_residual = 0.0; // Phi^{-1} Op Phi f vs e^{omega/p} (R f) o alpha
    double predicted = 0.0;         // || ((1+psi)^{1/p} - 1) e^{omega/p} (R f) o alpha || / || f ||
};

ShiftRReport shift_r_discrepancy(const SOShift& alpha, cd gamma, double p, const LogGrid& g,
                                 const std::vector<Vec>& testset, int ext_factor = 2);

} // namespace sofred
