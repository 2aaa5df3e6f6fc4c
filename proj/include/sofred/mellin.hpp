#pragma once

#include "sofred/shifts.hpp"

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace sofred {

using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;

// Uniform grid in x = log t. Functions on R+ are stored as their samples at
// t_j = e^{x_j}; the L^p(R+, dt) norm uses weights t_j dx.
class LogGrid {
public:
    LogGrid(double x_min = -12.0, double x_max = 12.0, int n = 4096);

    int n() const { return n_; }
    double x_min() const { return x_min_; }
    double x_max() const { return x_min_ + dx_ * (n_ - 1); }
    double dx() const { return dx_; }
    double x(int j) const { return x_min_ + dx_ * j; }
    double t(int j) const { return std::exp(x(j)); }
    double weight(int j) const { return t(j) * dx_; }
    LogRange range() const { return {x_min(), x_max()}; }

    // Mellin frequencies in FFT order; spacing 2 pi / (n dx).
    double frequency(int m) const;
    double dxi() const;

    // Same dx, factor * n points, this grid centered inside.
    LogGrid extended(int factor) const;
    int offset_in(const LogGrid& ext) const;
    Vec embed(const Vec& f, const LogGrid& ext) const;
    Vec restrict(const Vec& F, const LogGrid& ext) const;

    Vec sample(const std::function<cd(double)>& f_of_x) const;
    std::vector<int> inner_indices(double fraction = 0.5) const;

private:
    LogGrid(double x_min, double dx, int n, bool);
    double x_min_;
    double dx_;
    int n_;
};

// (sum |f_j|^p t_j dx)^{1/p}
double lp_norm(const Vec& f, const LogGrid& g, double p);

Vec mellin_transform(const Vec& f, const LogGrid& g);
Vec inverse_mellin_transform(const Vec& F, const LogGrid& g);

class MellinMultiplier {
public:
    using Fn = std::function<cd(double)>;

    MellinMultiplier(Fn f, std::string label);
    static MellinMultiplier constant(cd c);

    cd operator()(double xi) const { return f_(xi); }
    Vec values(const LogGrid& g) const;
    const std::string& label() const { return label_; }

    MellinMultiplier operator*(const MellinMultiplier& b) const;
    MellinMultiplier operator+(const MellinMultiplier& b) const;
    MellinMultiplier operator-(const MellinMultiplier& b) const;
    MellinMultiplier scaled(cd c) const;

private:
    Fn f_;
    std::string label_;
};

// Co(a) f = M^{-1} a M f on the periodic grid.
Vec mellin_convolution(const MellinMultiplier& a, const Vec& f, const LogGrid& g);
Vec mellin_convolution_values(const Vec& a_values, const Vec& f);

// Symbol a(t, xi) given in log coordinates: eval(x, xi) with x = log t.
class PDOSymbol {
public:
    using Fn = std::function<cd(double, double)>;

    PDOSymbol(Fn f, bool t_only = false, bool xi_only = false);
    static PDOSymbol of_t(std::function<cd(double)> c);
    static PDOSymbol of_xi(const MellinMultiplier& a);

    cd operator()(double x, double xi) const { return f_(x, xi); }
    bool depends_only_on_t() const { return t_only_; }
    bool depends_only_on_xi() const { return xi_only_; }
    PDOSymbol operator*(const PDOSymbol& b) const;

private:
    Fn f_;
    bool t_only_;
    bool xi_only_;
};

// Frozen-row evaluation of (1/2pi) int a(t_j, xi) t_j^{i xi} (Mf)(xi) dxi.
// Rows outside [row_begin, row_end) are left at zero.
Vec mellin_pdo(const PDOSymbol& a, const Vec& f, const LogGrid& g, int row_begin = 0, int row_end = -1);
// Same for several functions at once (one per column); the symbol is evaluated once per (row, frequency).
Mat mellin_pdo_columns(const PDOSymbol& a, const Mat& F, const LogGrid& g, int row_begin = 0, int row_end = -1);

struct DefectReport {
    double max_relative = 0.0;
    std::vector<double> per_function;
};

// Norms in L^2(R+, dt/t), where Op acts.
DefectReport pdo_composition_defect(const PDOSymbol& a, const PDOSymbol& b, const std::vector<Vec>& testset,
                                    const LogGrid& g);

struct VariationReport {
    double variation = 0.0;
    double sup = 0.0;
    bool truncated = false;
};

VariationReport total_variation(const MellinMultiplier& a, const LogGrid& g, int refine = 8);

// c_p (||a||_inf + V(a)); c_p defaults to 1 at p = 2 and must be supplied otherwise.
double stechkin_bound(const MellinMultiplier& a, const LogGrid& g, double p, std::optional<double> c_p = std::nullopt);

} // namespace sofred
