#pragma once

#include "sofred/operators.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <string_view>
#include <vector>

namespace sofred {

struct Thresholds {
    double eps_tail = 1e-8;
    double symbol_margin = 1e-3;
    long max_symbol_samples = 100000;
    double sign_threshold = 1e-3;
    int limit_decades = 10;
    double certificate_tol = 1e-3;
    int certificate_n = 512;
    double fiber_tol = 1e-6;
    std::int64_t fiber_n_max = std::int64_t(1) << 26;
};

// Unknown keys are rejected so that typos do not pass silently.
Thresholds parse_thresholds(const nlohmann::json& j, Thresholds base = {});
nlohmann::json thresholds_to_json(const Thresholds& t);

struct ProblemInstance {
    std::string name;
    double p;
    cd gamma;
    LogGrid grid;
    FunctionalOperatorSeries a_plus;  // sum a_k U_alpha^k
    FunctionalOperatorSeries a_minus; // sum b_k U_beta^k
    std::vector<FiberPoint> fibers;
    bool fibers_declared = false; // false: the heuristic default family is used
    Thresholds thresholds;

    const SOShift& alpha() const { return a_plus.shift; }
    const SOShift& beta() const { return a_minus.shift; }
    CompositeData composite() const { return {p, gamma, a_plus, a_minus}; }
};

ProblemInstance parse_instance(std::string_view text);
ProblemInstance load_instance(const std::string& path);

std::string read_file(const std::string& path);

} // namespace sofred
