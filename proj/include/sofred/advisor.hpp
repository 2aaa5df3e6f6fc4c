#pragma once

#include "sofred/instance.hpp"
#include "sofred/onesided.hpp"
#include "sofred/symbols.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace sofred {

// Condition (i) for one of A+ / A-.
struct ConditionIEntry {
    std::string name;   // "A+" or "A-"
    std::string method; // "multiplication", "binomial_classifier", "numerical certificate"
    bool left = false;
    bool right = false;
    bool inconclusive = false;
    bool inverse_shift = false; // support {-1, 0}, classified against alpha_{-1}
    std::optional<BinomialClassification> classification;
    std::optional<double> left_residual;
    std::optional<double> right_residual;
    std::vector<std::string> notes;
};

struct ProbeEntry {
    std::string name;
    std::optional<double> left_residual;
    std::optional<double> right_residual;
    std::vector<std::string> notes;
};

struct FredholmVerdict {
    std::string condition_i; // both, left_certified, right_certified, none, inconclusive
    std::vector<ConditionIEntry> operators;
    std::optional<ConditionIIReport> condition_ii;
    std::vector<std::string> condition_ii_notes;
    bool condition_ii_pass = false;
    std::string claim; // fredholm, left_fredholm, right_fredholm, no_claim
    std::string claim_detail;
    std::vector<ProbeEntry> probes;
    std::vector<std::pair<std::string, std::vector<std::string>>> fiber_notes;
};

FredholmVerdict run_advisor(const ProblemInstance& inst);

// Serialized verdict; pass timestamp = false for byte comparisons.
nlohmann::ordered_json verdict_to_json(const FredholmVerdict& v, const ProblemInstance& inst, bool timestamp = true);

// Recomputes the claim from the serialized evidence only.
std::string rederive_claim(const nlohmann::ordered_json& verdict);

nlohmann::ordered_json run_suite(const std::string& name, const ProblemInstance* inst);

// Columns x, re_n, im_n, abs_n over the window condition (ii) scans for the fiber.
void write_symbol_csv(const ProblemInstance& inst, const std::string& fiber_label, std::ostream& out);

} // namespace sofred
