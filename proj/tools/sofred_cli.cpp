#include "sofred/advisor.hpp"
#include "sofred/errors.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

sofred::ProblemInstance load(const std::string& path, const std::string& thresholds)
{
    auto inst = sofred::load_instance(path);
    if (!thresholds.empty())
        inst.thresholds = sofred::parse_thresholds(nlohmann::json::parse(sofred::read_file(thresholds)), inst.thresholds);
    return inst;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Sufficient-condition Fredholm advisor for weighted singular integral operators with shifts"};
    app.require_subcommand(1);
    std::string thresholds;
    app.add_option("--thresholds", thresholds, "JSON file overriding numerical thresholds")->check(CLI::ExistingFile);

    auto* check = app.add_subcommand("check", "Run both conditions on an instance and print the verdict JSON");
    std::string check_path;
    bool no_timestamp = false;
    check->add_option("instance", check_path, "instance JSON")->required()->check(CLI::ExistingFile);
    check->add_flag("--no-timestamp", no_timestamp, "omit generated_at");

    auto* suite = app.add_subcommand("suite", "Run a check suite and print its report JSON");
    std::string suite_name, suite_path;
    suite->add_option("name", suite_name, "identities, probes or symbols")
        ->required()
        ->check(CLI::IsMember({"identities", "probes", "symbols"}));
    suite->add_option("instance", suite_path, "instance JSON")->check(CLI::ExistingFile);

    auto* symbol = app.add_subcommand("symbol", "Write the symbol n(xi, x) on one fiber as CSV");
    std::string sym_path, fiber, out_path;
    symbol->add_option("instance", sym_path, "instance JSON")->required()->check(CLI::ExistingFile);
    symbol->add_option("--fiber", fiber, "fiber label")->required();
    symbol->add_option("--out", out_path, "CSV output file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*check) {
            const auto inst = load(check_path, thresholds);
            const auto v = sofred::run_advisor(inst);
            std::cout << sofred::verdict_to_json(v, inst, !no_timestamp).dump(2) << '\n';
        } else if (*suite) {
            std::optional<sofred::ProblemInstance> inst;
            if (!suite_path.empty())
                inst = load(suite_path, thresholds);
            std::cout << sofred::run_suite(suite_name, inst ? &*inst : nullptr).dump(2) << '\n';
        } else if (*symbol) {
            const auto inst = load(sym_path, thresholds);
            std::ofstream out(out_path);
            if (!out)
                throw sofred::ConfigurationError("cannot write '" + out_path + "'");
            sofred::write_symbol_csv(inst, fiber, out);
        }
    } catch (const sofred::ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return 2;
    } catch (const sofred::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
