#include <iostream>

#include "CLI11.hpp"

#include "gameopt/cli/commands.hpp"

int main(int argc, char** argv) {
    using namespace gameopt::cli;
    CLI::App app{"Game option pricing on the discrete chain, with oracles and diagnostics"};
    app.require_subcommand(1);

    std::string config_path;
    Overrides overrides;
    std::uint64_t seed = 0;
    std::string out;
    int jobs = 1;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "YAML run configuration")->required()->check(CLI::ExistingFile);
        sub->add_option("--seed", seed, "Override run.seed");
        sub->add_option("--out", out, "Override run.out (output directory)");
        sub->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
    };
    CLI::App* validate = app.add_subcommand("validate", "Check model, law and payoff assumptions");
    CLI::App* price = app.add_subcommand("price", "Game value by backward recursion");
    CLI::App* study = app.add_subcommand("study", "Diagnostic studies over run.steps_list");
    for (auto* sub : {validate, price, study}) add_common(sub);
    price->add_flag("--oracle", overrides.oracle, "Also solve by exhaustive stopping-time enumeration");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kSuccess : kValidationFailure;
    }

    CLI::App* chosen = app.get_subcommands().front();
    if (chosen->count("--seed")) overrides.seed = seed;
    if (chosen->count("--out")) overrides.out = out;
    if (chosen->count("--jobs")) overrides.jobs = jobs;
    return run_command(chosen->get_name(), config_path, overrides, std::cout, std::cerr);
}
