#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gameopt/model.hpp"
#include "gameopt/payoff.hpp"

namespace gameopt::cli {

/// Raised for malformed configuration text. The message carries the line,
/// the column and the dotted key.
class ConfigError : public InvalidInput {
public:
    using InvalidInput::InvalidInput;
};

struct ModelSection {
    std::string preset;               // empty when inline
    int dim = 1;
    std::vector<std::string> sigma;   // dim * dim row-major expressions
    std::vector<std::string> drift;   // dim expressions, or {"martingale"}
    double lip = 1.0;
    std::vector<double> x0;           // empty: preset default or zeros

    friend bool operator==(const ModelSection&, const ModelSection&) = default;
};

struct LawSection {
    std::string preset;               // empty when inline
    std::vector<std::vector<double>> atoms;
    std::vector<double> probabilities;

    friend bool operator==(const LawSection&, const LawSection&) = default;
};

struct PayoffSection {
    PayoffSpec spec;
    std::optional<SufficientStatistic> statistic;  // declaration; must not claim more than the kind allows

    friend bool operator==(const PayoffSection&, const PayoffSection&) = default;
};

inline const std::vector<std::string>& all_studies() {
    static const std::vector<std::string> ids{"strong-error", "coarse-error", "cf", "exp-moment",
                                              "value-convergence"};
    return ids;
}

struct RunSection {
    int steps = 4;
    std::vector<int> steps_list{16, 64, 256};
    std::size_t reps = 200;
    std::uint64_t seed = 1;
    std::size_t node_cap = 1'000'000;
    bool recombine = false;
    int refine = 64;
    std::string out = "out";
    int jobs = 1;
    int probes = 1000;
    double probe_radius = 10.0;
    double moment = 1.0;   // M of the exponential moment
    double delta = 0.1;
    std::size_t cf_samples = 256;
    bool dump_nodes = false;
    std::vector<std::string> studies = all_studies();

    friend bool operator==(const RunSection&, const RunSection&) = default;
};

struct RunConfig {
    ModelSection model;
    LawSection law;
    PayoffSection payoff;
    RunSection run;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Parses YAML text. `source` names the origin in error messages.
RunConfig parse_config(const std::string& text, const std::string& source = "config");
RunConfig load_config(const std::string& path);
/// Canonical YAML; parse_config(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& config);

DiffusionModel build_model(const RunConfig& config);
InnovationLaw build_law(const RunConfig& config);
PayoffPair build_payoff(const RunConfig& config);

}  // namespace gameopt::cli
