#include <gtest/gtest.h>

#include <cstdlib>
#include <sstream>

#include "json.hpp"

#include "gameopt/cli/commands.hpp"
#include "gameopt/cli/config.hpp"
#include "support.hpp"

using namespace gameopt;
using namespace gameopt::cli;
using gameopt::testing::TempDir;
using gameopt::testing::list_files;
using gameopt::testing::read_file;
using gameopt::testing::write_file;

namespace {

const std::string kConfigs = GAMEOPT_CONFIG_DIR;

int run(const std::string& command, const std::string& config, const std::string& out, bool oracle = false,
        std::string* errors = nullptr) {
    Overrides o;
    o.out = out;
    o.oracle = oracle;
    std::ostringstream log, err;
    const int code = run_command(command, config, o, log, err);
    if (errors) *errors = err.str();
    return code;
}

std::string write_config(const TempDir& dir, const std::string& name, const std::string& text) {
    const auto path = dir.path() / name;
    write_file(path, text);
    return path.string();
}

/// Numeric column `col` of a study CSV, skipping the comment and header lines.
std::vector<std::string> csv_column(const std::string& text, std::size_t col) {
    std::istringstream in(text);
    std::string line;
    std::vector<std::string> out;
    std::getline(in, line);
    std::getline(in, line);
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::istringstream row(line);
        std::string cell;
        while (std::getline(row, cell, ',')) cells.push_back(cell);
        if (line.back() == ',') cells.emplace_back();
        out.push_back(col < cells.size() ? cells[col] : "");
    }
    return out;
}

}  // namespace

TEST(Config, ShippedConfigsRoundTrip) {
    for (const char* name : {"price_israeli_put.yaml", "price_oracle.yaml", "validate_gbm.yaml",
                             "validate_unbounded.yaml", "study_tanh.yaml", "study_value.yaml"}) {
        const auto config = load_config(kConfigs + "/" + name);
        const auto text = serialize_config(config);
        EXPECT_EQ(parse_config(text), config) << name;
        EXPECT_EQ(serialize_config(parse_config(text)), text) << name;
    }
}

TEST(Config, InlineLawAndNonDefaultsRoundTrip) {
    const std::string text = R"yaml(
model:
  dim: 2
  sigma: ["0.3", "0.1*sin(x1)", "0", "0.2 + 0.1*tanh(x2)"]
  drift: [martingale]
  lip: 1.5
  x0: [0.1, -0.2]
law:
  atoms: [[1, 1], [1, -1], [-1, 1], [-1, -1]]
  probabilities: [0.25, 0.25, 0.25, 0.25]
payoff:
  kind: lookback-put
  penalty: 0.125
  profile: linear
  statistic: none
run:
  steps: 3
  steps_list: [4, 8]
  reps: 33
  seed: 18446744073709551615
  node_cap: 5000
  recombine: true
  refine: 8
  out: somewhere
  jobs: 2
  probes: 10
  probe_radius: 2.5
  moment: 0.5
  delta: 0.2
  cf_samples: 12
  dump_nodes: true
  studies: [cf]
)yaml";
    const auto config = parse_config(text);
    EXPECT_EQ(config.run.seed, 18446744073709551615ull);
    EXPECT_EQ(config.model.drift, std::vector<std::string>{"martingale"});
    EXPECT_EQ(parse_config(serialize_config(config)), config);
    EXPECT_EQ(build_model(config).dim, 2);
    EXPECT_EQ(build_law(config).atom_count(), 4u);
}

TEST(Config, ErrorsNameLineColumnAndKey) {
    const std::string text = "model:\n  preset: gbm-1d\nlaw:\n  preset: rademacher-1d\npayoff:\n  kind: israeli-put\n"
                             "run:\n  stepz: 4\n";
    try {
        parse_config(text, "bad.yaml");
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("bad.yaml:8:3"), std::string::npos) << msg;
        EXPECT_NE(msg.find("run.stepz"), std::string::npos) << msg;
    }
    EXPECT_THROW(parse_config("model: [unclosed\n"), ConfigError);
    EXPECT_THROW(parse_config(text.substr(0, text.find("run:")) + "run:\n  reps: many\n"), ConfigError);
    EXPECT_THROW(parse_config("model:\n  dim: 1\n  sigma: [\"x +\"]\n  drift: [\"0\"]\nlaw:\n  preset: rademacher-1d\n"
                              "payoff:\n  kind: israeli-put\n"),
                 ConfigError);
}

TEST(Config, StatisticCannotOverclaim) {
    const std::string text = "model:\n  preset: gbm-1d\nlaw:\n  preset: rademacher-1d\npayoff:\n  kind: asian-put\n"
                             "  statistic: state\n";
    try {
        parse_config(text, "s.yaml");
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("s.yaml:7:14: key 'payoff.statistic'"), std::string::npos) << e.what();
    }
}

TEST(Commands, ValidateBuiltInsSucceeds) {
    TempDir dir("validate");
    EXPECT_EQ(run("validate", kConfigs + "/validate_gbm.yaml", dir.str()), kSuccess);
    for (const char* f : {"model_validation.json", "law_validation.json", "payoff_validation.json", "manifest.json"})
        EXPECT_TRUE(std::filesystem::exists(dir.path() / f)) << f;
}

TEST(Commands, ValidateUnboundedSigmaFailsWithWitness) {
    TempDir dir("unbounded");
    EXPECT_EQ(run("validate", kConfigs + "/validate_unbounded.yaml", dir.str()), kValidationFailure);
    const auto doc = nlohmann::json::parse(read_file(dir.path() / "model_validation.json"));
    bool found = false;
    for (const auto& c : doc["checks"])
        if (c["name"] == "|sigma(x)| <= L") {
            found = true;
            EXPECT_FALSE(c["passed"].get<bool>());
            EXPECT_NE(c["witness"].get<std::string>().find("10"), std::string::npos);
        }
    EXPECT_TRUE(found);
}

TEST(Commands, MalformedConfigExitsOne) {
    TempDir dir("malformed");
    const auto cfg = write_config(dir, "c.yaml",
                                  "model:\n  presett: gbm-1d\nlaw:\n  preset: rademacher-1d\npayoff:\n"
                                  "  kind: israeli-put\n");
    std::string err;
    EXPECT_EQ(run("validate", cfg, (dir.path() / "out").string(), false, &err), kValidationFailure);
    EXPECT_NE(err.find("model.presett"), std::string::npos) << err;
}

TEST(Commands, PriceConstantPayoff) {
    TempDir dir("constant");
    const auto cfg = write_config(dir, "c.yaml",
                                  "model:\n  preset: tanh-1d\nlaw:\n  preset: rademacher-1d\npayoff:\n  kind: constant\n"
                                  "  constant: 0.75\nrun:\n  steps: 5\n");
    EXPECT_EQ(run("price", cfg, (dir.path() / "out").string()), kSuccess);
    const auto doc = nlohmann::json::parse(read_file(dir.path() / "out" / "value.json"));
    EXPECT_EQ(doc["value"].get<double>(), 0.75);
}

TEST(Commands, PriceWithOracleAgrees) {
    TempDir dir("oracle");
    EXPECT_EQ(run("price", kConfigs + "/price_oracle.yaml", dir.str(), true), kSuccess);
    const auto value = nlohmann::json::parse(read_file(dir.path() / "value.json"))["value"].get<double>();
    const auto oracle = nlohmann::json::parse(read_file(dir.path() / "oracle.json"));
    EXPECT_NEAR(oracle["brute_force_inf_sup"].get<double>(), value, 1e-12);
    EXPECT_NEAR(oracle["brute_force_sup_inf"].get<double>(), value, 1e-12);
}

TEST(Commands, PriceInfeasibleExitsTwo) {
    TempDir dir("infeasible");
    const auto cfg = write_config(dir, "c.yaml",
                                  "model:\n  preset: tanh-1d\nlaw:\n  preset: rademacher-1d\npayoff:\n  kind: israeli-put\n"
                                  "run:\n  steps: 25\n");
    std::string err;
    EXPECT_EQ(run("price", cfg, (dir.path() / "out").string(), false, &err), kInfeasible);
    EXPECT_NE(err.find("67108863"), std::string::npos) << err;
}

TEST(Commands, StudyOfDeterministicDrift) {
    TempDir dir("drift");
    const auto cfg = write_config(dir, "c.yaml",
                                  "model:\n  preset: drift-1d\nlaw:\n  preset: rademacher-1d\npayoff:\n"
                                  "  kind: israeli-put\nrun:\n  steps_list: [10, 20, 40]\n  reps: 30\n  refine: 4\n"
                                  "  studies: [strong-error]\n");
    EXPECT_EQ(run("study", cfg, (dir.path() / "out").string()), kSuccess);
    const auto estimates = csv_column(read_file(dir.path() / "out" / "strong_error.csv"), 3);
    ASSERT_EQ(estimates.size(), 3u);
    const int ns[] = {10, 20, 40};
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(std::stod(estimates[i]), 1.0 / (ns[i] * ns[i]), 1e-15);
}

TEST(Commands, StudyValueConvergenceWithEqualPayoffs) {
    TempDir dir("equal");
    const auto cfg = write_config(dir, "c.yaml",
                                  "model:\n  preset: gbm-1d\nlaw:\n  preset: rademacher-1d\npayoff:\n"
                                  "  kind: israeli-put\n  penalty: 0\nrun:\n  steps_list: [4, 8, 16]\n  recombine: true\n"
                                  "  studies: [value-convergence]\n");
    EXPECT_EQ(run("study", cfg, (dir.path() / "out").string()), kSuccess);
    const auto diffs = csv_column(read_file(dir.path() / "out" / "value_convergence.csv"), 2);
    ASSERT_EQ(diffs.size(), 3u);
    EXPECT_EQ(diffs[0], "");
    EXPECT_EQ(diffs[1], "0");
    EXPECT_EQ(diffs[2], "0");
}

TEST(Commands, RerunsAreByteIdenticalApartFromTheManifest) {
    TempDir a("rerun-a"), b("rerun-b");
    for (const auto* root : {&a, &b}) {
        EXPECT_EQ(run("price", kConfigs + "/price_oracle.yaml", (root->path() / "price").string(), true), kSuccess);
        EXPECT_EQ(run("validate", kConfigs + "/validate_gbm.yaml", (root->path() / "validate").string()), kSuccess);
    }
    const auto files = list_files(a.path());
    EXPECT_EQ(files, list_files(b.path()));
    for (const auto& f : files) {
        if (f.ends_with("manifest.json")) continue;
        EXPECT_EQ(read_file(a.path() / f), read_file(b.path() / f)) << f;
    }
}

TEST(Commands, ManifestRecordsTheResolvedConfig) {
    TempDir dir("manifest");
    Overrides o;
    o.out = dir.str();
    o.seed = 77;
    std::ostringstream log, err;
    ASSERT_EQ(run_command("validate", kConfigs + "/validate_gbm.yaml", o, log, err), kSuccess);
    const auto doc = nlohmann::json::parse(read_file(dir.path() / "manifest.json"));
    EXPECT_EQ(doc["seed"].get<std::uint64_t>(), 77u);
    EXPECT_EQ(doc["exit_code"].get<int>(), 0);
    const auto config = parse_config(doc["config"].get<std::string>());
    EXPECT_EQ(config.run.seed, 77u);
    EXPECT_TRUE(doc.contains("library_version"));
    EXPECT_TRUE(doc.contains("timestamp_utc"));
}

TEST(Executable, ExitCodesFromTheProcess) {
    TempDir dir("exe");
    const std::string exe = GAMEOPT_EXE;
    auto status = [&](const std::string& args) {
        const int raw = std::system((exe + " " + args + " > /dev/null 2>&1").c_str());
        return WEXITSTATUS(raw);
    };
    EXPECT_EQ(status("validate --config " + kConfigs + "/validate_gbm.yaml --out " + dir.str() + "/a"), 0);
    EXPECT_EQ(status("validate --config " + kConfigs + "/validate_unbounded.yaml --out " + dir.str() + "/b"), 1);
    const auto cfg = write_config(dir, "big.yaml",
                                  "model:\n  preset: tanh-1d\nlaw:\n  preset: rademacher-1d\npayoff:\n"
                                  "  kind: israeli-put\nrun:\n  steps: 25\n");
    EXPECT_EQ(status("price --config " + cfg + " --out " + dir.str() + "/c"), 2);
    EXPECT_NE(status("price"), 0);
}
