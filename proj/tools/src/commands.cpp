#include "gameopt/cli/commands.hpp"

#include <chrono>
#include <cmath>
#include <algorithm>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "json.hpp"

#include "gameopt/diagnostics.hpp"
#include "gameopt/regression.hpp"
#include "gameopt/report_io.hpp"
#include "gameopt/scheme.hpp"
#include "gameopt/tree.hpp"

namespace gameopt::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

/// Collects the files of one run and writes the manifest last.
class RunOutput {
public:
    RunOutput(const RunConfig& config, std::string command)
        : config_(config), command_(std::move(command)), start_(std::chrono::steady_clock::now()) {
        fs::create_directories(config.run.out);
    }

    void write(const std::string& name, const std::string& content) {
        const fs::path path = fs::path(config_.run.out) / name;
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write '" + path.string() + "'");
        out << content;
        if (!out) throw Error("failed writing '" + path.string() + "'");
        files_.push_back(name);
    }

    void finish(int exit_code) {
        const auto wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        const std::time_t now = std::time(nullptr);
        std::tm utc{};
        gmtime_r(&now, &utc);
        std::ostringstream stamp;
        stamp << std::put_time(&utc, "%Y-%m-%dT%H:%M:%SZ");

        ordered_json doc;
        doc["format"] = "gameopt-manifest";
        doc["version"] = kFormatVersion;
        doc["library_version"] = kLibraryVersion;
        doc["command"] = command_;
        doc["exit_code"] = exit_code;
        doc["seed"] = config_.run.seed;
        doc["jobs"] = config_.run.jobs;
        doc["rng"] = "Philox4x32-10; replication r uses stream r; substreams 0 innovations, 1 bridge, 2 probes";
        doc["config"] = serialize_config(config_);
        doc["outputs"] = files_;
        doc["wall_seconds"] = wall;
        doc["timestamp_utc"] = stamp.str();
        const fs::path path = fs::path(config_.run.out) / "manifest.json";
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        out << doc.dump(2) << "\n";
    }

private:
    const RunConfig& config_;
    std::string command_;
    std::chrono::steady_clock::time_point start_;
    std::vector<std::string> files_;
};

void check_dimensions(const DiffusionModel& model, const InnovationLaw& law) {
    if (model.dim != law.dim())
        throw ShapeError("model '" + model.id + "' has dimension " + std::to_string(model.dim) + ", law '" +
                         law.id() + "' has dimension " + std::to_string(law.dim()));
}

std::string fmt(double x) { return format_double(x); }

/// CSV with a versioned comment line naming the study and its columns.
class Csv {
public:
    Csv(const std::string& kind, const std::string& extra, std::vector<std::string> columns)
        : columns_(std::move(columns)) {
        out_ << "# gameopt-" << kind << " v" << kFormatVersion;
        if (!extra.empty()) out_ << " " << extra;
        out_ << " columns=";
        for (std::size_t i = 0; i < columns_.size(); ++i) out_ << (i ? "," : "") << columns_[i];
        out_ << "\n";
        for (std::size_t i = 0; i < columns_.size(); ++i) out_ << (i ? "," : "") << columns_[i];
        out_ << "\n";
    }

    void row(const std::vector<std::string>& fields) {
        if (fields.size() != columns_.size()) throw Error("internal: csv row width mismatch");
        for (std::size_t i = 0; i < fields.size(); ++i) out_ << (i ? "," : "") << quote(fields[i]);
        out_ << "\n";
    }

    std::string str() const { return out_.str(); }

private:
    static std::string quote(const std::string& field) {
        if (field.find_first_of(",\"\n") == std::string::npos) return field;
        std::string q = "\"";
        for (char c : field) q += c == '"' ? std::string("\"\"") : std::string(1, c);
        return q + "\"";
    }

    std::vector<std::string> columns_;
    std::ostringstream out_;
};

void print_failures(const ValidationReport& report, std::ostream& log) {
    for (const auto& c : report.checks)
        if (!c.passed)
            log << "  FAIL " << report.subject << ": " << c.name << " margin " << fmt(c.margin)
                << (c.witness.empty() ? "" : " at " + c.witness) << "\n";
}

}  // namespace

RunConfig apply_overrides(RunConfig config, const Overrides& overrides) {
    if (overrides.seed) config.run.seed = *overrides.seed;
    if (overrides.out) config.run.out = *overrides.out;
    if (overrides.jobs) {
        if (*overrides.jobs < 1) throw ConfigError("--jobs must be at least 1");
        config.run.jobs = *overrides.jobs;
    }
    return config;
}

int cmd_validate(const RunConfig& config, std::ostream& log) {
    RunOutput output(config, "validate");
    const DiffusionModel model = build_model(config);
    const InnovationLaw law = build_law(config);
    check_dimensions(model, law);
    const PayoffPair payoff = build_payoff(config);
    const RunSection& run = config.run;

    const ValidationReport model_report = validate_model(model, run.probes, run.probe_radius, run.seed);
    const ValidationReport law_report = validate_innovations(law);
    std::vector<DiscretePath> paths;
    const int steps = std::max(run.steps, 1);
    const std::size_t count = std::min<std::size_t>(run.reps, 64);
    for (std::size_t r = 0; r < count; ++r) paths.push_back(simulate_path(model, law, steps, run.seed, r));
    const ValidationReport payoff_report = validate_payoffs(payoff, paths);

    output.write("model_validation.json", model_report.to_json());
    output.write("law_validation.json", law_report.to_json());
    output.write("payoff_validation.json", payoff_report.to_json());

    const bool ok = model_report.passed() && law_report.passed() && payoff_report.passed();
    log << "validate: model " << (model_report.passed() ? "pass" : "FAIL") << ", law "
        << (law_report.passed() ? "pass" : "FAIL") << ", payoff " << (payoff_report.passed() ? "pass" : "FAIL")
        << "\n";
    for (const auto* r : {&model_report, &law_report, &payoff_report}) print_failures(*r, log);
    for (const auto& flag : law_report.flags) log << "  flag: " << flag << "\n";
    const int code = ok ? kSuccess : kValidationFailure;
    output.finish(code);
    return code;
}

int cmd_price(const RunConfig& config, bool oracle, std::ostream& log) {
    RunOutput output(config, "price");
    const DiffusionModel model = build_model(config);
    const InnovationLaw law = build_law(config);
    check_dimensions(model, law);
    const PayoffPair payoff = build_payoff(config);
    const RunSection& run = config.run;

    const ScenarioTree tree =
        build_tree(model, law, run.steps, tree_options_for(payoff, run.recombine, run.node_cap));
    GameValueReport report = backward_value(tree, payoff, run.jobs);
    report.model_id = model.id;
    report.law_id = law.id();
    output.write("value.json", game_report_json(tree, report, run.dump_nodes));

    // Stop regions per level, described by their extent in the first coordinate.
    Csv strategies("strategies", "", {"level", "time", "nodes", "cancel_nodes", "exercise_nodes", "cancel_x1_min",
                                      "cancel_x1_max", "exercise_x1_min", "exercise_x1_max"});
    for (int n = 0; n <= tree.depth(); ++n) {
        std::size_t cancel = 0, exercise = 0;
        double c_lo = INFINITY, c_hi = -INFINITY, e_lo = INFINITY, e_hi = -INFINITY;
        for (std::size_t v = tree.level_begin(n); v < tree.level_end(n); ++v) {
            const double x = tree.state(v, 0);
            if (report.minimizer_stop[v]) {
                ++cancel;
                c_lo = std::min(c_lo, x);
                c_hi = std::max(c_hi, x);
            }
            if (report.maximizer_stop[v]) {
                ++exercise;
                e_lo = std::min(e_lo, x);
                e_hi = std::max(e_hi, x);
            }
        }
        auto extent = [](std::size_t k, double x) { return k ? fmt(x) : std::string(); };
        strategies.row({std::to_string(n), fmt(tree.depth() ? static_cast<double>(n) / tree.depth() : 1.0),
                        std::to_string(tree.level_end(n) - tree.level_begin(n)), std::to_string(cancel),
                        std::to_string(exercise), extent(cancel, c_lo), extent(cancel, c_hi),
                        extent(exercise, e_lo), extent(exercise, e_hi)});
    }
    output.write("strategies.csv", strategies.str());

    const SandwichAudit audit = audit_sandwich(tree, report);
    const double european = european_value(tree, payoff);
    const double american = american_value(tree, payoff);
    ordered_json audit_doc;
    audit_doc["format"] = "gameopt-audit";
    audit_doc["version"] = kFormatVersion;
    audit_doc["value"] = report.value;
    audit_doc["sandwich_holds"] = audit.holds();
    audit_doc["max_lower_minus_value"] = audit.lower_excess;
    audit_doc["max_value_minus_upper"] = audit.upper_excess;
    audit_doc["european_value"] = european;
    audit_doc["american_value"] = american;
    audit_doc["european_le_value"] = european <= report.value;
    audit_doc["value_le_american"] = report.value <= american;
    output.write("audit.json", audit_doc.dump(2) + "\n");

    log << "price: V_N = " << fmt(report.value) << " (N = " << run.steps << ", " << tree.size() << " nodes)\n";
    if (!audit.holds()) log << "  FAIL sandwich audit\n";

    int code = audit.holds() ? kSuccess : kValidationFailure;
    if (oracle) {
        const ScenarioTree full = build_tree(model, law, run.steps, tree_options_for(payoff, false, run.node_cap));
        const double value_full = backward_value(full, payoff, run.jobs).value;
        const BruteForceResult brute = brute_force_value(full, payoff);
        const double diff = std::max({std::abs(brute.inf_sup - report.value), std::abs(brute.sup_inf - report.value),
                                      std::abs(value_full - report.value)});
        const bool agree = diff <= 1e-12;
        ordered_json doc;
        doc["format"] = "gameopt-oracle";
        doc["version"] = kFormatVersion;
        doc["value"] = report.value;
        doc["brute_force_inf_sup"] = brute.inf_sup;
        doc["brute_force_sup_inf"] = brute.sup_inf;
        doc["stopping_times"] = brute.stopping_times;
        doc["max_abs_difference"] = diff;
        doc["agree"] = agree;
        output.write("oracle.json", doc.dump(2) + "\n");
        log << "  oracle: inf-sup " << fmt(brute.inf_sup) << ", sup-inf " << fmt(brute.sup_inf)
            << (agree ? " (agree)" : " (DISAGREE)") << "\n";
        if (!agree) code = kValidationFailure;
    }
    output.finish(code);
    return code;
}

int cmd_study(const RunConfig& config, std::ostream& log) {
    RunOutput output(config, "study");
    const DiffusionModel model = build_model(config);
    const InnovationLaw law = build_law(config);
    check_dimensions(model, law);
    const RunSection& run = config.run;
    const int d = model.dim;
    bool all_compliant = true;

    Csv rates("rate-summary", "", {"study", "slope", "intercept", "r_squared", "points", "refused", "status"});
    auto add_rate = [&](const std::string& study, const std::vector<RatePoint>& points) {
        try {
            const RateStudy s = rate_regression(points);
            rates.row({study, fmt(s.slope), fmt(s.intercept), fmt(s.r_squared), std::to_string(s.points.size()),
                       std::to_string(s.refused.size()), "ok"});
            log << "  " << study << " slope " << fmt(s.slope) << " (R^2 " << fmt(s.r_squared) << ")\n";
        } catch (const Error& e) {
            rates.row({study, "", "", "", std::to_string(points.size()), "", e.what()});
        }
    };
    // Runs body(n) for each N, turning library errors into status rows.
    auto per_n = [&](const std::function<void(int)>& body, const std::function<void(int, const std::string&)>& failed) {
        for (int n : run.steps_list) {
            try {
                body(n);
            } catch (const Error& e) {
                failed(n, e.what());
            }
        }
    };
    auto has = [&](const std::string& id) {
        return std::find(run.studies.begin(), run.studies.end(), id) != run.studies.end();
    };

    if (has("strong-error")) {
        const InnovationLaw gauss = InnovationLaw::gaussian(d);
        const TheoreticalBounds bounds{model.lip_bound, d};
        Csv csv("strong-error", "law=" + gauss.id(),
                {"n", "refine", "reps", "estimate", "std_error", "log_bound", "bound_applies", "status"});
        std::vector<RatePoint> points;
        per_n(
            [&](int n) {
                const Estimate e = strong_error(model, gauss, n, run.refine, run.reps, run.seed, run.jobs);
                const bool applies = std::log10(static_cast<double>(n)) >= bounds.log10_n0();
                csv.row({std::to_string(n), std::to_string(run.refine), std::to_string(run.reps), fmt(e.mean),
                         fmt(e.std_error), fmt(bounds.log_strong_bound(n)), applies ? "true" : "false", "ok"});
                points.push_back({static_cast<double>(n), e.mean, e.std_error});
            },
            [&](int n, const std::string& what) {
                csv.row({std::to_string(n), std::to_string(run.refine), std::to_string(run.reps), "", "", "", "", what});
            });
        output.write("strong_error.csv", csv.str());
        add_rate("strong-error", points);
    }

    if (has("coarse-error")) {
        Csv csv("coarse-error", "law=" + law.id(),
                {"n", "reps", "estimate", "std_error", "bound", "compliant", "status"});
        std::vector<RatePoint> points;
        per_n(
            [&](int n) {
                const BoundCheck c = coarse_error(model, law, n, run.reps, run.seed, run.jobs);
                all_compliant = all_compliant && c.compliant;
                csv.row({std::to_string(n), std::to_string(run.reps), fmt(c.estimate.mean), fmt(c.estimate.std_error),
                         fmt(c.bound), c.compliant ? "true" : "false", "ok"});
                points.push_back({static_cast<double>(n), c.estimate.mean, c.estimate.std_error});
            },
            [&](int n, const std::string& what) {
                csv.row({std::to_string(n), std::to_string(run.reps), "", "", "", "", what});
            });
        output.write("coarse_error.csv", csv.str());
        add_rate("coarse-error", points);
    }

    if (has("cf")) {
        const Matrix sigma = model.sigma_at(model.x0);
        const double lip = effective_lip_bound(model, law);
        Csv csv("cf", "law=" + law.id(), {"n", "points", "radius", "max_deviation", "bound", "compliant", "status"});
        per_n(
            [&](int n) {
                const CfDistance c = cf_distance(sigma, law, n, run.cf_samples, run.seed, lip);
                all_compliant = all_compliant && c.compliant;
                csv.row({std::to_string(n), std::to_string(c.points), fmt(c.radius), fmt(c.max_deviation),
                         fmt(c.bound), c.compliant ? "true" : "false", "ok"});
            },
            [&](int n, const std::string& what) { csv.row({std::to_string(n), "", "", "", "", "", what}); });
        output.write("cf.csv", csv.str());
    }

    if (has("exp-moment")) {
        Csv csv("exp-moment", "law=" + law.id(),
                {"n", "moment", "delta", "reps", "estimate", "std_error", "log_bound", "bound", "compliant", "status"});
        per_n(
            [&](int n) {
                const BoundCheck c = exp_moment(model, law, n, run.moment, run.reps, run.delta, run.seed, run.jobs);
                all_compliant = all_compliant && c.compliant;
                csv.row({std::to_string(n), fmt(run.moment), fmt(run.delta), std::to_string(run.reps),
                         fmt(c.estimate.mean), fmt(c.estimate.std_error), fmt(c.log_bound), fmt(c.bound),
                         c.compliant ? "true" : "false", "ok"});
            },
            [&](int n, const std::string& what) {
                csv.row({std::to_string(n), fmt(run.moment), fmt(run.delta), std::to_string(run.reps), "", "", "", "",
                         "", what});
            });
        output.write("exp_moment.csv", csv.str());
    }

    if (has("value-convergence")) {
        const PayoffPair payoff = build_payoff(config);
        Csv csv("value-convergence", "law=" + law.id() + " payoff=" + payoff.id,
                {"n", "value", "difference", "nodes", "status"});
        const auto rows = value_convergence(model, law, payoff, run.steps_list, run.node_cap, run.recombine, run.jobs);
        for (const auto& r : rows)
            csv.row({std::to_string(r.n_steps), r.status == "ok" ? fmt(r.value) : "",
                     std::isnan(r.difference) ? "" : fmt(r.difference), std::to_string(r.nodes), r.status});
        output.write("value_convergence.csv", csv.str());
        log << "  value-convergence differences "
            << (differences_nonincreasing(rows) ? "non-increasing" : "not monotone") << "\n";
    }

    output.write("rate_summary.csv", rates.str());
    log << "study: " << run.studies.size() << " studies over " << run.steps_list.size() << " N values"
        << (all_compliant ? "" : "; some bound checks are not compliant") << "\n";
    const int code = all_compliant ? kSuccess : kValidationFailure;
    output.finish(code);
    return code;
}

int run_command(const std::string& command, const std::string& config_path, const Overrides& overrides,
                std::ostream& log, std::ostream& err) {
    try {
        const RunConfig config = apply_overrides(load_config(config_path), overrides);
        if (command == "validate") return cmd_validate(config, log);
        if (command == "price") return cmd_price(config, overrides.oracle, log);
        if (command == "study") return cmd_study(config, log);
        err << "error: unknown command '" << command << "'\n";
        return kValidationFailure;
    } catch (const InfeasibleError& e) {
        err << "infeasible: " << e.what() << "\n";
        return kInfeasible;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kValidationFailure;
    } catch (const InvalidInput& e) {
        err << "invalid input: " << e.what() << "\n";
        return kValidationFailure;
    } catch (const ShapeError& e) {
        err << "shape error: " << e.what() << "\n";
        return kValidationFailure;
    } catch (const UnsupportedLaw& e) {
        err << "unsupported law: " << e.what() << "\n";
        return kValidationFailure;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return kInternalError;
    }
}

}  // namespace gameopt::cli
