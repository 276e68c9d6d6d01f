#include "gameopt/cli/config.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <type_traits>

#include <yaml-cpp/yaml.h>

#include "gameopt/expression.hpp"
#include "gameopt/report_io.hpp"

namespace gameopt::cli {

namespace {

/// none < running_max < state in the strength of the claim.
int strength(SufficientStatistic s) {
    switch (s) {
        case SufficientStatistic::none: return 0;
        case SufficientStatistic::running_max: return 1;
        case SufficientStatistic::state: return 2;
    }
    return 0;
}

std::string overclaim_message(const PayoffPair& pair, SufficientStatistic claimed) {
    return "'" + pair.id + "' only admits '" + to_string(pair.statistic) + "', not '" + to_string(claimed) + "'";
}

class Reader {
public:
    explicit Reader(std::string source) : source_(std::move(source)) {}

    [[noreturn]] void fail(const YAML::Node& node, const std::string& key, const std::string& message) const {
        const YAML::Mark mark = node.Mark();
        std::ostringstream out;
        out << source_;
        if (!mark.is_null()) out << ":" << mark.line + 1 << ":" << mark.column + 1;
        out << ": key '" << key << "': " << message;
        throw ConfigError(out.str());
    }

    void require_map(const YAML::Node& node, const std::string& key, const std::set<std::string>& allowed) const {
        if (!node.IsMap()) fail(node, key, "expected a mapping");
        for (const auto& entry : node) {
            const auto name = entry.first.as<std::string>();
            if (!allowed.count(name))
                fail(entry.first, key.empty() ? name : key + "." + name, "unknown key");
        }
    }

    template <typename T>
    T scalar(const YAML::Node& node, const std::string& key, const char* expected) const {
        if (!node.IsScalar()) fail(node, key, std::string("expected ") + expected);
        try {
            return node.as<T>();
        } catch (const YAML::Exception&) {
            fail(node, key, std::string("expected ") + expected + ", got '" + node.Scalar() + "'");
        }
    }

    double real(const YAML::Node& node, const std::string& key) const {
        if (node.IsScalar()) {
            try {
                return parse_double(node.Scalar());
            } catch (const InvalidInput&) {
            }
        }
        return scalar<double>(node, key, "a number");
    }

    template <typename T>
    std::vector<T> list(const YAML::Node& node, const std::string& key, const char* expected) const {
        std::vector<T> out;
        if (node.IsScalar()) {
            out.push_back(item<T>(node, key, expected));
            return out;
        }
        if (!node.IsSequence()) fail(node, key, std::string("expected a sequence of ") + expected);
        for (std::size_t i = 0; i < node.size(); ++i) {
            const YAML::Node entry = node[i];
            const std::string entry_key = key + "[" + std::to_string(i) + "]";
            if (entry.IsSequence()) {
                // Nested rows are flattened in row-major order.
                for (auto v : list<T>(entry, entry_key, expected)) out.push_back(v);
            } else {
                out.push_back(item<T>(entry, entry_key, expected));
            }
        }
        return out;
    }

    template <typename T>
    T item(const YAML::Node& node, const std::string& key, const char* expected) const {
        if constexpr (std::is_same_v<T, double>)
            return real(node, key);
        else
            return scalar<T>(node, key, expected);
    }

private:
    std::string source_;
};

ModelSection read_model(const Reader& r, const YAML::Node& node) {
    ModelSection m;
    r.require_map(node, "model", {"preset", "dim", "sigma", "drift", "lip", "x0"});
    if (node["x0"]) m.x0 = r.list<double>(node["x0"], "model.x0", "numbers");
    if (node["preset"]) {
        for (const char* key : {"dim", "sigma", "drift", "lip"})
            if (node[key]) r.fail(node[key], std::string("model.") + key, "not allowed together with model.preset");
        m.preset = r.scalar<std::string>(node["preset"], "model.preset", "a preset id");
        m.dim = 0;
        m.lip = 0.0;
        return m;
    }
    for (const char* key : {"dim", "sigma", "drift", "lip"})
        if (!node[key]) r.fail(node, std::string("model.") + key, "required for an inline model");
    m.dim = r.scalar<int>(node["dim"], "model.dim", "an integer");
    if (m.dim < 1 || m.dim > kMaxDim) r.fail(node["dim"], "model.dim", "must lie in [1, 8]");
    m.sigma = r.list<std::string>(node["sigma"], "model.sigma", "expressions");
    if (m.sigma.size() != static_cast<std::size_t>(m.dim * m.dim))
        r.fail(node["sigma"], "model.sigma", "needs dim*dim = " + std::to_string(m.dim * m.dim) + " entries");
    m.drift = r.list<std::string>(node["drift"], "model.drift", "expressions");
    const bool martingale = m.drift.size() == 1 && m.drift[0] == "martingale";
    if (!martingale && m.drift.size() != static_cast<std::size_t>(m.dim))
        r.fail(node["drift"], "model.drift", "needs dim entries or 'martingale'");
    m.lip = r.real(node["lip"], "model.lip");
    if (!m.x0.empty() && m.x0.size() != static_cast<std::size_t>(m.dim))
        r.fail(node["x0"], "model.x0", "needs dim entries");
    // Compile the expressions now so that syntax errors point into the file.
    for (std::size_t i = 0; i < m.sigma.size(); ++i) {
        try {
            Expression::parse(m.sigma[i], m.dim);
        } catch (const InvalidInput& e) {
            r.fail(node["sigma"], "model.sigma[" + std::to_string(i) + "]", e.what());
        }
    }
    if (!martingale) {
        for (std::size_t i = 0; i < m.drift.size(); ++i) {
            try {
                Expression::parse(m.drift[i], m.dim);
            } catch (const InvalidInput& e) {
                r.fail(node["drift"], "model.drift[" + std::to_string(i) + "]", e.what());
            }
        }
    }
    return m;
}

LawSection read_law(const Reader& r, const YAML::Node& node) {
    LawSection law;
    r.require_map(node, "law", {"preset", "atoms", "probabilities"});
    if (node["preset"]) {
        if (node["atoms"] || node["probabilities"])
            r.fail(node, "law.preset", "not allowed together with inline atoms");
        law.preset = r.scalar<std::string>(node["preset"], "law.preset", "a preset id");
        return law;
    }
    if (!node["atoms"] || !node["probabilities"]) r.fail(node, "law.atoms", "inline laws need atoms and probabilities");
    const YAML::Node atoms = node["atoms"];
    if (!atoms.IsSequence()) r.fail(atoms, "law.atoms", "expected a sequence");
    for (std::size_t i = 0; i < atoms.size(); ++i)
        law.atoms.push_back(r.list<double>(atoms[i], "law.atoms[" + std::to_string(i) + "]", "numbers"));
    law.probabilities = r.list<double>(node["probabilities"], "law.probabilities", "numbers");
    if (law.probabilities.size() != law.atoms.size())
        r.fail(node["probabilities"], "law.probabilities", "needs one entry per atom");
    return law;
}

PayoffSection read_payoff(const Reader& r, const YAML::Node& node) {
    PayoffSection p;
    r.require_map(node, "payoff", {"kind", "strike", "penalty", "profile", "constant", "statistic"});
    if (!node["kind"]) r.fail(node, "payoff.kind", "required");
    p.spec.kind = r.scalar<std::string>(node["kind"], "payoff.kind", "a payoff kind");
    if (node["strike"]) p.spec.strike = r.real(node["strike"], "payoff.strike");
    if (node["penalty"]) p.spec.penalty = r.real(node["penalty"], "payoff.penalty");
    if (node["constant"]) p.spec.constant = r.real(node["constant"], "payoff.constant");
    if (node["profile"]) {
        const auto profile = r.scalar<std::string>(node["profile"], "payoff.profile", "flat or linear");
        if (profile == "flat") p.spec.profile = PenaltyProfile::flat;
        else if (profile == "linear") p.spec.profile = PenaltyProfile::linear;
        else r.fail(node["profile"], "payoff.profile", "expected flat or linear, got '" + profile + "'");
    }
    if (node["statistic"]) {
        const auto text = r.scalar<std::string>(node["statistic"], "payoff.statistic", "a statistic");
        try {
            p.statistic = sufficient_statistic_from_string(text);
        } catch (const InvalidInput& e) {
            r.fail(node["statistic"], "payoff.statistic", e.what());
        }
    }
    PayoffPair pair;
    try {
        pair = make_payoff(p.spec);
    } catch (const InvalidInput& e) {
        r.fail(node, "payoff", e.what());
    }
    if (p.statistic && strength(*p.statistic) > strength(pair.statistic))
        r.fail(node["statistic"], "payoff.statistic", overclaim_message(pair, *p.statistic));
    return p;
}

RunSection read_run(const Reader& r, const YAML::Node& node) {
    RunSection run;
    r.require_map(node, "run",
                  {"steps", "steps_list", "reps", "seed", "node_cap", "recombine", "refine", "out", "jobs", "probes",
                   "probe_radius", "moment", "delta", "cf_samples", "dump_nodes", "studies"});
    auto positive_int = [&](const char* key, int& field) {
        if (!node[key]) return;
        field = r.scalar<int>(node[key], std::string("run.") + key, "an integer");
        if (field < 1) r.fail(node[key], std::string("run.") + key, "must be at least 1");
    };
    auto positive_size = [&](const char* key, std::size_t& field) {
        if (!node[key]) return;
        field = r.scalar<std::size_t>(node[key], std::string("run.") + key, "a positive integer");
        if (field < 1) r.fail(node[key], std::string("run.") + key, "must be at least 1");
    };
    auto positive_real = [&](const char* key, double& field) {
        if (!node[key]) return;
        field = r.real(node[key], std::string("run.") + key);
        if (!(field > 0.0)) r.fail(node[key], std::string("run.") + key, "must be positive");
    };
    if (node["steps"]) {
        run.steps = r.scalar<int>(node["steps"], "run.steps", "an integer");
        if (run.steps < 0) r.fail(node["steps"], "run.steps", "must be non-negative");
    }
    if (node["steps_list"]) {
        run.steps_list = r.list<int>(node["steps_list"], "run.steps_list", "integers");
        if (run.steps_list.empty()) r.fail(node["steps_list"], "run.steps_list", "must not be empty");
        for (int n : run.steps_list)
            if (n < 1) r.fail(node["steps_list"], "run.steps_list", "entries must be at least 1");
    }
    positive_size("reps", run.reps);
    if (node["seed"]) run.seed = r.scalar<std::uint64_t>(node["seed"], "run.seed", "an unsigned 64-bit integer");
    positive_size("node_cap", run.node_cap);
    if (node["recombine"]) run.recombine = r.scalar<bool>(node["recombine"], "run.recombine", "true or false");
    positive_int("refine", run.refine);
    if (node["out"]) run.out = r.scalar<std::string>(node["out"], "run.out", "a directory");
    positive_int("jobs", run.jobs);
    positive_int("probes", run.probes);
    positive_real("probe_radius", run.probe_radius);
    positive_real("moment", run.moment);
    positive_real("delta", run.delta);
    positive_size("cf_samples", run.cf_samples);
    if (node["dump_nodes"]) run.dump_nodes = r.scalar<bool>(node["dump_nodes"], "run.dump_nodes", "true or false");
    if (node["studies"]) {
        run.studies = r.list<std::string>(node["studies"], "run.studies", "study ids");
        for (const auto& s : run.studies) {
            bool known = false;
            for (const auto& id : all_studies()) known = known || id == s;
            if (!known) r.fail(node["studies"], "run.studies", "unknown study '" + s + "'");
        }
    }
    return run;
}

void emit_real(YAML::Emitter& out, double x) { out << format_double(x); }

void emit_reals(YAML::Emitter& out, const std::vector<double>& xs) {
    out << YAML::Flow << YAML::BeginSeq;
    for (double x : xs) emit_real(out, x);
    out << YAML::EndSeq;
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& source) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ConfigError(source + ":" + std::to_string(e.mark.line + 1) + ":" + std::to_string(e.mark.column + 1) +
                          ": malformed YAML: " + e.msg);
    }
    const Reader r(source);
    if (!root.IsMap()) r.fail(root, "", "the configuration must be a mapping with model, law, payoff and run");
    r.require_map(root, "", {"model", "law", "payoff", "run"});
    RunConfig config;
    for (const char* key : {"model", "law", "payoff"})
        if (!root[key]) r.fail(root, key, "required section is missing");
    config.model = read_model(r, root["model"]);
    config.law = read_law(r, root["law"]);
    config.payoff = read_payoff(r, root["payoff"]);
    if (root["run"]) config.run = read_run(r, root["run"]);
    return config;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open configuration '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str(), path);
}

std::string serialize_config(const RunConfig& c) {
    YAML::Emitter out;
    out << YAML::BeginMap;

    out << YAML::Key << "model" << YAML::Value << YAML::BeginMap;
    if (!c.model.preset.empty()) {
        out << YAML::Key << "preset" << YAML::Value << c.model.preset;
    } else {
        out << YAML::Key << "dim" << YAML::Value << c.model.dim;
        out << YAML::Key << "sigma" << YAML::Value << YAML::Flow << c.model.sigma;
        out << YAML::Key << "drift" << YAML::Value << YAML::Flow << c.model.drift;
        out << YAML::Key << "lip" << YAML::Value;
        emit_real(out, c.model.lip);
    }
    if (!c.model.x0.empty()) {
        out << YAML::Key << "x0" << YAML::Value;
        emit_reals(out, c.model.x0);
    }
    out << YAML::EndMap;

    out << YAML::Key << "law" << YAML::Value << YAML::BeginMap;
    if (!c.law.preset.empty()) {
        out << YAML::Key << "preset" << YAML::Value << c.law.preset;
    } else {
        out << YAML::Key << "atoms" << YAML::Value << YAML::BeginSeq;
        for (const auto& atom : c.law.atoms) emit_reals(out, atom);
        out << YAML::EndSeq;
        out << YAML::Key << "probabilities" << YAML::Value;
        emit_reals(out, c.law.probabilities);
    }
    out << YAML::EndMap;

    const PayoffSpec& s = c.payoff.spec;
    out << YAML::Key << "payoff" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "kind" << YAML::Value << s.kind;
    out << YAML::Key << "strike" << YAML::Value;
    emit_real(out, s.strike);
    out << YAML::Key << "penalty" << YAML::Value;
    emit_real(out, s.penalty);
    out << YAML::Key << "profile" << YAML::Value << (s.profile == PenaltyProfile::flat ? "flat" : "linear");
    out << YAML::Key << "constant" << YAML::Value;
    emit_real(out, s.constant);
    if (c.payoff.statistic) out << YAML::Key << "statistic" << YAML::Value << to_string(*c.payoff.statistic);
    out << YAML::EndMap;

    const RunSection& r = c.run;
    out << YAML::Key << "run" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "steps" << YAML::Value << r.steps;
    out << YAML::Key << "steps_list" << YAML::Value << YAML::Flow << r.steps_list;
    out << YAML::Key << "reps" << YAML::Value << r.reps;
    out << YAML::Key << "seed" << YAML::Value << r.seed;
    out << YAML::Key << "node_cap" << YAML::Value << r.node_cap;
    out << YAML::Key << "recombine" << YAML::Value << r.recombine;
    out << YAML::Key << "refine" << YAML::Value << r.refine;
    out << YAML::Key << "out" << YAML::Value << r.out;
    out << YAML::Key << "jobs" << YAML::Value << r.jobs;
    out << YAML::Key << "probes" << YAML::Value << r.probes;
    out << YAML::Key << "probe_radius" << YAML::Value;
    emit_real(out, r.probe_radius);
    out << YAML::Key << "moment" << YAML::Value;
    emit_real(out, r.moment);
    out << YAML::Key << "delta" << YAML::Value;
    emit_real(out, r.delta);
    out << YAML::Key << "cf_samples" << YAML::Value << r.cf_samples;
    out << YAML::Key << "dump_nodes" << YAML::Value << r.dump_nodes;
    out << YAML::Key << "studies" << YAML::Value << YAML::Flow << r.studies;
    out << YAML::EndMap;

    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

DiffusionModel build_model(const RunConfig& config) {
    const ModelSection& m = config.model;
    DiffusionModel model;
    if (!m.preset.empty()) {
        model = model_preset(m.preset);
    } else {
        model = model_from_expressions(m.dim, m.sigma, m.drift, m.lip, Vector::Zero(m.dim));
    }
    if (!m.x0.empty()) {
        if (m.x0.size() != static_cast<std::size_t>(model.dim))
            throw ConfigError("model.x0 has " + std::to_string(m.x0.size()) + " entries, model dimension is " +
                              std::to_string(model.dim));
        for (int i = 0; i < model.dim; ++i) model.x0[i] = m.x0[static_cast<std::size_t>(i)];
    }
    return model;
}

InnovationLaw build_law(const RunConfig& config) {
    const LawSection& l = config.law;
    if (!l.preset.empty()) return law_preset(l.preset);
    if (l.atoms.empty()) throw ConfigError("law: no atoms given");
    const int dim = static_cast<int>(l.atoms.front().size());
    std::vector<Vector> atoms;
    for (const auto& a : l.atoms) {
        if (static_cast<int>(a.size()) != dim) throw ConfigError("law.atoms: atoms have different dimensions");
        Vector v(dim);
        for (int i = 0; i < dim; ++i) v[i] = a[static_cast<std::size_t>(i)];
        atoms.push_back(v);
    }
    return InnovationLaw::finite(dim, std::move(atoms), l.probabilities, "inline");
}

PayoffPair build_payoff(const RunConfig& config) {
    PayoffPair pair = make_payoff(config.payoff.spec);
    if (config.payoff.statistic) {
        if (strength(*config.payoff.statistic) > strength(pair.statistic))
            throw ConfigError("payoff.statistic: " + overclaim_message(pair, *config.payoff.statistic));
        pair.statistic = *config.payoff.statistic;
    }
    return pair;
}

}  // namespace gameopt::cli
