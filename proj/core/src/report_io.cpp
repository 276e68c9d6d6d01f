#include "gameopt/report_io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "json.hpp"

#include "gameopt/validation.hpp"

namespace gameopt {

using nlohmann::ordered_json;

namespace {

ordered_json number_or_string(double x) {
    if (std::isfinite(x)) return x;
    return format_double(x);
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, sep)) out.push_back(field);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

int parse_int(const std::string& text, const std::string& what) {
    int value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        throw InvalidInput("path csv: bad " + what + " '" + text + "'");
    return value;
}

constexpr char kMagic[4] = {'G', 'O', 'P', 'B'};
constexpr std::uint32_t kHasInnovations = 1u;
constexpr std::uint32_t kHasAtoms = 2u;

void put_u64(std::ostream& out, std::uint64_t v) {
    char bytes[8];
    for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xFFu);
    out.write(bytes, 8);
}

void put_u32(std::ostream& out, std::uint32_t v) {
    char bytes[4];
    for (int i = 0; i < 4; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xFFu);
    out.write(bytes, 4);
}

std::uint64_t get_u64(std::istream& in) {
    unsigned char bytes[8];
    if (!in.read(reinterpret_cast<char*>(bytes), 8)) throw InvalidInput("path batch: truncated file");
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | bytes[i];
    return v;
}

std::uint32_t get_u32(std::istream& in) {
    unsigned char bytes[4];
    if (!in.read(reinterpret_cast<char*>(bytes), 4)) throw InvalidInput("path batch: truncated file");
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | bytes[i];
    return v;
}

}  // namespace

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buffer[64];
    const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, x);
    return std::string(buffer, ptr);
}

double parse_double(const std::string& text) {
    if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (text == "inf") return std::numeric_limits<double>::infinity();
    if (text == "-inf") return -std::numeric_limits<double>::infinity();
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        throw InvalidInput("not a number: '" + text + "'");
    return value;
}

std::string ValidationReport::to_json() const {
    ordered_json doc;
    doc["subject"] = subject;
    doc["probes"] = probe_description;
    doc["passed"] = passed();
    doc["checks"] = ordered_json::array();
    for (const auto& c : checks) {
        doc["checks"].push_back({{"name", c.name},
                                 {"margin", number_or_string(c.margin)},
                                 {"tolerance", number_or_string(c.tolerance)},
                                 {"passed", c.passed},
                                 {"witness", c.witness}});
    }
    doc["flags"] = flags;
    return doc.dump(2) + "\n";
}

SandwichAudit audit_sandwich(const ScenarioTree& tree, const GameValueReport& report) {
    if (report.node_values.size() != tree.size())
        throw InvalidInput("audit_sandwich: report was not produced from this tree");
    SandwichAudit audit;
    audit.lower_excess = -std::numeric_limits<double>::infinity();
    audit.upper_excess = -std::numeric_limits<double>::infinity();
    for (std::size_t v = 0; v < tree.size(); ++v) {
        const double value = report.node_values[v];
        audit.lower_excess = std::max(audit.lower_excess, report.lower[v] - value);
        audit.upper_excess = std::max(audit.upper_excess, value - report.upper[v]);
        if (tree.is_leaf(v)) audit.terminal_gap = std::max(audit.terminal_gap, std::abs(value - report.lower[v]));
    }
    return audit;
}

std::string game_report_json(const ScenarioTree& tree, const GameValueReport& report, bool include_nodes) {
    if (report.node_values.size() != tree.size())
        throw InvalidInput("game_report_json: report was not produced from this tree");
    const std::size_t m = tree.branching();
    const auto& p = tree.probabilities();

    // First-stop probabilities of each player playing alone against "never stop".
    auto first_stop = [&](const std::vector<std::uint8_t>& stop) {
        std::vector<double> mass(tree.size(), 0.0), by_level(static_cast<std::size_t>(tree.depth()) + 1, 0.0);
        mass[0] = 1.0;
        for (std::size_t v = 0; v < tree.size(); ++v) {
            if (mass[v] == 0.0) continue;
            if (stop[v] || tree.is_leaf(v)) {
                if (stop[v]) by_level[static_cast<std::size_t>(tree.level(v))] += mass[v];
                continue;
            }
            for (std::size_t a = 0; a < m; ++a) mass[tree.child(v, a)] += mass[v] * p[a];
        }
        return by_level;
    };
    const auto min_first = first_stop(report.minimizer_stop);
    const auto max_first = first_stop(report.maximizer_stop);
    const auto reach = tree.reach_probabilities();

    ordered_json doc;
    doc["format"] = "gameopt-value";
    doc["version"] = kFormatVersion;
    doc["value"] = report.value;
    ordered_json meta;
    meta["steps"] = report.steps;
    meta["branching"] = report.branching;
    meta["recombined"] = report.recombined;
    meta["nodes"] = tree.size();
    meta["model"] = report.model_id;
    meta["law"] = report.law_id;
    meta["payoff"] = report.payoff_id;
    doc["metadata"] = meta;

    const SandwichAudit audit = audit_sandwich(tree, report);
    doc["sandwich"] = {{"max_lower_minus_value", number_or_string(audit.lower_excess)},
                       {"max_value_minus_upper", number_or_string(audit.upper_excess)},
                       {"max_terminal_gap", audit.terminal_gap},
                       {"holds", audit.holds()}};

    doc["levels"] = ordered_json::array();
    for (int n = 0; n <= tree.depth(); ++n) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        double mean = 0.0;
        std::size_t min_count = 0, max_count = 0;
        for (std::size_t v = tree.level_begin(n); v < tree.level_end(n); ++v) {
            lo = std::min(lo, report.node_values[v]);
            hi = std::max(hi, report.node_values[v]);
            mean += reach[v] * report.node_values[v];
            min_count += report.minimizer_stop[v];
            max_count += report.maximizer_stop[v];
        }
        const auto level = static_cast<std::size_t>(n);
        doc["levels"].push_back({{"level", n},
                                 {"time", tree.depth() == 0 ? 1.0 : static_cast<double>(n) / tree.depth()},
                                 {"nodes", tree.level_end(n) - tree.level_begin(n)},
                                 {"value_min", lo},
                                 {"value_max", hi},
                                 {"value_mean", mean},
                                 {"cancel_region_nodes", min_count},
                                 {"exercise_region_nodes", max_count},
                                 {"cancel_first_probability", min_first[level]},
                                 {"exercise_first_probability", max_first[level]}});
    }

    if (include_nodes) {
        ordered_json nodes = ordered_json::array();
        for (std::size_t v = 0; v < tree.size(); ++v) {
            ordered_json state = ordered_json::array();
            for (int i = 0; i < tree.dim(); ++i) state.push_back(tree.state(v, i));
            nodes.push_back({{"id", v},
                             {"level", tree.level(v)},
                             {"state", state},
                             {"value", report.node_values[v]},
                             {"lower", report.lower[v]},
                             {"upper", report.upper[v]},
                             {"cancel", report.minimizer_stop[v] != 0},
                             {"exercise", report.maximizer_stop[v] != 0}});
        }
        doc["nodes"] = std::move(nodes);
    }
    return doc.dump(2) + "\n";
}

void write_path_csv(std::ostream& out, const DiscretePath& path) {
    const bool xi = path.has_innovations();
    const bool atoms = !path.atoms.empty();
    out << "# gameopt-path v" << kFormatVersion << " dim=" << path.dim << " steps=" << path.steps
        << " innovations=" << (xi ? 1 : 0) << " atoms=" << (atoms ? 1 : 0) << "\n";
    out << "step,time";
    for (int i = 1; i <= path.dim; ++i) out << ",x" << i;
    if (xi)
        for (int i = 1; i <= path.dim; ++i) out << ",xi" << i;
    if (atoms) out << ",atom";
    out << "\n";
    for (int n = 0; n <= path.steps; ++n) {
        out << n << "," << format_double(path.steps == 0 ? 1.0 : path.time(n));
        for (int i = 0; i < path.dim; ++i)
            out << "," << format_double(path.states[static_cast<std::size_t>(n * path.dim + i)]);
        if (xi)
            for (int i = 0; i < path.dim; ++i)
                out << "," << (n == 0 ? std::string() : format_double(path.innovations[static_cast<std::size_t>((n - 1) * path.dim + i)]));
        if (atoms) out << "," << (n == 0 ? std::string() : std::to_string(path.atoms[static_cast<std::size_t>(n - 1)]));
        out << "\n";
    }
}

DiscretePath read_path_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("# gameopt-path v", 0) != 0)
        throw InvalidInput("path csv: missing '# gameopt-path' header");
    DiscretePath path;
    int version = 0, xi = 0, atoms = 0;
    for (const auto& token : split(line.substr(2), ' ')) {
        const auto eq = token.find('=');
        if (token.rfind("gameopt-path", 0) == 0 || token.empty()) continue;
        if (token[0] == 'v' && eq == std::string::npos) {
            version = parse_int(token.substr(1), "version");
            continue;
        }
        if (eq == std::string::npos) throw InvalidInput("path csv: bad header token '" + token + "'");
        const std::string key = token.substr(0, eq);
        const int value = parse_int(token.substr(eq + 1), key);
        if (key == "dim") path.dim = value;
        else if (key == "steps") path.steps = value;
        else if (key == "innovations") xi = value;
        else if (key == "atoms") atoms = value;
        else throw InvalidInput("path csv: unknown header key '" + key + "'");
    }
    if (version != kFormatVersion)
        throw InvalidInput("path csv: unsupported version " + std::to_string(version));
    check_dim(path.dim);
    if (path.steps < 0) throw InvalidInput("path csv: negative step count");
    if (!std::getline(in, line)) throw InvalidInput("path csv: missing column header");
    const std::size_t columns = 2 + static_cast<std::size_t>(path.dim) * (xi ? 2 : 1) + (atoms ? 1 : 0);
    if (split(line, ',').size() != columns) throw InvalidInput("path csv: column header does not match the header line");

    const auto d = static_cast<std::size_t>(path.dim);
    path.states.resize((static_cast<std::size_t>(path.steps) + 1) * d);
    if (xi) path.innovations.resize(static_cast<std::size_t>(path.steps) * d);
    if (atoms) path.atoms.resize(static_cast<std::size_t>(path.steps));
    for (int n = 0; n <= path.steps; ++n) {
        if (!std::getline(in, line)) throw InvalidInput("path csv: expected " + std::to_string(path.steps + 1) + " rows");
        const auto fields = split(line, ',');
        if (fields.size() != columns)
            throw InvalidInput("path csv: row " + std::to_string(n) + " has " + std::to_string(fields.size()) +
                               " fields, expected " + std::to_string(columns));
        if (parse_int(fields[0], "step") != n) throw InvalidInput("path csv: rows out of order at " + std::to_string(n));
        std::size_t f = 2;
        for (std::size_t i = 0; i < d; ++i) path.states[static_cast<std::size_t>(n) * d + i] = parse_double(fields[f++]);
        if (xi) {
            for (std::size_t i = 0; i < d; ++i, ++f)
                if (n > 0) path.innovations[static_cast<std::size_t>(n - 1) * d + i] = parse_double(fields[f]);
        }
        if (atoms && n > 0) path.atoms[static_cast<std::size_t>(n - 1)] = static_cast<std::uint32_t>(parse_int(fields[f], "atom"));
    }
    return path;
}

void write_path_batch(std::ostream& out, std::span<const DiscretePath> paths) {
    const DiscretePath empty;
    const DiscretePath& first = paths.empty() ? empty : paths.front();
    std::uint32_t flags = 0;
    if (first.has_innovations()) flags |= kHasInnovations;
    if (!first.atoms.empty()) flags |= kHasAtoms;
    for (const auto& p : paths) {
        const bool same = p.dim == first.dim && p.steps == first.steps &&
                          p.has_innovations() == first.has_innovations() && p.atoms.empty() == first.atoms.empty();
        if (!same) throw InvalidInput("path batch: all paths must share dimension, steps and recorded fields");
    }
    out.write(kMagic, 4);
    put_u32(out, kFormatVersion);
    put_u32(out, static_cast<std::uint32_t>(first.dim));
    put_u32(out, static_cast<std::uint32_t>(first.steps));
    put_u32(out, flags);
    put_u64(out, paths.size());
    for (const auto& p : paths) {
        for (double x : p.states) put_u64(out, std::bit_cast<std::uint64_t>(x));
        for (double x : p.innovations) put_u64(out, std::bit_cast<std::uint64_t>(x));
        for (std::uint32_t a : p.atoms) put_u32(out, a);
    }
}

std::vector<DiscretePath> read_path_batch(std::istream& in) {
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
        throw InvalidInput("path batch: bad magic");
    const std::uint32_t version = get_u32(in);
    if (version != static_cast<std::uint32_t>(kFormatVersion))
        throw InvalidInput("path batch: unsupported version " + std::to_string(version));
    const auto dim = static_cast<int>(get_u32(in));
    const auto steps = static_cast<int>(get_u32(in));
    const std::uint32_t flags = get_u32(in);
    const std::uint64_t count = get_u64(in);
    check_dim(dim);
    if (steps < 0) throw InvalidInput("path batch: negative step count");
    std::vector<DiscretePath> paths;
    for (std::uint64_t c = 0; c < count; ++c) {
        DiscretePath p;
        p.dim = dim;
        p.steps = steps;
        p.states.resize(static_cast<std::size_t>(steps + 1) * static_cast<std::size_t>(dim));
        for (double& x : p.states) x = std::bit_cast<double>(get_u64(in));
        if (flags & kHasInnovations) {
            p.innovations.resize(static_cast<std::size_t>(steps) * static_cast<std::size_t>(dim));
            for (double& x : p.innovations) x = std::bit_cast<double>(get_u64(in));
        }
        if (flags & kHasAtoms) {
            p.atoms.resize(static_cast<std::size_t>(steps));
            for (auto& a : p.atoms) a = get_u32(in);
        }
        paths.push_back(std::move(p));
    }
    return paths;
}

}  // namespace gameopt
