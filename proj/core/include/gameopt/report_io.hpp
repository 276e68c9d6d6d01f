#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "gameopt/dynkin.hpp"
#include "gameopt/path.hpp"
#include "gameopt/tree.hpp"

namespace gameopt {

/// Version stamped into every file format written by the library.
inline constexpr int kFormatVersion = 1;
inline constexpr const char* kLibraryVersion = "1.0.0";

/// Shortest decimal that reads back to the same double; "nan", "inf", "-inf"
/// for non-finite values.
std::string format_double(double x);
/// Inverse of format_double. Throws InvalidInput on malformed text.
double parse_double(const std::string& text);

/// Versioned JSON document for a game value: value, per-level summaries of
/// V, stop-region sizes and first-stop probabilities of both players, an
/// independent sandwich audit and metadata. Node-level values are included
/// only when `include_nodes` is set. No timing information is written.
std::string game_report_json(const ScenarioTree& tree, const GameValueReport& report, bool include_nodes);

/// Largest F - V and V - G over all nodes, recomputed from the report.
struct SandwichAudit {
    double lower_excess = 0.0;   // max(F - V), <= 0 when the sandwich holds
    double upper_excess = 0.0;   // max(V - G)
    double terminal_gap = 0.0;   // max |V - F| over leaves
    bool holds() const noexcept { return lower_excess <= 0.0 && upper_excess <= 0.0 && terminal_gap == 0.0; }
};
SandwichAudit audit_sandwich(const ScenarioTree& tree, const GameValueReport& report);

/// Path CSV: a "# gameopt-path" comment line with version, dimension, step
/// count and recorded fields, a column header, then one row per grid time:
/// step, time, x1..xd, and when recorded xi1..xid (empty on row 0) and atom.
void write_path_csv(std::ostream& out, const DiscretePath& path);
DiscretePath read_path_csv(std::istream& in);

/// Binary batch: magic "GOPB", then version, dim, steps, flags and path count
/// in little-endian order, followed by the raw doubles and atom indices of
/// every path. All paths of a batch share dim, steps and recorded fields.
void write_path_batch(std::ostream& out, std::span<const DiscretePath> paths);
std::vector<DiscretePath> read_path_batch(std::istream& in);

}  // namespace gameopt
