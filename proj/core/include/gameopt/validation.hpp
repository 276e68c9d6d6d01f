#pragma once

#include <string>
#include <vector>

namespace gameopt {

/// One checked inequality. `margin` is the worst observed value of
/// (left-hand side - right-hand side); the check passes when the margin does
/// not exceed the stated tolerance.
struct Check {
    std::string name;
    double margin = 0.0;
    double tolerance = 0.0;
    bool passed = true;
    std::string witness;
};

struct ValidationReport {
    std::string subject;
    std::string probe_description;
    std::vector<Check> checks;
    std::vector<std::string> flags;

    bool passed() const noexcept {
        for (const auto& c : checks)
            if (!c.passed) return false;
        return true;
    }

    const Check* find(const std::string& name) const noexcept {
        for (const auto& c : checks)
            if (c.name == name) return &c;
        return nullptr;
    }

    void add(std::string name, double margin, double tolerance, std::string witness = {}) {
        checks.push_back({std::move(name), margin, tolerance, margin <= tolerance, std::move(witness)});
    }

    /// Deterministic JSON rendering (fixed key order, round-trip doubles).
    std::string to_json() const;
};

}  // namespace gameopt
