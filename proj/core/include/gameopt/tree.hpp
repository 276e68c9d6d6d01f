#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "gameopt/model.hpp"
#include "gameopt/path.hpp"
#include "gameopt/payoff.hpp"

namespace gameopt {

/// Options for scenario-tree construction.
struct TreeOptions {
    std::size_t node_cap = 1'000'000;
    /// Merge nodes that agree on `statistic` at the same level.
    bool recombine = false;
    /// Sufficient statistic declared by the payoff to be priced; merging on
    /// `none` is refused.
    SufficientStatistic statistic = SufficientStatistic::none;
    /// Grid on which states (and running maxima) are compared when merging.
    double quantum = 1e-10;
};

/// Probability-weighted tree of chain states. Nodes are numbered level by
/// level; the children of internal node v occupy child(v, 0..m-1), one per
/// innovation atom.
class ScenarioTree {
public:
    static constexpr std::size_t kNoParent = static_cast<std::size_t>(-1);

    int depth() const noexcept { return depth_; }
    int dim() const noexcept { return dim_; }
    std::size_t branching() const noexcept { return probabilities_.size(); }
    std::size_t size() const noexcept { return parent_.size(); }
    bool recombined() const noexcept { return merged_on_ != SufficientStatistic::none; }
    SufficientStatistic merged_on() const noexcept { return merged_on_; }

    std::size_t level_begin(int n) const noexcept { return level_begin_[static_cast<std::size_t>(n)]; }
    std::size_t level_end(int n) const noexcept { return level_begin_[static_cast<std::size_t>(n) + 1]; }
    int level(std::size_t v) const noexcept { return level_[v]; }
    bool is_leaf(std::size_t v) const noexcept { return level_[v] == depth_; }
    std::size_t parent(std::size_t v) const noexcept { return parent_[v]; }
    std::size_t child(std::size_t v, std::size_t atom) const noexcept {
        return children_[v * branching() + atom];
    }
    const std::vector<double>& probabilities() const noexcept { return probabilities_; }

    double state(std::size_t v, int i) const noexcept { return states_[v * static_cast<std::size_t>(dim_) + i]; }
    Vector state(std::size_t v) const;

    /// States along the (representative) root-to-v path, (level + 1) * dim values.
    void path_to(std::size_t v, std::vector<double>& out) const;

    /// Probability of reaching each node from the root (merged nodes add up).
    std::vector<double> reach_probabilities() const;

    /// Node reached by following the atom sequence from the root.
    std::size_t follow(const std::uint32_t* atoms, int count) const noexcept;

    friend ScenarioTree build_tree(const DiffusionModel&, const InnovationLaw&, int, const TreeOptions&);

private:
    int depth_ = 0;
    int dim_ = 1;
    SufficientStatistic merged_on_ = SufficientStatistic::none;
    std::vector<double> probabilities_;
    std::vector<double> states_;
    std::vector<std::size_t> parent_;
    std::vector<int> level_;
    std::vector<std::size_t> level_begin_;
    std::vector<std::size_t> children_;
};

/// Number of nodes of the full m-ary tree of depth N, saturating at +inf.
double full_tree_size(std::size_t branching, int depth) noexcept;

/// Tree options for pricing `payoff`, recombining when requested.
TreeOptions tree_options_for(const PayoffPair& payoff, bool recombine, std::size_t node_cap);

/// Builds the scenario tree of the chain for a finitely supported law.
/// Throws InfeasibleError (with the required node count) when the tree would
/// exceed options.node_cap, UnsupportedLaw for Gaussian innovations, and
/// InvalidInput when recombination is requested without a sufficient
/// statistic.
ScenarioTree build_tree(const DiffusionModel& model, const InnovationLaw& law, int depth,
                        const TreeOptions& options = {});

}  // namespace gameopt
