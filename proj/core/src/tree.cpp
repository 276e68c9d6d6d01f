#include "gameopt/tree.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <map>

#include "gameopt/scheme.hpp"

namespace gameopt {

namespace {

std::string count_text(double count) {
    if (count < 1e18) return std::to_string(static_cast<unsigned long long>(count));
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.3g", count);
    return buffer;
}

}  // namespace

Vector ScenarioTree::state(std::size_t v) const {
    Vector x(dim_);
    for (int i = 0; i < dim_; ++i) x[i] = state(v, i);
    return x;
}

void ScenarioTree::path_to(std::size_t v, std::vector<double>& out) const {
    const int n = level_[v];
    out.resize(static_cast<std::size_t>((n + 1) * dim_));
    for (int k = n; k >= 0; --k) {
        for (int i = 0; i < dim_; ++i) out[static_cast<std::size_t>(k * dim_ + i)] = state(v, i);
        v = parent_[v];
    }
}

std::vector<double> ScenarioTree::reach_probabilities() const {
    std::vector<double> reach(size(), 0.0);
    reach[0] = 1.0;
    const std::size_t m = branching();
    for (std::size_t v = 0; v < level_begin(depth_); ++v)
        for (std::size_t a = 0; a < m; ++a) reach[child(v, a)] += reach[v] * probabilities_[a];
    return reach;
}

std::size_t ScenarioTree::follow(const std::uint32_t* atoms, int count) const noexcept {
    std::size_t v = 0;
    for (int k = 0; k < count; ++k) v = child(v, atoms[k]);
    return v;
}

double full_tree_size(std::size_t branching, int depth) noexcept {
    double total = 0.0;
    double level = 1.0;
    for (int n = 0; n <= depth; ++n) {
        total += level;
        level *= static_cast<double>(branching);
        if (!std::isfinite(total)) return std::numeric_limits<double>::infinity();
    }
    return total;
}

TreeOptions tree_options_for(const PayoffPair& payoff, bool recombine, std::size_t node_cap) {
    TreeOptions options;
    options.node_cap = node_cap;
    options.recombine = recombine;
    options.statistic = payoff.statistic;
    return options;
}

ScenarioTree build_tree(const DiffusionModel& model, const InnovationLaw& law, int depth,
                        const TreeOptions& options) {
    if (!law.is_finite())
        throw UnsupportedLaw("scenario trees need a finitely supported innovation law, got '" + law.id() + "'");
    if (law.dim() != model.dim) throw ShapeError("law and model dimensions differ");
    if (depth < 0) throw InvalidInput("tree depth must be non-negative");
    if (options.recombine && options.statistic == SufficientStatistic::none)
        throw InvalidInput(
            "recombination requested for a path-dependent payoff without a declared sufficient statistic");
    model.check_shapes();

    const std::size_t m = law.atom_count();
    const int d = model.dim;
    if (!options.recombine) {
        const double required = full_tree_size(m, depth);
        if (required > static_cast<double>(options.node_cap))
            throw InfeasibleError("scenario tree needs " + count_text(required) + " nodes, cap is " +
                                      std::to_string(options.node_cap),
                                  required);
    }

    ScenarioTree tree;
    tree.depth_ = depth;
    tree.dim_ = d;
    tree.merged_on_ = options.recombine ? options.statistic : SufficientStatistic::none;
    tree.probabilities_ = law.probabilities();
    for (int i = 0; i < d; ++i) tree.states_.push_back(model.x0[i]);
    tree.parent_.push_back(ScenarioTree::kNoParent);
    tree.level_.push_back(0);
    tree.level_begin_ = {0, 1};

    const bool track_max = tree.merged_on_ == SufficientStatistic::running_max;
    auto basket = [d](const Vector& x) {
        double s = 0.0;
        for (int i = 0; i < d; ++i) s += std::exp(x[i]);
        return s / d;
    };
    std::vector<double> running_max{track_max ? basket(model.x0) : 0.0};

    const double dt = 1.0 / std::max(depth, 1);
    for (int n = 0; n < depth; ++n) {
        std::map<std::vector<long long>, std::size_t> seen;
        const std::size_t begin = tree.level_begin_[static_cast<std::size_t>(n)];
        const std::size_t end = tree.level_begin_[static_cast<std::size_t>(n) + 1];
        tree.children_.resize(end * m);
        for (std::size_t v = begin; v < end; ++v) {
            const Vector x = tree.state(v);
            for (std::size_t a = 0; a < m; ++a) {
                const Vector y = x + increment(model, x, law.atoms()[a], dt);
                const double y_max = track_max ? std::max(running_max[v], basket(y)) : 0.0;
                if (tree.recombined()) {
                    std::vector<long long> key(static_cast<std::size_t>(d) + (track_max ? 1 : 0));
                    for (int i = 0; i < d; ++i)
                        key[static_cast<std::size_t>(i)] = std::llround(y[i] / options.quantum);
                    if (track_max) key.back() = std::llround(y_max / options.quantum);
                    const auto [it, inserted] = seen.try_emplace(std::move(key), tree.parent_.size());
                    if (!inserted) {
                        tree.children_[v * m + a] = it->second;
                        continue;
                    }
                }
                const std::size_t id = tree.parent_.size();
                if (id + 1 > options.node_cap)
                    throw InfeasibleError("scenario tree exceeds the node cap of " +
                                              std::to_string(options.node_cap) + " at level " +
                                              std::to_string(n + 1),
                                          static_cast<double>(id + 1));
                tree.children_[v * m + a] = id;
                tree.parent_.push_back(v);
                tree.level_.push_back(n + 1);
                for (int i = 0; i < d; ++i) tree.states_.push_back(y[i]);
                running_max.push_back(y_max);
            }
        }
        tree.level_begin_.push_back(tree.parent_.size());
    }
    return tree;
}

}  // namespace gameopt
