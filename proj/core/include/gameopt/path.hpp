#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gameopt/types.hpp"

namespace gameopt {

/// Read-only view of a path prefix X(0), X(1/N), ..., X(n/N) with the
/// piecewise-constant convention X(t) = X(floor(N t)/N).
class PathView {
public:
    PathView(std::span<const double> states, int dim, int steps)
        : states_(states), dim_(dim), steps_(steps) {}

    int dim() const noexcept { return dim_; }
    /// Grid size N of the underlying path.
    int steps() const noexcept { return steps_; }
    /// Index n of the last state in the prefix.
    int index() const noexcept { return static_cast<int>(states_.size()) / dim_ - 1; }
    /// n / N; a zero-step path sits at the terminal time 1.
    double time() const noexcept {
        return steps_ == 0 ? 1.0 : static_cast<double>(index()) / steps_;
    }

    double at(int k, int i) const noexcept {
        return states_[static_cast<std::size_t>(k * dim_ + i)];
    }
    Vector state(int k) const {
        Vector v(dim_);
        for (int i = 0; i < dim_; ++i) v[i] = at(k, i);
        return v;
    }
    Vector current() const { return state(index()); }
    double norm(int k) const noexcept;

    /// Prefix ending at grid index k <= index().
    PathView prefix(int k) const noexcept {
        return PathView(states_.first(static_cast<std::size_t>((k + 1) * dim_)), dim_, steps_);
    }

    std::span<const double> raw() const noexcept { return states_; }

private:
    std::span<const double> states_;
    int dim_;
    int steps_;
};

/// A realization of the chain on the grid {n/N}: N+1 states and, when
/// available, the innovations that produced them.
struct DiscretePath {
    int dim = 1;
    int steps = 0;
    std::vector<double> states;       // (steps + 1) * dim, row per time
    std::vector<double> innovations;  // steps * dim, row n holds xi(n + 1); empty if unrecorded
    std::vector<std::uint32_t> atoms; // steps atom indices; empty for Gaussian or unrecorded

    bool has_innovations() const noexcept { return !innovations.empty(); }
    double time(int n) const noexcept { return static_cast<double>(n) / steps; }

    Vector state(int n) const {
        Vector v(dim);
        for (int i = 0; i < dim; ++i) v[i] = states[static_cast<std::size_t>(n * dim + i)];
        return v;
    }
    Vector innovation(int n) const {
        Vector v(dim);
        for (int i = 0; i < dim; ++i) v[i] = innovations[static_cast<std::size_t>((n - 1) * dim + i)];
        return v;
    }
    /// Piecewise-constant value: state(floor(N t)) on [0, 1), state(N) at 1.
    Vector value_at(double t) const;

    PathView view() const noexcept { return PathView(states, dim, steps); }
    PathView view(int n) const noexcept { return view().prefix(n); }

    friend bool operator==(const DiscretePath&, const DiscretePath&) = default;
};

}  // namespace gameopt
