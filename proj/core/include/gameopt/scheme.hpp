#pragma once

#include <cstdint>
#include <vector>

#include "gameopt/model.hpp"
#include "gameopt/path.hpp"

namespace gameopt {

/// sqrt(dt) sigma(x) z + dt b(x): the increment shared by the chain (dt = 1/N,
/// z = xi) and the fine diffusion reference (dt = 1/M, z = standardized
/// Brownian increment).
Vector increment(const DiffusionModel& model, const Vector& x, const Vector& z, double dt);

/// One transition of the chain: x + N^{-1/2} sigma(x) xi + N^{-1} b(x).
Vector step(const Vector& x, const Vector& xi, const DiffusionModel& model, int n_steps);

/// Simulates the chain with innovations drawn from `law` on replication
/// stream `stream`; the innovations (and atom indices, for finite laws) are
/// recorded.
DiscretePath simulate_path(const DiffusionModel& model, const InnovationLaw& law, int n_steps,
                           std::uint64_t seed, std::uint64_t stream = 0);

/// Recomputes the states of `path` from x0 and its recorded innovations.
DiscretePath replay_path(const DiffusionModel& model, const DiscretePath& path);

/// Block structure n_k = k q with q = floor(N^{1/4}).
struct BlockPartition {
    int n_steps = 1;
    int block = 1;      // q
    int full_blocks = 0; // k_N = floor(N / q)
    int k_max = 0;      // k_N, or k_N + 1 when a tail block ends at N
    bool has_tail = false;

    /// n_k for k = 0..k_max (the last entry is N).
    int end(int k) const noexcept { return k >= k_max ? n_steps : k * block; }
    std::vector<int> block_times() const;
    bool is_block_time(int n) const noexcept { return n == n_steps || n % block == 0; }
    /// Delta(N) = q / N.
    double delta() const noexcept { return static_cast<double>(block) / n_steps; }
};

/// Largest q with q^4 <= n, computed in integers.
int integer_fourth_root(std::int64_t n);

BlockPartition block_partition(int n_steps);

/// The block-frozen process: increments of block k use sigma and b evaluated
/// at the chain state X_N(n_k / N), driven by the same innovations.
DiscretePath coarse_path(const DiscretePath& path, const DiffusionModel& model,
                         const BlockPartition& partition);

/// Chain driven by Gaussian innovations together with a fine Euler reference
/// on an M-point grid whose Brownian increments over each chain step sum to
/// N^{-1/2} xi(n). Between chain times the Brownian path is filled in by
/// bridge sampling.
struct CoupledPair {
    DiscretePath chain;
    int refine = 1;                       // M / N
    std::vector<double> reference;        // (M + 1) * dim fine states
    std::vector<double> brownian_steps;   // M * dim fine Brownian increments

    int fine_steps() const noexcept { return chain.steps * refine; }
    int dim() const noexcept { return chain.dim; }
    Vector reference_state(int j) const {
        Vector v(dim());
        for (int i = 0; i < dim(); ++i) v[i] = reference[static_cast<std::size_t>(j * dim() + i)];
        return v;
    }

    /// sup over the fine grid of |X_N(t) - Xi(t)|^2, where both one-sided
    /// values of the piecewise-constant chain are compared at chain times
    /// (the reference is treated as continuous between fine points).
    double sup_squared_error() const;
    /// Largest |X_N(n/N) - Xi(n/N)| over chain times.
    double max_grid_discrepancy() const;

    friend bool operator==(const CoupledPair&, const CoupledPair&) = default;
};

/// Builds a CoupledPair for fine grid size `fine_steps` (a multiple of
/// `n_steps`). Throws InvalidInput otherwise.
CoupledPair coupled_pair(const DiffusionModel& model, int n_steps, int fine_steps, std::uint64_t seed,
                         std::uint64_t stream = 0);

}  // namespace gameopt
