#include "gameopt/scheme.hpp"

#include <algorithm>
#include <cmath>

#include "gameopt/rng.hpp"

namespace gameopt {

double PathView::norm(int k) const noexcept {
    double s = 0.0;
    for (int i = 0; i < dim_; ++i) s += at(k, i) * at(k, i);
    return std::sqrt(s);
}

Vector DiscretePath::value_at(double t) const {
    if (t >= 1.0) return state(steps);
    const int n = std::clamp(static_cast<int>(std::floor(t * steps)), 0, steps);
    return state(n);
}

Vector increment(const DiffusionModel& model, const Vector& x, const Vector& z, double dt) {
    return std::sqrt(dt) * (model.sigma_at(x) * z) + dt * model.drift_at(x);
}

Vector step(const Vector& x, const Vector& xi, const DiffusionModel& model, int n_steps) {
    if (n_steps < 1) throw InvalidInput("step: N must be at least 1");
    if (x.size() != model.dim || xi.size() != model.dim)
        throw ShapeError("step: state has dimension " + std::to_string(x.size()) +
                         ", innovation " + std::to_string(xi.size()) + ", model " +
                         std::to_string(model.dim));
    return x + increment(model, x, xi, 1.0 / n_steps);
}

namespace {

void put_row(std::vector<double>& rows, int row, const Vector& v) {
    for (int i = 0; i < v.size(); ++i) rows[static_cast<std::size_t>(row * v.size() + i)] = v[i];
}

}  // namespace

DiscretePath simulate_path(const DiffusionModel& model, const InnovationLaw& law, int n_steps,
                           std::uint64_t seed, std::uint64_t stream) {
    if (n_steps < 1) throw InvalidInput("simulate_path: N must be at least 1");
    if (law.dim() != model.dim)
        throw ShapeError("law dimension " + std::to_string(law.dim()) + " differs from model dimension " +
                         std::to_string(model.dim));
    const int d = model.dim;
    DiscretePath path;
    path.dim = d;
    path.steps = n_steps;
    path.states.resize(static_cast<std::size_t>((n_steps + 1) * d));
    path.innovations.resize(static_cast<std::size_t>(n_steps * d));
    if (law.is_finite()) path.atoms.resize(static_cast<std::size_t>(n_steps));

    RandomStream rng(seed, stream, Substream::innovations);
    const double dt = 1.0 / n_steps;
    Vector x = model.x0;
    put_row(path.states, 0, x);
    for (int n = 0; n < n_steps; ++n) {
        std::size_t atom = 0;
        const Vector xi = law.draw(rng, atom);
        x = x + increment(model, x, xi, dt);
        put_row(path.states, n + 1, x);
        put_row(path.innovations, n, xi);
        if (law.is_finite()) path.atoms[static_cast<std::size_t>(n)] = static_cast<std::uint32_t>(atom);
    }
    return path;
}

DiscretePath replay_path(const DiffusionModel& model, const DiscretePath& path) {
    if (!path.has_innovations()) throw InvalidInput("replay_path: path has no recorded innovations");
    if (path.dim != model.dim) throw ShapeError("replay_path: path and model dimensions differ");
    DiscretePath out = path;
    const double dt = 1.0 / path.steps;
    Vector x = model.x0;
    put_row(out.states, 0, x);
    for (int n = 1; n <= path.steps; ++n) {
        x = x + increment(model, x, path.innovation(n), dt);
        put_row(out.states, n, x);
    }
    return out;
}

int integer_fourth_root(std::int64_t n) {
    if (n < 1) return 0;
    auto r = static_cast<std::int64_t>(std::floor(std::sqrt(std::sqrt(static_cast<double>(n)))));
    while (r > 0 && r * r * r * r > n) --r;
    while ((r + 1) * (r + 1) * (r + 1) * (r + 1) <= n) ++r;
    return static_cast<int>(r);
}

std::vector<int> BlockPartition::block_times() const {
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(k_max + 1));
    for (int k = 0; k <= k_max; ++k) out.push_back(end(k));
    return out;
}

BlockPartition block_partition(int n_steps) {
    if (n_steps < 1) throw InvalidInput("block_partition: N must be at least 1");
    BlockPartition p;
    p.n_steps = n_steps;
    p.block = integer_fourth_root(n_steps);
    p.full_blocks = n_steps / p.block;
    p.has_tail = p.full_blocks * p.block < n_steps;
    p.k_max = p.has_tail ? p.full_blocks + 1 : p.full_blocks;
    return p;
}

DiscretePath coarse_path(const DiscretePath& path, const DiffusionModel& model,
                         const BlockPartition& partition) {
    if (!path.has_innovations()) throw InvalidInput("coarse_path: path has no recorded innovations");
    if (partition.n_steps != path.steps)
        throw InvalidInput("coarse_path: partition built for N = " + std::to_string(partition.n_steps) +
                           ", path has N = " + std::to_string(path.steps));
    if (path.dim != model.dim) throw ShapeError("coarse_path: path and model dimensions differ");
    DiscretePath out = path;
    const double dt = 1.0 / path.steps;
    Vector x = path.state(0);
    put_row(out.states, 0, x);
    for (int l = 1; l <= path.steps; ++l) {
        const int block_start = ((l - 1) / partition.block) * partition.block;
        x = x + increment(model, path.state(block_start), path.innovation(l), dt);
        put_row(out.states, l, x);
    }
    return out;
}

CoupledPair coupled_pair(const DiffusionModel& model, int n_steps, int fine_steps, std::uint64_t seed,
                         std::uint64_t stream) {
    if (n_steps < 1) throw InvalidInput("coupled_pair: N must be at least 1");
    if (fine_steps < n_steps || fine_steps % n_steps != 0)
        throw InvalidInput("coupled_pair: fine grid M = " + std::to_string(fine_steps) +
                           " is not a multiple of N = " + std::to_string(n_steps));
    const int d = model.dim;
    const int r = fine_steps / n_steps;

    CoupledPair pair;
    pair.chain = simulate_path(model, InnovationLaw::gaussian(d), n_steps, seed, stream);
    pair.refine = r;
    pair.reference.resize(static_cast<std::size_t>((fine_steps + 1) * d));
    pair.brownian_steps.resize(static_cast<std::size_t>(fine_steps * d));

    RandomStream bridge(seed, stream, Substream::bridge);
    const double dt = 1.0 / fine_steps;
    const double sqrt_dt = std::sqrt(dt);
    const double inv_sqrt_r = 1.0 / std::sqrt(static_cast<double>(r));
    std::vector<Vector> z(static_cast<std::size_t>(r), Vector(d));

    Vector x = model.x0;
    put_row(pair.reference, 0, x);
    for (int n = 1; n <= n_steps; ++n) {
        const Vector xi = pair.chain.innovation(n);
        // Standardized fine increments with sum sqrt(r) xi: i.i.d. normals
        // recentred on their block mean, which is the Brownian bridge law.
        Vector mean = Vector::Zero(d);
        if (r > 1) {
            for (auto& g : z) {
                for (int i = 0; i < d; ++i) g[i] = bridge.normal();
                mean += g;
            }
            mean /= static_cast<double>(r);
        } else {
            z[0] = Vector::Zero(d);
        }
        for (int s = 0; s < r; ++s) {
            const Vector zs = (z[static_cast<std::size_t>(s)] - mean) + inv_sqrt_r * xi;
            const int j = (n - 1) * r + s;
            x = x + increment(model, x, zs, dt);
            put_row(pair.reference, j + 1, x);
            put_row(pair.brownian_steps, j, sqrt_dt * zs);
        }
    }
    return pair;
}

double CoupledPair::sup_squared_error() const {
    const int d = dim();
    const int m = fine_steps();
    double worst = 0.0;
    auto dist2 = [&](int chain_index, int fine_index) {
        double s = 0.0;
        for (int i = 0; i < d; ++i) {
            const double diff = chain.states[static_cast<std::size_t>(chain_index * d + i)] -
                                reference[static_cast<std::size_t>(fine_index * d + i)];
            s += diff * diff;
        }
        return s;
    };
    for (int j = 0; j <= m; ++j) {
        const int n = j / refine;
        worst = std::max(worst, dist2(n, j));
        if (j > 0 && j % refine == 0) worst = std::max(worst, dist2(n - 1, j));
    }
    return worst;
}

double CoupledPair::max_grid_discrepancy() const {
    double worst = 0.0;
    for (int n = 0; n <= chain.steps; ++n)
        worst = std::max(worst, (chain.state(n) - reference_state(n * refine)).norm());
    return worst;
}

}  // namespace gameopt
