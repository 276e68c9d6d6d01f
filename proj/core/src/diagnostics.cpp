#include "gameopt/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gameopt/scheme.hpp"
#include "gameopt/tree.hpp"

namespace gameopt {

namespace {

void require_reps(std::size_t reps, std::size_t minimum, const char* who) {
    if (reps < minimum)
        throw InvalidInput(std::string(who) + ": needs at least " + std::to_string(minimum) +
                           " replications, got " + std::to_string(reps));
}

double radical_inverse(std::uint64_t index, std::uint64_t base) {
    double result = 0.0;
    double scale = 1.0 / static_cast<double>(base);
    while (index > 0) {
        result += static_cast<double>(index % base) * scale;
        index /= base;
        scale /= static_cast<double>(base);
    }
    return result;
}

constexpr std::uint64_t kPrimes[kMaxDim] = {2, 3, 5, 7, 11, 13, 17, 19};

}  // namespace

BoundCheck make_bound_check(const Estimate& estimate, double log_bound) {
    BoundCheck check;
    check.estimate = estimate;
    check.log_bound = log_bound;
    check.bound = log_bound > 709.0 ? std::numeric_limits<double>::infinity() : std::exp(log_bound);
    const double lhs = estimate.mean - 2.0 * estimate.std_error;
    check.compliant = lhs <= 0.0 || std::log(lhs) <= log_bound;
    return check;
}

Estimate strong_error(const DiffusionModel& model, const InnovationLaw& law, int n_steps, int refine,
                      std::size_t reps, std::uint64_t seed, int jobs) {
    if (law.is_finite())
        throw UnsupportedLaw("strong_error: the coupling with Brownian motion needs Gaussian innovations, got '" +
                             law.id() + "'");
    if (law.dim() != model.dim) throw ShapeError("strong_error: law and model dimensions differ");
    if (refine < 1) throw InvalidInput("strong_error: refine factor must be at least 1");
    require_reps(reps, 30, "strong_error");
    std::vector<double> samples(reps);
    parallel_for(reps, jobs, [&](std::size_t r) {
        samples[r] = coupled_pair(model, n_steps, refine * n_steps, seed, r).sup_squared_error();
    });
    return summarize(samples);
}

BoundCheck coarse_error(const DiffusionModel& model, const InnovationLaw& law, int n_steps, std::size_t reps,
                        std::uint64_t seed, int jobs) {
    require_reps(reps, 2, "coarse_error");
    const BlockPartition partition = block_partition(n_steps);
    const int d = model.dim;
    std::vector<double> samples(reps);
    parallel_for(reps, jobs, [&](std::size_t r) {
        const DiscretePath path = simulate_path(model, law, n_steps, seed, r);
        const DiscretePath coarse = coarse_path(path, model, partition);
        double worst = 0.0;
        for (int n = 0; n <= n_steps; ++n) {
            double s = 0.0;
            for (int i = 0; i < d; ++i) {
                const auto k = static_cast<std::size_t>(n * d + i);
                const double diff = path.states[k] - coarse.states[k];
                s += diff * diff;
            }
            worst = std::max(worst, s);
        }
        samples[r] = worst;
    });
    const TheoreticalBounds bounds{effective_lip_bound(model, law), d};
    return make_bound_check(summarize(samples), std::log(bounds.coarse_bound(n_steps)));
}

std::complex<double> characteristic_function(const Matrix& sigma, const InnovationLaw& law,
                                             std::span<const double> w, int n) {
    if (n < 1) throw InvalidInput("characteristic_function: n must be at least 1");
    const int d = law.dim();
    if (sigma.rows() != d || sigma.cols() != d || static_cast<int>(w.size()) != d)
        throw ShapeError("characteristic_function: sigma, w and law dimensions differ");
    // <w, sigma xi> = <sigma^T w, xi>.
    Vector u(d);
    for (int j = 0; j < d; ++j) {
        double s = 0.0;
        for (int i = 0; i < d; ++i) s += sigma(i, j) * w[static_cast<std::size_t>(i)];
        u[j] = s / std::sqrt(static_cast<double>(n));
    }
    if (!law.is_finite()) return {std::exp(-0.5 * n * u.squaredNorm()), 0.0};

    std::complex<double> phi{0.0, 0.0};
    for (std::size_t a = 0; a < law.atom_count(); ++a)
        phi += law.probabilities()[a] * std::polar(1.0, u.dot(law.atoms()[a]));
    std::complex<double> result{1.0, 0.0};
    for (int e = n; e > 0; e >>= 1) {
        if (e & 1) result *= phi;
        phi *= phi;
    }
    return result;
}

CfDistance cf_distance(const Matrix& sigma, const InnovationLaw& law, int n, std::size_t w_samples,
                       std::uint64_t seed, double lip) {
    const int d = law.dim();
    CfDistance out;
    out.radius = std::pow(static_cast<double>(n), TheoreticalBounds::kCfExponent / 2.0);
    out.bound = TheoreticalBounds{lip, d}.cf_bound(n);
    out.worst_w.assign(static_cast<std::size_t>(d), 0.0);
    const Matrix a = sigma * sigma.transpose();

    std::vector<double> w(static_cast<std::size_t>(d), 0.0);
    auto probe = [&] {
        double quad = 0.0;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) quad += a(i, j) * w[static_cast<std::size_t>(i)] * w[static_cast<std::size_t>(j)];
        const double dev = std::abs(characteristic_function(sigma, law, w, n) - std::exp(-0.5 * quad));
        ++out.points;
        if (dev > out.max_deviation) {
            out.max_deviation = dev;
            out.worst_w = w;
        }
    };

    probe();
    for (int i = 0; i < d; ++i) {
        for (double f : {-1.0, -0.5, 0.5, 1.0}) {
            std::fill(w.begin(), w.end(), 0.0);
            w[static_cast<std::size_t>(i)] = f * out.radius;
            probe();
        }
    }
    std::uint64_t index = 1 + seed % 4096;
    for (std::size_t accepted = 0; accepted < w_samples; ++index) {
        double norm2 = 0.0;
        for (int i = 0; i < d; ++i) {
            const double c = (2.0 * radical_inverse(index, kPrimes[i]) - 1.0) * out.radius;
            w[static_cast<std::size_t>(i)] = c;
            norm2 += c * c;
        }
        if (norm2 > out.radius * out.radius) continue;
        probe();
        ++accepted;
    }
    out.compliant = out.max_deviation <= out.bound;
    return out;
}

BoundCheck exp_moment(const DiffusionModel& model, const InnovationLaw& law, int n_steps, double m,
                      std::size_t reps, double delta, std::uint64_t seed, int jobs) {
    if (!(m > 0.0)) throw InvalidInput("exp_moment: M must be positive");
    if (!(delta > 0.0)) throw InvalidInput("exp_moment: delta must be positive");
    require_reps(reps, 2, "exp_moment");
    std::vector<double> samples(reps);
    parallel_for(reps, jobs, [&](std::size_t r) {
        const DiscretePath path = simulate_path(model, law, n_steps, seed, r);
        const PathView view = path.view();
        double worst = 0.0;
        for (int n = 0; n <= n_steps; ++n) worst = std::max(worst, view.norm(n));
        samples[r] = std::exp(m * worst);
    });
    const TheoreticalBounds bounds{effective_lip_bound(model, law), model.dim};
    return make_bound_check(summarize(samples),
                            bounds.log_exp_moment_bound(m, delta, model.x0.norm(), n_steps));
}

std::vector<ConvergenceRow> value_convergence(const DiffusionModel& model, const InnovationLaw& law,
                                              const PayoffPair& payoffs, const std::vector<int>& n_list,
                                              std::size_t node_cap, bool recombine, int jobs) {
    if (n_list.empty()) throw InvalidInput("value_convergence: empty N list");
    std::vector<ConvergenceRow> rows;
    bool have_previous = false;
    double previous = 0.0;
    for (int n : n_list) {
        ConvergenceRow row;
        row.n_steps = n;
        row.difference = std::numeric_limits<double>::quiet_NaN();
        try {
            const ScenarioTree tree =
                build_tree(model, law, n, tree_options_for(payoffs, recombine, node_cap));
            row.nodes = tree.size();
            row.value = backward_value(tree, payoffs, jobs).value;
            if (have_previous) row.difference = std::abs(row.value - previous);
            previous = row.value;
            have_previous = true;
        } catch (const Error& e) {
            row.value = std::numeric_limits<double>::quiet_NaN();
            row.status = e.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

bool differences_nonincreasing(const std::vector<ConvergenceRow>& rows) {
    double last = std::numeric_limits<double>::infinity();
    for (const auto& row : rows) {
        if (row.status != "ok" || std::isnan(row.difference)) continue;
        if (row.difference > last) return false;
        last = row.difference;
    }
    return true;
}

}  // namespace gameopt
