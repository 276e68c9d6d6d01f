#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gameopt/dynkin.hpp"
#include "gameopt/model.hpp"
#include "gameopt/payoff.hpp"
#include "gameopt/tree.hpp"

namespace gameopt::testing {

/// One-dimensional model from scalar coefficient functions.
inline DiffusionModel scalar_model(std::function<double(double)> sigma, std::function<double(double)> drift,
                                   double lip, double x0 = 0.0, bool constant = false) {
    DiffusionModel m;
    m.dim = 1;
    m.sigma = [sigma](const Vector& x) {
        Matrix s(1, 1);
        s(0, 0) = sigma(x[0]);
        return s;
    };
    m.drift = [drift](const Vector& x) {
        Vector b(1);
        b[0] = drift(x[0]);
        return b;
    };
    m.lip_bound = lip;
    m.x0 = Vector::Constant(1, x0);
    m.id = "test";
    m.constant_coefficients = constant;
    return m;
}

inline DiffusionModel constant_model(double sigma, double drift, double x0 = 0.0) {
    return scalar_model([sigma](double) { return sigma; }, [drift](double) { return drift; },
                        std::max({1.0, std::abs(sigma), std::abs(drift)}), x0, true);
}

/// Payoffs given as functions of the grid index only.
inline PayoffPair time_payoff(std::function<double(int)> lower, std::function<double(int)> upper) {
    PayoffPair p;
    p.id = "time";
    p.lower = [lower](const PathView& v) { return lower(v.index()); };
    p.upper = [upper](const PathView& v) { return upper(v.index()); };
    p.statistic = SufficientStatistic::state;
    return p;
}

/// (K - e^x)^+.
inline double put(double x, double strike) { return std::max(strike - std::exp(x), 0.0); }

/// Single-player optimal stopping of a put on exp(X) for the recombining
/// binomial chain x + s(2j - n)/sqrt(N) + n b / N with probability 1/2 per
/// branch.
inline double binomial_american_put(double x0, double s, double b, int n_steps, double strike) {
    const double up = s / std::sqrt(static_cast<double>(n_steps));
    auto state = [&](int n, int j) { return x0 + up * (2 * j - n) + b * n / n_steps; };
    std::vector<double> v(static_cast<std::size_t>(n_steps) + 1);
    for (int j = 0; j <= n_steps; ++j) v[static_cast<std::size_t>(j)] = put(state(n_steps, j), strike);
    for (int n = n_steps - 1; n >= 0; --n)
        for (int j = 0; j <= n; ++j) {
            const double hold = 0.5 * (v[static_cast<std::size_t>(j)] + v[static_cast<std::size_t>(j) + 1]);
            v[static_cast<std::size_t>(j)] = std::max(put(state(n, j), strike), hold);
        }
    return v[0];
}

/// Small game instance: state-dependent sigma, Rademacher innovations and a
/// catalog payoff, all drawn from `rng`.
struct RandomInstance {
    DiffusionModel model;
    PayoffPair payoffs;
    int steps = 1;
    std::string label;
};

inline RandomInstance random_instance(std::mt19937_64& rng, int steps) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double a = 0.2 + 0.3 * unit(rng);
    const double b = 0.05 + 0.15 * unit(rng);
    const double c = 0.5 + 1.5 * unit(rng);
    const double drift = 0.2 * (unit(rng) - 0.5);
    const double x0 = 0.4 * (unit(rng) - 0.5);
    const bool use_sine = unit(rng) < 0.5;
    RandomInstance inst;
    inst.steps = steps;
    inst.model = scalar_model(
        [=](double x) { return use_sine ? a + b * std::sin(c * x) : a + b * std::tanh(c * x); },
        [=](double) { return drift; }, 1.0, x0);
    static const char* kinds[] = {"israeli-put", "israeli-call", "lookback-put", "asian-put"};
    PayoffSpec spec;
    spec.kind = kinds[rng() % 4];
    spec.strike = 0.8 + 0.4 * unit(rng);
    spec.penalty = 0.3 * unit(rng);
    spec.profile = unit(rng) < 0.5 ? PenaltyProfile::flat : PenaltyProfile::linear;
    inst.payoffs = make_payoff(spec);
    inst.label = spec.kind + " N=" + std::to_string(steps) + (use_sine ? " sin" : " tanh") +
                 " strike=" + std::to_string(spec.strike) + " penalty=" + std::to_string(spec.penalty);
    return inst;
}

/// E R(sigma, tau) by walking every atom sequence from the root and paying
/// at the first flagged node: the maximizer's F wins ties, leaves pay F.
inline double path_sum_payoff(const ScenarioTree& tree, const NodePayoffs& pay, const StoppingRule& minimizer,
                              const StoppingRule& maximizer) {
    std::function<double(std::size_t)> walk = [&](std::size_t v) -> double {
        if (maximizer.stop[v] || tree.is_leaf(v)) return pay.lower[v];
        if (minimizer.stop[v]) return pay.upper[v];
        double sum = 0.0;
        for (std::size_t a = 0; a < tree.branching(); ++a) sum += tree.probabilities()[a] * walk(tree.child(v, a));
        return sum;
    };
    return walk(0);
}

/// Fresh directory under the system temp path, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() /
                ("gameopt-" + tag + "-" + std::to_string(rd()) + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const noexcept { return path_; }
    std::string str() const { return path_.string(); }

private:
    std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

/// Sorted regular files below `root`, relative paths.
inline std::vector<std::string> list_files(const std::filesystem::path& root) {
    std::vector<std::string> out;
    for (const auto& e : std::filesystem::recursive_directory_iterator(root))
        if (e.is_regular_file()) out.push_back(std::filesystem::relative(e.path(), root).string());
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace gameopt::testing
