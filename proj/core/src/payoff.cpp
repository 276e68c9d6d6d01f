#include "gameopt/payoff.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace gameopt {

const char* to_string(SufficientStatistic s) noexcept {
    switch (s) {
        case SufficientStatistic::none: return "none";
        case SufficientStatistic::state: return "state";
        case SufficientStatistic::running_max: return "running-max";
    }
    return "none";
}

SufficientStatistic sufficient_statistic_from_string(const std::string& s) {
    if (s == "none") return SufficientStatistic::none;
    if (s == "state") return SufficientStatistic::state;
    if (s == "running-max") return SufficientStatistic::running_max;
    throw InvalidInput("unknown sufficient statistic '" + s + "'");
}

double basket_price(const PathView& view, int k) {
    double s = 0.0;
    for (int i = 0; i < view.dim(); ++i) s += std::exp(view.at(k, i));
    return s / view.dim();
}

namespace {

double penalty_at(const PayoffSpec& spec, double t) {
    if (t >= 1.0) return 0.0;
    return spec.profile == PenaltyProfile::flat ? spec.penalty : spec.penalty * (1.0 - t);
}

PayoffPair with_penalty(std::string id, PathFunctional lower, const PayoffSpec& spec, double reg_const,
                        SufficientStatistic statistic) {
    PayoffPair pair;
    pair.id = std::move(id);
    pair.upper = [lower, spec](const PathView& v) { return lower(v) + penalty_at(spec, v.time()); };
    pair.lower = std::move(lower);
    pair.reg_const = reg_const;
    pair.statistic = statistic;
    return pair;
}

}  // namespace

PayoffPair make_payoff(const PayoffSpec& spec) {
    if (spec.penalty < 0.0) throw InvalidInput("payoff penalty must be non-negative");
    const double strike = spec.strike;
    if (spec.kind == "constant") {
        PayoffPair pair;
        pair.id = "constant";
        const double c = spec.constant;
        pair.lower = [c](const PathView&) { return c; };
        pair.upper = pair.lower;
        pair.reg_const = 1.0;
        pair.statistic = SufficientStatistic::state;
        return pair;
    }
    if (spec.kind == "israeli-put" || spec.kind == "american-put") {
        PayoffSpec s = spec;
        if (spec.kind == "american-put") {
            s.penalty = 1e6;
            s.profile = PenaltyProfile::flat;
        }
        return with_penalty(
            spec.kind,
            [strike](const PathView& v) { return std::max(strike - basket_price(v, v.index()), 0.0); }, s,
            std::max(2.0, s.penalty), SufficientStatistic::state);
    }
    if (spec.kind == "israeli-call") {
        return with_penalty(
            spec.kind,
            [strike](const PathView& v) { return std::max(basket_price(v, v.index()) - strike, 0.0); },
            spec, std::max(2.0, spec.penalty), SufficientStatistic::state);
    }
    if (spec.kind == "lookback-put") {
        return with_penalty(
            spec.kind,
            [](const PathView& v) {
                double running = basket_price(v, 0);
                for (int k = 1; k <= v.index(); ++k) running = std::max(running, basket_price(v, k));
                return running - basket_price(v, v.index());
            },
            spec, 4.0 + spec.penalty, SufficientStatistic::running_max);
    }
    if (spec.kind == "asian-put") {
        return with_penalty(
            spec.kind,
            [strike](const PathView& v) {
                const int n = v.index();
                double integral = 0.0;
                for (int k = 0; k < n; ++k) integral += basket_price(v, k);
                if (n > 0) integral /= v.steps();
                const double average = (basket_price(v, 0) + integral) / (1.0 + v.time());
                return std::max(strike - average, 0.0);
            },
            spec, 4.0 + spec.penalty, SufficientStatistic::none);
    }
    throw InvalidInput("unknown payoff kind '" + spec.kind + "'");
}

ValidationReport validate_payoffs(const PayoffPair& pair, const std::vector<DiscretePath>& paths) {
    if (paths.empty()) throw InvalidInput("validate_payoffs needs at least one sample path");
    const double k_reg = pair.reg_const;

    struct Evaluated {
        const DiscretePath* path;
        std::vector<double> lower, upper, sup_norm;
    };
    std::vector<Evaluated> evaluated;
    evaluated.reserve(paths.size());
    for (const auto& p : paths) {
        Evaluated e{&p, {}, {}, {}};
        double sup = 0.0;
        for (int n = 0; n <= p.steps; ++n) {
            const PathView v = p.view(n);
            e.lower.push_back(pair.lower(v));
            e.upper.push_back(pair.upper(v));
            sup = std::max(sup, v.norm(n));
            e.sup_norm.push_back(sup);
        }
        evaluated.push_back(std::move(e));
    }

    auto witness = [](std::size_t path_index, double t) {
        std::ostringstream out;
        out.precision(17);
        out << "path " << path_index << ", t = " << t;
        return out.str();
    };

    double order = -std::numeric_limits<double>::infinity();
    std::string order_at;
    double terminal = 0.0;
    std::string terminal_at = "none";
    for (std::size_t i = 0; i < evaluated.size(); ++i) {
        const auto& e = evaluated[i];
        for (std::size_t n = 0; n < e.lower.size(); ++n) {
            const double gap = e.lower[n] - e.upper[n];
            if (gap > order) {
                order = gap;
                order_at = witness(i, e.path->time(static_cast<int>(n)));
            }
        }
        const double end_gap = std::abs(e.upper.back() - e.lower.back());
        if (end_gap > terminal) {
            terminal = end_gap;
            terminal_at = witness(i, 1.0);
        }
    }

    double spatial = -std::numeric_limits<double>::infinity();
    std::string spatial_at = "no comparable path pairs";
    for (std::size_t a = 0; a < evaluated.size(); ++a) {
        for (std::size_t b = a + 1; b < evaluated.size(); ++b) {
            const auto& ea = evaluated[a];
            const auto& eb = evaluated[b];
            if (ea.path->steps != eb.path->steps || ea.path->dim != eb.path->dim) continue;
            double dist = 0.0;
            for (int n = 0; n <= ea.path->steps; ++n) {
                dist = std::max(dist, (ea.path->state(n) - eb.path->state(n)).norm());
                const double lhs = std::abs(ea.lower[n] - eb.lower[n]) + std::abs(ea.upper[n] - eb.upper[n]);
                const double rhs = k_reg * (dist + (dist > 1.0 ? 1.0 : 0.0)) *
                                   std::exp(k_reg * (ea.sup_norm[n] + eb.sup_norm[n]));
                if (lhs - rhs > spatial) {
                    spatial = lhs - rhs;
                    std::ostringstream out;
                    out.precision(17);
                    out << "paths " << a << " and " << b << ", t = " << ea.path->time(n);
                    spatial_at = out.str();
                }
            }
        }
    }

    double temporal = -std::numeric_limits<double>::infinity();
    std::string temporal_at;
    for (std::size_t i = 0; i < evaluated.size(); ++i) {
        const auto& e = evaluated[i];
        const DiscretePath& p = *e.path;
        const int stride = std::max(1, p.steps / 64);
        for (int s = 0; s <= p.steps; s += stride) {
            const Vector xs = p.state(s);
            double osc = 0.0;
            for (int t = s + 1; t <= p.steps; ++t) {
                osc = std::max(osc, (p.state(t) - xs).norm());
                const double lhs = std::abs(e.lower[t] - e.lower[s]) + std::abs(e.upper[t] - e.upper[s]);
                const double rhs = k_reg * (p.time(t) - p.time(s) + osc) * std::exp(k_reg * e.sup_norm[t]);
                if (lhs - rhs > temporal) {
                    temporal = lhs - rhs;
                    std::ostringstream out;
                    out.precision(17);
                    out << "path " << i << ", s = " << p.time(s) << ", t = " << p.time(t);
                    temporal_at = out.str();
                }
            }
        }
    }

    ValidationReport report;
    report.subject = "payoff:" + pair.id;
    report.probe_description = std::to_string(paths.size()) + " sample paths";
    report.add("F_t <= G_t", order, 0.0, order_at);
    report.add("G_1 = F_1", terminal, 1e-12, terminal_at);
    report.add("spatial regularity", spatial, 1e-12, spatial_at);
    report.add("temporal regularity", temporal, 1e-12, temporal_at);
    return report;
}

}  // namespace gameopt
