#include "gameopt/regression.hpp"

#include <cmath>
#include <set>
#include <string>

#include "gameopt/types.hpp"

namespace gameopt {

RateStudy rate_regression(const std::vector<RatePoint>& points) {
    RateStudy study;
    for (const auto& p : points) {
        if (!(p.n > 0.0)) throw InvalidInput("rate_regression: N must be positive");
        if (!(p.error > 0.0))
            throw InvalidInput("rate_regression: error at N = " + std::to_string(p.n) + " is not positive");
        if (p.error <= 2.0 * p.std_error)
            study.refused.push_back(p);
        else
            study.points.push_back(p);
    }
    std::set<double> distinct;
    for (const auto& p : study.points) distinct.insert(p.n);
    if (distinct.size() < 3)
        throw InvalidInput("rate_regression: needs at least 3 distinct N with error above 2 standard errors, have " +
                           std::to_string(distinct.size()));

    const double k = static_cast<double>(study.points.size());
    double mx = 0.0, my = 0.0;
    for (const auto& p : study.points) {
        mx += std::log(p.n);
        my += std::log(p.error);
    }
    mx /= k;
    my /= k;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const auto& p : study.points) {
        const double dx = std::log(p.n) - mx;
        const double dy = std::log(p.error) - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    study.slope = sxy / sxx;
    study.intercept = my - study.slope * mx;
    double sse = 0.0;
    for (const auto& p : study.points) {
        const double r = std::log(p.error) - (study.intercept + study.slope * std::log(p.n));
        sse += r * r;
    }
    // Flat data leaves only rounding noise in syy.
    study.r_squared = syy <= 1e-24 * k ? 1.0 : 1.0 - sse / syy;
    return study;
}

}  // namespace gameopt
