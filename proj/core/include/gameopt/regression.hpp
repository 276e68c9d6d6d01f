#pragma once

#include <vector>

namespace gameopt {

struct RatePoint {
    double n = 0.0;
    double error = 0.0;
    double std_error = 0.0;
};

/// Ordinary least squares of log(error) on log(N).
struct RateStudy {
    std::vector<RatePoint> points;   // points used in the fit
    std::vector<RatePoint> refused;  // error within two standard errors of zero
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

/// Fits the log-log rate. Points whose error does not exceed twice its
/// standard error are set aside; at least three distinct N must remain and
/// every error must be positive, else InvalidInput. Perfectly flat data has
/// R^2 = 1.
RateStudy rate_regression(const std::vector<RatePoint>& points);

}  // namespace gameopt
