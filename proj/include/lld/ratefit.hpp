#pragma once

#include <string>
#include <vector>

namespace lld {

enum class RateModel { tau, tau_log };

std::string to_string(RateModel m);

struct RateRow {
    double eps = 0.0;
    double tau = 0.0;
    double tau_log = 0.0;
    double p_dist = 0.0;
    std::string quantity;
    double value = 0.0;
    int mesh_n = 0;
    double dt = 0.0;
};

struct RateFit {
    std::string quantity;
    RateModel model = RateModel::tau;
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    int used = 0;
    std::vector<double> excluded_eps;  // rows with nonpositive value
};

/// Least squares of log(value) against log(tau) or log(tau_log).
/// Needs at least 4 rows with positive value; FitRejected otherwise.
RateFit fit_rate(const std::vector<RateRow>& rows, RateModel model);

/// Rows with the given quantity name.
std::vector<RateRow> select(const std::vector<RateRow>& rows, const std::string& quantity);

void write_rate_csv(const std::string& path, const std::vector<RateRow>& rows);

}  // namespace lld
