#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace blpp {

double mean(const std::vector<double>& xs);
double sample_sd(const std::vector<double>& xs);     // unbiased (n-1) variance
double median(std::vector<double> xs);

// Wilson 95% score interval for a binomial frequency; suited to rare events
// where the Wald interval degenerates.
struct WilsonInterval {
    double lo = 0.0;
    double hi = 1.0;
};
WilsonInterval wilson95(size_t hits, size_t trials);

struct ExponentFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    double r_squared = 1.0;
    int points_used = 0;
};

// Ordinary least squares on (x, y) or (log x, log y) pairs.
ExponentFit fit_exponent(const std::vector<std::pair<double, double>>& pairs,
                         bool log_log);

double normal_cdf(double z);

} // namespace blpp
