#include "blpp/stats.hpp"

#include <algorithm>
#include <cmath>

#include "blpp/errors.hpp"

namespace blpp {

double mean(const std::vector<double>& xs) {
    if (xs.empty()) throw StatisticsError("mean of empty sample");
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

double sample_sd(const std::vector<double>& xs) {
    if (xs.size() < 2) throw StatisticsError("sd needs at least two samples");
    const double m = mean(xs);
    double s = 0.0;
    for (double x : xs) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

double median(std::vector<double> xs) {
    if (xs.empty()) throw StatisticsError("median of empty sample");
    std::sort(xs.begin(), xs.end());
    const size_t m = xs.size() / 2;
    if (xs.size() % 2 == 1) return xs[m];
    return 0.5 * (xs[m - 1] + xs[m]);
}

WilsonInterval wilson95(size_t hits, size_t trials) {
    if (trials == 0) throw StatisticsError("Wilson interval needs trials >= 1");
    const double z = 1.959963984540054;
    const double nn = static_cast<double>(trials);
    const double p = static_cast<double>(hits) / nn;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double center = (p + z2 / (2.0 * nn)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

ExponentFit fit_exponent(const std::vector<std::pair<double, double>>& pairs,
                         bool log_log) {
    if (pairs.size() < 2)
        throw ParameterError("exponent fit needs at least two points");
    std::vector<double> xs, ys;
    xs.reserve(pairs.size());
    ys.reserve(pairs.size());
    for (const auto& [x, y] : pairs) {
        if (log_log) {
            if (!(x > 0.0) || !(y > 0.0))
                throw ParameterError("log-log fit needs positive values");
            xs.push_back(std::log(x));
            ys.push_back(std::log(y));
        } else {
            xs.push_back(x);
            ys.push_back(y);
        }
    }
    const size_t m = xs.size();
    const double mx = mean(xs);
    const double my = mean(ys);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (size_t i = 0; i < m; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (sxx == 0.0) throw ParameterError("exponent fit needs distinct abscissae");

    ExponentFit fit;
    fit.points_used = static_cast<int>(m);
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0.0;
    for (size_t i = 0; i < m; ++i) {
        const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
        ss_res += r * r;
    }
    fit.r_squared = (syy == 0.0) ? 1.0 : 1.0 - ss_res / syy;
    fit.slope_stderr =
        (m > 2) ? std::sqrt(ss_res / static_cast<double>(m - 2) / sxx) : 0.0;
    return fit;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

} // namespace blpp
