#include "banditsim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace banditsim {

double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / 1.4142135623730950488016887242097);
}

double mean_of(const std::vector<double>& v) {
    if (v.empty()) throw std::invalid_argument("mean_of: empty input");
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double sample_variance(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size() - 1);
}

double stderr_of_mean(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    return std::sqrt(sample_variance(v) / static_cast<double>(v.size()));
}

double ks_distance_normal(std::vector<double> samples) {
    if (samples.empty()) throw std::invalid_argument("ks_distance_normal: empty input");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = normal_cdf(samples[i]);
        const double lo = static_cast<double>(i) / n;
        const double hi = static_cast<double>(i + 1) / n;
        d = std::max(d, std::max(std::abs(f - lo), std::abs(f - hi)));
    }
    return d;
}

double log_choose(long n, long k) {
    if (k < 0 || k > n) throw std::invalid_argument("log_choose: k out of range");
    return std::lgamma(static_cast<double>(n + 1)) - std::lgamma(static_cast<double>(k + 1)) -
           std::lgamma(static_cast<double>(n - k + 1));
}

double hypergeometric_pmf(long k, long total, long successes, long draws) {
    const long lo = std::max(0L, draws - (total - successes));
    const long hi = std::min(successes, draws);
    if (k < lo || k > hi) return 0.0;
    return std::exp(log_choose(successes, k) + log_choose(total - successes, draws - k) -
                    log_choose(total, draws));
}

}  // namespace banditsim
