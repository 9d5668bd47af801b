#pragma once

#include <cstddef>
#include <vector>

namespace banditsim {

// Standard normal CDF via erfc; accurate to ~1e-15 over the full range.
double normal_cdf(double x);

double mean_of(const std::vector<double>& v);
double sample_variance(const std::vector<double>& v);
// Standard error of the mean (sample stddev / sqrt(n)); 0 for n < 2.
double stderr_of_mean(const std::vector<double>& v);

// Kolmogorov-Smirnov distance between the empirical CDF of `samples` and the
// standard normal CDF. Sorts a copy.
double ks_distance_normal(std::vector<double> samples);

// log C(n, k) via lgamma.
double log_choose(long n, long k);

// P(X = k) for X ~ Hypergeometric(total, successes, draws).
double hypergeometric_pmf(long k, long total, long successes, long draws);

}  // namespace banditsim
