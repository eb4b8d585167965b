#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

// shared statistical utilities for the test suites

namespace testutil {

// two-sided Kolmogorov-Smirnov statistic against a continuous CDF
inline double ks_statistic(std::vector<double> samples,
                           const std::function<double(double)>& cdf) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
  }
  return d;
}

// asymptotic two-sided critical value at significance 0.01
inline double ks_critical_01(std::size_t n) {
  return 1.6276 / std::sqrt(static_cast<double>(n));
}

inline double mean(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

inline double sample_std(const std::vector<double>& xs) {
  const double m = mean(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return std::sqrt(s / (static_cast<double>(xs.size()) - 1.0));
}

}  // namespace testutil
