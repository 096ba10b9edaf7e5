#pragma once

#include <cmath>
#include <vector>

// Sample moments used by the Monte Carlo tests.
namespace testing {

inline double mean(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

inline double covariance(const std::vector<double>& x, const std::vector<double>& y) {
  const double mx = mean(x), my = mean(y);
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - mx) * (y[i] - my);
  return s / static_cast<double>(x.size() - 1);
}

inline double variance(const std::vector<double>& x) { return covariance(x, x); }

inline double correlation(const std::vector<double>& x, const std::vector<double>& y) {
  return covariance(x, y) / std::sqrt(variance(x) * variance(y));
}

}  // namespace testing
