#include "samples.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/normal.hpp>

namespace fixture {

std::vector<double> heavy_tailed_cc_profile() {
  const int n = 10000;
  const double mu = std::log(3.0), sigma = 1.71;
  boost::math::normal standard;
  std::vector<double> xs;
  xs.reserve(n);
  for (int i = 0; i < n; ++i) {
    double q = (i + 0.5) / n;
    double x = std::round(std::exp(mu + sigma * boost::math::quantile(standard, q)));
    xs.push_back(std::clamp(x, 1.0, 6667.0));
  }
  xs.back() = 6667.0;
  return xs;
}

double mean(const std::vector<double> &xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double median(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  auto n = xs.size();
  return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

double stddev(const std::vector<double> &xs) {
  double m = mean(xs), s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(xs.size()));
}

double skewness(const std::vector<double> &xs) {
  double m = mean(xs), sd = stddev(xs), s = 0.0;
  for (double x : xs) s += std::pow((x - m) / sd, 3);
  return s / static_cast<double>(xs.size());
}

}  // namespace fixture
