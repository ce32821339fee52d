#include "cvalue/kernels/boxcox.hpp"

#include <cmath>
#include <limits>

namespace cvalue::kernels {

namespace {

double transformed(double log_x, double lambda) {
  if (lambda == 0.0) return log_x;
  return std::expm1(lambda * log_x) / lambda;
}

double sum_of(const std::vector<double> &v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

}  // namespace

double boxcox_loglik(const std::vector<double> &log_x, double sum_log_x, double lambda) {
  const double n = static_cast<double>(log_x.size());
  double mean = 0.0;
  for (double lx : log_x) mean += transformed(lx, lambda);
  mean /= n;
  double ss = 0.0;
  for (double lx : log_x) {
    double d = transformed(lx, lambda) - mean;
    ss += d * d;
  }
  double var = ss / n;
  if (!(var > 0.0) || !std::isfinite(var)) return -std::numeric_limits<double>::infinity();
  return -0.5 * n * std::log(var) + (lambda - 1.0) * sum_log_x;
}

std::vector<double> boxcox_grid_serial(const std::vector<double> &log_x, const std::vector<double> &lambdas) {
  const double s = sum_of(log_x);
  std::vector<double> out(lambdas.size());
  for (std::size_t i = 0; i < lambdas.size(); ++i) out[i] = boxcox_loglik(log_x, s, lambdas[i]);
  return out;
}

std::vector<double> boxcox_grid_omp(const std::vector<double> &log_x, const std::vector<double> &lambdas) {
  const double s = sum_of(log_x);
  std::vector<double> out(lambdas.size());
  const auto n = static_cast<std::ptrdiff_t>(lambdas.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < n; ++i)
    out[static_cast<std::size_t>(i)] = boxcox_loglik(log_x, s, lambdas[static_cast<std::size_t>(i)]);
  return out;
}

}  // namespace cvalue::kernels
