// Box-Cox profile log-likelihood evaluated over a grid of lambdas.
// The OpenMP kernel splits the grid across threads; each lambda is still a
// serial reduction, so both kernels return identical values.

#pragma once

#include <vector>

namespace cvalue::kernels {

/// ln L(λ) = -n/2 · ln σ²(λ) + (λ - 1) · Σ ln x, with σ² the population
/// variance of the transformed sample. `log_x` holds ln x for x > 0.
double boxcox_loglik(const std::vector<double> &log_x, double sum_log_x, double lambda);

std::vector<double> boxcox_grid_serial(const std::vector<double> &log_x, const std::vector<double> &lambdas);
std::vector<double> boxcox_grid_omp(const std::vector<double> &log_x, const std::vector<double> &lambdas);

}  // namespace cvalue::kernels
