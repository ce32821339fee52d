#include "cvalue/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cvalue/kernels/boxcox.hpp"
#include "json.hpp"

namespace cvalue::scoring {

double boxcox(double x, double lambda) {
  if (lambda == 0.0) return std::log(x);
  return std::expm1(lambda * std::log(x)) / lambda;
}

BoxCoxParams fit_boxcox(const std::vector<double> &samples, const FitOptions &options) {
  BoxCoxParams params;
  if (samples.size() < 2) {
    params.degenerate = true;
    return params;
  }
  auto [lo, hi] = std::minmax_element(samples.begin(), samples.end());
  if (*lo == *hi) {
    params.degenerate = true;
    return params;
  }
  params.shift = *lo <= 0.0 ? 1.0 - *lo : 0.0;
  std::vector<double> log_x;
  log_x.reserve(samples.size());
  for (double v : samples) log_x.push_back(std::log(v + params.shift));

  // λ_k = lambda_min + k · step, built from integers so 0 and 1 are exact.
  const long steps = std::lround((options.lambda_max - options.lambda_min) / options.lambda_step);
  const long offset = std::lround(options.lambda_min / options.lambda_step);
  const double scale = std::round(1.0 / options.lambda_step);
  std::vector<double> lambdas;
  lambdas.reserve(static_cast<std::size_t>(steps + 1));
  for (long k = 0; k <= steps; ++k) lambdas.push_back(static_cast<double>(k + offset) / scale);

  auto ll = options.parallel ? kernels::boxcox_grid_omp(log_x, lambdas) : kernels::boxcox_grid_serial(log_x, lambdas);
  std::size_t best = 0;
  for (std::size_t i = 1; i < lambdas.size(); ++i) {
    if (ll[i] > ll[best] || (ll[i] == ll[best] && std::fabs(lambdas[i] - 1.0) < std::fabs(lambdas[best] - 1.0)))
      best = i;
  }
  params.lambda = lambdas[best];

  double mean = 0.0;
  for (double v : samples) mean += boxcox(v + params.shift, params.lambda);
  mean /= static_cast<double>(samples.size());
  double ss = 0.0;
  for (double v : samples) {
    double d = boxcox(v + params.shift, params.lambda) - mean;
    ss += d * d;
  }
  double sd = std::sqrt(ss / static_cast<double>(samples.size()));
  if (!(sd > 0.0) || !std::isfinite(sd)) {
    params.degenerate = true;
    return params;
  }
  params.mean = mean;
  params.stddev = sd;
  return params;
}

double normalize_unclamped(double value, const BoxCoxParams &params) {
  if (params.degenerate) return params.post_mean;
  double x = value + params.shift;
  // Below the fitted support the transform is undefined; such values sit
  // under every fitted sample and land on the clamp.
  if (!(x > 0.0)) return -std::numeric_limits<double>::infinity();
  double z = (boxcox(x, params.lambda) - params.mean) / params.stddev;
  return params.post_mean + params.post_std * z;
}

double normalize(double value, const BoxCoxParams &params) {
  return std::max(0.0, normalize_unclamped(value, params));
}

namespace {

nlohmann::json params_json(const BoxCoxParams &p) {
  return {{"lambda", p.lambda}, {"shift", p.shift},         {"mean", p.mean},
          {"stddev", p.stddev}, {"post_mean", p.post_mean}, {"post_std", p.post_std},
          {"degenerate", p.degenerate}};
}

BoxCoxParams params_of(const nlohmann::json &j) {
  BoxCoxParams p;
  p.lambda = j.at("lambda");
  p.shift = j.at("shift");
  p.mean = j.at("mean");
  p.stddev = j.at("stddev");
  p.post_mean = j.at("post_mean");
  p.post_std = j.at("post_std");
  p.degenerate = j.at("degenerate");
  return p;
}

}  // namespace

std::string to_json(const BoxCoxParams &params) { return params_json(params).dump(); }

BoxCoxParams params_from_json(const std::string &text) { return params_of(nlohmann::json::parse(text)); }

std::string model_to_json(const NormalizationModel &model) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto &[name, p] : model) j[name] = params_json(p);
  return j.dump(2);
}

NormalizationModel model_from_json(const std::string &text) {
  NormalizationModel model;
  const auto j = nlohmann::json::parse(text);
  for (const auto &[name, value] : j.items()) model[name] = params_of(value);
  return model;
}

double combine_complexity(double loc_n, double cc_n, double hv_n, double pcom_n) {
  return std::max(1.0, 0.5 * (loc_n + cc_n + hv_n - pcom_n) + 1.0);
}

double function_score(double delta_ast, double cm, double ip_n, double ir) {
  return delta_ast * cm * (ip_n + 1.0) * ir;
}

double commit_cvalue(const std::vector<double> &function_scores) {
  // Summing in sorted order makes the result independent of input order.
  std::vector<double> sorted = function_scores;
  std::sort(sorted.begin(), sorted.end());
  double total = 0.0;
  for (double s : sorted) total += s;
  return total;
}

}  // namespace cvalue::scoring
