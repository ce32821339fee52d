// Box-Cox normalization of raw metrics and the fused per-function score.

#pragma once

#include <map>
#include <string>
#include <vector>

namespace cvalue::scoring {

struct BoxCoxParams {
  double lambda = 1.0;
  double shift = 0.0;
  // mean and population std of the transformed fitting sample
  double mean = 0.0;
  double stddev = 1.0;
  double post_mean = 1.0;
  double post_std = 1.0 / 3.0;
  // constant or too-small sample: every value normalizes to post_mean
  bool degenerate = false;
};

struct FitOptions {
  double lambda_min = -5.0;
  double lambda_max = 5.0;
  double lambda_step = 0.01;
  bool parallel = true;
};

/// Maximum-likelihood λ over the grid; ties go to the λ closest to 1.
BoxCoxParams fit_boxcox(const std::vector<double> &samples, const FitOptions &options = {});

double boxcox(double x, double lambda);

/// Affine-rescaled transform, clamped at 0.
double normalize(double value, const BoxCoxParams &params);

/// Unclamped version of normalize, for diagnostics.
double normalize_unclamped(double value, const BoxCoxParams &params);

std::string to_json(const BoxCoxParams &params);
BoxCoxParams params_from_json(const std::string &text);

/// Metric name -> fitted parameters.
using NormalizationModel = std::map<std::string, BoxCoxParams>;

std::string model_to_json(const NormalizationModel &model);
NormalizationModel model_from_json(const std::string &text);

struct NormalizedMetrics {
  double loc_n = 0.0;
  double cc_n = 0.0;
  double hv_n = 0.0;
  double pcom_n = 0.0;
  double ip_n = 0.0;
  double ddg_n = 0.0;
  double cdg_n = 0.0;
};

/// max(1, ½(loc + cc + hv − pcom) + 1)
double combine_complexity(double loc_n, double cc_n, double hv_n, double pcom_n);

/// delta_ast · cm · (ip_n + 1) · ir
double function_score(double delta_ast, double cm, double ip_n, double ir);

double commit_cvalue(const std::vector<double> &function_scores);

}  // namespace cvalue::scoring
