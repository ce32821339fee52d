#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "cvalue/scoring.hpp"
#include "samples.hpp"

using namespace cvalue::scoring;

namespace {

std::vector<double> normalized(const std::vector<double> &xs, const BoxCoxParams &p) {
  std::vector<double> out;
  for (double x : xs) out.push_back(normalize(x, p));
  return out;
}

}  // namespace

TEST_CASE("lognormal samples become symmetric") {
  std::mt19937 rng(17);
  std::lognormal_distribution<double> dist(1.0, 0.8);
  std::vector<double> xs(2000);
  for (auto &x : xs) x = dist(rng);
  auto p = fit_boxcox(xs);
  CHECK(std::abs(p.lambda) < 0.1);
  std::vector<double> t;
  for (double x : xs) t.push_back(boxcox(x + p.shift, p.lambda));
  CHECK(std::abs(fixture::skewness(t)) < 0.2);
  auto n = normalized(xs, p);
  CHECK(fixture::mean(n) == doctest::Approx(1.0).epsilon(0.01));
  CHECK(fixture::stddev(n) == doctest::Approx(1.0 / 3.0).epsilon(0.02));
}

TEST_CASE("degenerate samples map to one") {
  auto p = fit_boxcox(std::vector<double>(50, 5.0));
  CHECK(p.degenerate);
  for (double x : {0.0, 5.0, 123.0}) CHECK(normalize(x, p) == 1.0);
  CHECK(fit_boxcox({}).degenerate);
  CHECK(fit_boxcox({3.0}).degenerate);
  CHECK(normalize(7.0, fit_boxcox({})) == 1.0);
}

TEST_CASE("heavy-tailed complexity profile") {
  auto xs = fixture::heavy_tailed_cc_profile();
  CHECK(fixture::mean(xs) == doctest::Approx(13.41).epsilon(0.01));
  CHECK(fixture::median(xs) == 3.0);
  CHECK(fixture::stddev(xs) == doctest::Approx(78.81).epsilon(0.01));
  CHECK(*std::max_element(xs.begin(), xs.end()) == 6667.0);
  auto p = fit_boxcox(xs);
  auto n = normalized(xs, p);
  CHECK(std::abs(fixture::mean(n) - 1.0) <= 0.05);
  CHECK(std::abs(fixture::stddev(n) - 1.0 / 3.0) <= 0.05);
  CHECK(*std::min_element(n.begin(), n.end()) >= 0.0);
}

TEST_CASE("shift makes non-positive samples usable") {
  std::vector<double> xs;
  for (int i = -10; i < 40; ++i) xs.push_back(i);
  auto p = fit_boxcox(xs);
  CHECK(p.shift == 11.0);
  std::vector<double> pos;
  for (int i = 1; i < 51; ++i) pos.push_back(i);
  CHECK(fit_boxcox(pos).shift == 0.0);
}

TEST_CASE("normalization is monotone and clamps at zero") {
  std::mt19937 rng(19);
  std::exponential_distribution<double> dist(0.3);
  std::vector<double> xs(500);
  for (auto &x : xs) x = dist(rng);
  auto p = fit_boxcox(xs);
  double prev = -1.0;
  for (double v = 0.0; v < 40.0; v += 0.05) {
    double n = normalize(v, p);
    CHECK(n >= 0.0);
    CHECK(n >= prev);
    prev = n;
  }
  BoxCoxParams manual;
  manual.lambda = 1.0;
  manual.mean = boxcox(10.0, 1.0);
  manual.stddev = 1.0;
  CHECK(normalize_unclamped(1.0, manual) < 0.0);
  CHECK(normalize(1.0, manual) == 0.0);
  CHECK(normalize(10.0, manual) == doctest::Approx(1.0));
}

TEST_CASE("fit is deterministic and kernels agree") {
  auto xs = fixture::heavy_tailed_cc_profile();
  FitOptions serial;
  serial.parallel = false;
  auto a = fit_boxcox(xs, serial);
  auto b = fit_boxcox(xs);
  CHECK(a.lambda == b.lambda);
  CHECK(a.mean == b.mean);
  CHECK(a.stddev == b.stddev);
}

TEST_CASE("parameters round-trip through JSON") {
  auto p = fit_boxcox(fixture::heavy_tailed_cc_profile());
  auto q = params_from_json(to_json(p));
  CHECK(q.lambda == p.lambda);
  CHECK(q.shift == p.shift);
  CHECK(q.mean == p.mean);
  CHECK(q.stddev == p.stddev);
  CHECK(q.degenerate == p.degenerate);
  NormalizationModel m{{"cc", p}, {"loc", fit_boxcox({})}};
  auto back = model_from_json(model_to_json(m));
  CHECK(back.size() == 2);
  CHECK(back.at("cc").lambda == p.lambda);
  CHECK(back.at("loc").degenerate);
}

TEST_CASE("complexity fusion") {
  CHECK(combine_complexity(1, 1, 1, 1) == 2.0);
  CHECK(combine_complexity(0, 0, 0, 0) == 1.0);
  CHECK(combine_complexity(2, 2, 2, 0) == 4.0);
  CHECK(combine_complexity(0, 0, 0, 3) == 1.0);
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  for (int i = 0; i < 10000; ++i) CHECK(combine_complexity(u(rng), u(rng), u(rng), u(rng)) >= 1.0);
}

TEST_CASE("scores and commit values") {
  CHECK(function_score(0, 2, 1, 1) == 0.0);
  CHECK(function_score(1, 2, 1, 1) == 4.0);
  CHECK(function_score(4, 2, 0, 1.5) == 12.0);
  CHECK(commit_cvalue({}) == 0.0);
  CHECK(commit_cvalue({4, 12}) == 16.0);
  std::vector<double> xs{0.1, 1e10, 3.3, -0.0, 7.0, 1e-7, 42.0};
  double v = commit_cvalue(xs);
  std::sort(xs.begin(), xs.end());
  do {
    CHECK(commit_cvalue(xs) == v);
  } while (std::next_permutation(xs.begin(), xs.end()));
  // monotone in delta_ast
  double prev = 0.0;
  for (double d = 0.0; d < 10.0; d += 0.5) {
    double s = commit_cvalue({function_score(d, 1.7, 0.4, 1.2), 3.0});
    CHECK(s >= prev);
    prev = s;
  }
}
