// Per-developer aggregation, inflated-commit detection, rank correlation and
// report output.

#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "cvalue/pipeline.hpp"
#include "json.hpp"

namespace cvalue::report {

inline constexpr int kSchemaVersion = 1;

struct DeveloperReport {
  repo::DeveloperIdentity identity;
  std::size_t commit_count = 0;
  double commit_share = 0.0;
  double cvalue_total = 0.0;
  double cvalue_share = 0.0;
  bool inflated = false;
  bool zero_syntax = false;
};

/// One report per author email, sorted by email. Shares count every commit,
/// including those that score zero.
std::vector<DeveloperReport> aggregate_by_developer(const pipeline::AnalysisRun &run);

/// Sets `inflated` on every report and returns the flagged subset:
/// commit_share > commit_share_min and cvalue_share < ratio_max * commit_share.
std::vector<DeveloperReport> detect_inflated(std::vector<DeveloperReport> &reports, double commit_share_min = 0.01,
                                             double ratio_max = 0.20);

class ZeroVariance : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

class EvaluationInputError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Average ranks, 1-based; ties share the mean of their positions.
std::vector<double> average_ranks(const std::vector<double> &values);

/// Pearson correlation of the average ranks. Throws std::invalid_argument
/// on mismatched or too-short input and ZeroVariance on constant ranks.
double spearman(const std::vector<double> &xs, const std::vector<double> &ys);

enum class Format { Json, Csv };

nlohmann::json report_json(const pipeline::AnalysisRun &run, const std::vector<DeveloperReport> &reports);
std::string developers_csv(const std::vector<DeveloperReport> &reports);
std::string commits_csv(const pipeline::AnalysisRun &run);

/// Writes report.json, or developers.csv and commits.csv, into `directory`.
/// Returns the files written. Throws std::runtime_error on I/O failure.
std::vector<std::filesystem::path> emit_report(const pipeline::AnalysisRun &run,
                                               const std::vector<DeveloperReport> &reports, Format format,
                                               const std::filesystem::path &directory);

/// commit id -> score, from "commit-id,score" lines. A header line whose
/// score column is not numeric is skipped. Throws EvaluationInputError.
std::map<std::string, double> load_labels(const std::filesystem::path &file);

struct EvaluationPair {
  std::vector<std::string> commits;
  std::vector<double> labels;
  std::vector<double> predictions;
  double r_s = 0.0;
};

/// Joins labels with run CValues on commit id (prefixes of at least seven
/// characters also match). Throws EvaluationInputError when fewer than two
/// commits pair up or a labelled commit is absent from the run.
EvaluationPair evaluate(const pipeline::AnalysisRun &run, const std::map<std::string, double> &labels);

}  // namespace cvalue::report
