// Whole-repository analysis: walk commits depth-first, keep the call graph
// in step, collect raw per-function metrics, then fit normalization and fuse
// the scores.

#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cvalue/call_graph.hpp"
#include "cvalue/config.hpp"
#include "cvalue/repo.hpp"
#include "cvalue/scoring.hpp"
#include "json.hpp"

namespace cvalue::pipeline {

struct RawFunctionMetrics {
  std::string file;
  std::string function;
  bool file_scope = false;
  bool new_function = false;
  bool deleted_function = false;
  std::size_t actions = 0;
  double delta_ast = 0.0;
  std::size_t loc = 0;
  std::size_t cc = 1;
  double hv = 0.0;
  double pcom = 0.0;
  double ip_raw = 0.0;
  double ddg_impact = 0.0;
  double cdg_impact = 0.0;
  double ir = 1.0;
};

struct FunctionScore {
  RawFunctionMetrics raw;
  scoring::NormalizedMetrics normalized;
  double cm = 1.0;
  double score = 0.0;
};

struct CommitScore {
  std::string commit;
  std::vector<std::string> parents;
  repo::DeveloperIdentity author;
  long long timestamp = 0;
  bool bulk = false;
  std::size_t files_changed = 0;
  std::size_t source_files = 0;
  std::vector<std::string> skipped_files;
  std::vector<FunctionScore> function_scores;
  double delta_ast = 0.0;         // summed over function changesets
  double file_scope_delta = 0.0;  // edits outside any function, not scored
  double cvalue = 0.0;
};

struct TimingReport {
  std::map<std::string, double> stages;           // seconds per stage
  std::vector<std::pair<std::string, double>> commits;  // seconds per commit, walk order
  double total = 0.0;                              // sum of stage times
};

struct AnalysisRun {
  std::string repository;
  Config config;
  std::vector<CommitScore> commits;  // walk order
  scoring::NormalizationModel model;
  std::size_t forks = 0;
  std::size_t restores = 0;
  TimingReport timing;
};

struct AnalyzeOptions {
  std::optional<std::string> branch;
  std::optional<std::filesystem::path> cache_dir;
  /// Called after the graph is brought up to date for each commit.
  std::function<void(const repo::CommitRecord &, const graph::CallGraph &)> on_graph;
};

/// Per-commit raw phase with the state carried along the walk.
class CommitAnalyzer {
public:
  CommitAnalyzer(const repo::Repository &repository, const Config &config,
                 std::optional<std::filesystem::path> checkpoint_dir = std::nullopt);

  /// `children` is the number of first-parent children of `commit`; forks
  /// are checkpointed so that later siblings can restore them.
  CommitScore analyze_commit(const repo::CommitRecord &commit, std::size_t children);

  void set_graph_observer(std::function<void(const repo::CommitRecord &, const graph::CallGraph &)> observer) {
    on_graph_ = std::move(observer);
  }

  const graph::CallGraph &graph() const { return graph_; }
  std::size_t restores() const { return restores_; }
  TimingReport &timing() { return timing_; }

private:
  const repo::Repository &repo_;
  const Config &config_;
  graph::CallGraph graph_;
  graph::CheckpointStore store_;
  std::map<std::string, std::size_t> pending_children_;
  std::string current_;
  std::size_t restores_ = 0;
  TimingReport timing_;
  std::function<void(const repo::CommitRecord &, const graph::CallGraph &)> on_graph_;
};

AnalysisRun analyze_repository(const std::filesystem::path &path, const Config &config,
                               const AnalyzeOptions &options = {});

/// Fits one Box-Cox model per metric over all function-level observations.
scoring::NormalizationModel fit_model(const std::vector<CommitScore> &commits, const scoring::FitOptions &options);

/// Fills normalized metrics, CM and scores from raw values.
void fuse(std::vector<CommitScore> &commits, const scoring::NormalizationModel &model);

TimingReport timing_report(const AnalysisRun &run);

/// Graph facts for the source files touched by a set of changes.
std::vector<graph::FileUpdate> graph_updates(const std::vector<repo::FileChange> &changes,
                                             const syntax::ParseOptions &options);

/// Call graph built from scratch over every source file at `commit`.
graph::CallGraph full_graph_at(const repo::Repository &repository, const std::string &commit,
                               const syntax::ParseOptions &options);

nlohmann::json run_to_json(const AnalysisRun &run);
AnalysisRun run_from_json(const nlohmann::json &j);

}  // namespace cvalue::pipeline
