#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "cvalue/config.hpp"
#include "cvalue/pipeline.hpp"
#include "cvalue/report.hpp"

namespace {

enum Exit { kOk = 0, kUsage = 1, kRepository = 2, kEvaluation = 3 };

using namespace cvalue;

pipeline::AnalysisRun read_run(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read run file " + path);
  return pipeline::run_from_json(nlohmann::json::parse(in));
}

int cmd_analyze(const std::string &repo_path, const std::string &branch, const std::string &config_path,
                const std::string &cache, const std::string &output) {
  Config config;
  if (!config_path.empty()) config = Config::load(config_path);
  pipeline::AnalyzeOptions options;
  if (!branch.empty()) options.branch = branch;
  if (!cache.empty()) options.cache_dir = cache;
  auto run = pipeline::analyze_repository(repo_path, config, options);
  std::ofstream out(output, std::ios::binary);
  out << pipeline::run_to_json(run).dump(2) << '\n';
  out.close();
  if (!out) {
    spdlog::error("cannot write {}", output);
    return kUsage;
  }
  spdlog::info("analyzed {} commits ({} forks) in {:.2f}s, wrote {}", run.commits.size(), run.forks,
               run.timing.total, output);
  return kOk;
}

int cmd_report(const std::string &run_path, const std::string &format, bool inflated, const std::string &out_dir) {
  auto run = read_run(run_path);
  auto reports = report::aggregate_by_developer(run);
  auto flagged =
      report::detect_inflated(reports, run.config.inflated_commit_share_min, run.config.inflated_ratio_max);
  auto files = report::emit_report(run, reports, format == "csv" ? report::Format::Csv : report::Format::Json,
                                   out_dir);
  for (const auto &f : files) std::cout << f.string() << '\n';
  if (inflated) {
    for (const auto &r : flagged)
      std::cout << "inflated: " << r.identity.email << " commit_share=" << r.commit_share
                << " cvalue_share=" << r.cvalue_share << '\n';
  }
  return kOk;
}

int cmd_eval(const std::string &labels_path, const std::string &run_path) {
  auto labels = report::load_labels(labels_path);
  pipeline::AnalysisRun run;
  try {
    run = read_run(run_path);
  } catch (const std::exception &e) {
    throw report::EvaluationInputError(e.what());
  }
  auto pair = report::evaluate(run, labels);
  std::cout << "commits=" << pair.labels.size() << " spearman=" << pair.r_s << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char **argv) {
  auto logger = spdlog::stderr_color_mt("cvalue");
  spdlog::set_default_logger(logger);

  CLI::App app{"Commit contribution scoring for git repositories"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Debug logging");

  auto *analyze = app.add_subcommand("analyze", "Score every commit of a repository");
  std::string repo_path, branch, config_path, cache, output = "cvalue-run.json";
  analyze->add_option("repo", repo_path, "Repository path")->required();
  analyze->add_option("--branch", branch, "Only commits reachable from this branch");
  analyze->add_option("--config", config_path, "INI configuration file");
  analyze->add_option("--cache", cache, "Cache directory for checkpoints and fitted parameters");
  analyze->add_option("--output,-o", output, "Run file to write")->capture_default_str();

  auto *rep = app.add_subcommand("report", "Per-developer tables from a run file");
  std::string run_path, format = "json", out_dir = "cvalue-report";
  bool inflated = false;
  rep->add_option("run", run_path, "Run file written by analyze")->required();
  rep->add_option("--format", format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  rep->add_flag("--inflated", inflated, "List developers flagged for inflated commits");
  rep->add_option("--out", out_dir, "Output directory")->capture_default_str();

  auto *ev = app.add_subcommand("eval", "Spearman correlation against labelled commits");
  std::string labels_path, eval_run;
  ev->add_option("--labels", labels_path, "CSV of commit-id,score")->required();
  ev->add_option("--run", eval_run, "Run file written by analyze")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }
  spdlog::set_level(verbose ? spdlog::level::debug : spdlog::level::info);

  try {
    if (*analyze) return cmd_analyze(repo_path, branch, config_path, cache, output);
    if (*rep) return cmd_report(run_path, format, inflated, out_dir);
    if (*ev) return cmd_eval(labels_path, eval_run);
  } catch (const ConfigError &e) {
    spdlog::error("config: {}", e.what());
    return kUsage;
  } catch (const repo::RepositoryError &e) {
    spdlog::error("repository: {}", e.what());
    return kRepository;
  } catch (const report::EvaluationInputError &e) {
    spdlog::error("evaluation input: {}", e.what());
    return kEvaluation;
  } catch (const std::exception &e) {
    spdlog::error("{}", e.what());
    return kUsage;
  }
  return kUsage;
}
