#include "cvalue/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>

#include <spdlog/spdlog.h>

#include "cvalue/ast_diff.hpp"
#include "cvalue/complexity.hpp"
#include "cvalue/impact.hpp"
#include "cvalue/pdg.hpp"

namespace cvalue::pipeline {

namespace {

using Clock = std::chrono::steady_clock;

class StageTimer {
public:
  StageTimer(TimingReport &report, const char *stage) : report_(report), stage_(stage), start_(Clock::now()) {}
  ~StageTimer() {
    double s = std::chrono::duration<double>(Clock::now() - start_).count();
    report_.stages[stage_] += s;
    report_.total += s;
  }

private:
  TimingReport &report_;
  const char *stage_;
  Clock::time_point start_;
};

const syntax::LanguageAdapter *source_adapter(const std::string &path) {
  return syntax::AdapterRegistry::instance().for_path(path);
}

struct ParsedSide {
  std::optional<syntax::SyntaxTree> tree;
  std::vector<syntax::FunctionUnit> functions;
  bool failed = false;
};

ParsedSide parse_side(const std::optional<std::string> &content, const syntax::LanguageAdapter &adapter,
                      const std::string &path, const syntax::ParseOptions &options) {
  ParsedSide side;
  try {
    side.tree = syntax::parse_source(content ? *content : std::string{}, adapter.id(), options);
    side.functions = syntax::extract_functions(*side.tree, path);
  } catch (const syntax::ParseError &e) {
    spdlog::warn("skipping {}: parse error at offset {}: {}", path, e.position(), e.what());
    side.failed = true;
  }
  return side;
}

struct FileWork {
  repo::FileChange change;
  const syntax::LanguageAdapter *adapter = nullptr;
  ParsedSide before;
  ParsedSide after;
  std::vector<RawFunctionMetrics> records;
  bool skipped = false;
};

RawFunctionMetrics measure_changeset(const diff::FunctionChangeSet &set, const FileWork &work,
                                     const diff::NodeMapping &mapping, const graph::ImpactScores *impact,
                                     const Config &config) {
  RawFunctionMetrics r;
  r.file = work.change.path;
  r.function = set.function;
  r.actions = set.actions.size();
  r.delta_ast = diff::delta_ast(set, config.weights);
  r.file_scope = set.before_unit < 0 && set.after_unit < 0;
  r.new_function = set.before_unit < 0 && set.after_unit >= 0;
  r.deleted_function = set.before_unit >= 0 && set.after_unit < 0;
  if (r.file_scope) return r;

  const syntax::SyntaxTree &tree = set.after_unit >= 0 ? *work.after.tree : *work.before.tree;
  const syntax::FunctionUnit &unit = set.after_unit >= 0
                                         ? work.after.functions[static_cast<std::size_t>(set.after_unit)]
                                         : work.before.functions[static_cast<std::size_t>(set.before_unit)];
  auto cx = complexity::measure(tree, unit);
  r.loc = cx.loc;
  r.cc = cx.cc;
  r.hv = cx.hv;
  r.pcom = cx.pcom;
  if (set.after_unit >= 0 && impact != nullptr)
    r.ip_raw = impact->inter_impact(graph::FunctionId{work.change.path, unit.qualified_name});
  if (set.before_unit >= 0 && set.after_unit >= 0) {
    const auto &before_unit = work.before.functions[static_cast<std::size_t>(set.before_unit)];
    auto pdg_before = pdg::build_pdg(*work.before.tree, before_unit);
    auto pdg_after = pdg::build_pdg(*work.after.tree, unit);
    auto changed = pdg::changed_pdg_nodes(pdg_before, pdg_after, set, mapping);
    auto range = pdg::impact(pdg_after, changed);
    r.ddg_impact = range.ddg_impact;
    r.cdg_impact = range.cdg_impact;
    r.ir = range.ir;
  }
  return r;
}

void diff_file(FileWork &work, const graph::ImpactScores *impact, const Config &config) {
  const auto &before = *work.before.tree;
  const auto &after = *work.after.tree;
  auto mapping = diff::map_trees(before, after, config.match);
  auto actions = diff::edit_script(mapping, before, after);
  if (actions.empty()) return;
  auto sets = diff::group_by_function(actions, mapping, before, after, work.before.functions, work.after.functions,
                                      work.change.path);
  for (const auto &set : sets) work.records.push_back(measure_changeset(set, work, mapping, impact, config));
}

}  // namespace

std::vector<graph::FileUpdate> graph_updates(const std::vector<repo::FileChange> &changes,
                                             const syntax::ParseOptions &options) {
  std::vector<graph::FileUpdate> updates;
  for (const auto &change : changes) {
    if (change.binary) continue;
    if (change.kind == repo::ChangeKind::Renamed && source_adapter(change.old_path))
      updates.push_back({change.old_path, std::nullopt, false});
    const auto *adapter = source_adapter(change.path);
    if (!adapter) continue;
    graph::FileUpdate u;
    u.path = change.path;
    if (change.after_content) {
      auto side = parse_side(change.after_content, *adapter, change.path, options);
      if (side.failed) {
        u.stale = true;
      } else {
        u.facts = graph::extract_file_facts(change.path, *side.tree, side.functions);
      }
    }
    updates.push_back(std::move(u));
  }
  return updates;
}

graph::CallGraph full_graph_at(const repo::Repository &repository, const std::string &commit,
                               const syntax::ParseOptions &options) {
  std::vector<graph::FileFacts> files;
  std::set<std::string> stale;
  for (const auto &[path, blob] : repository.tree_of(commit)) {
    const auto *adapter = source_adapter(path);
    if (!adapter) continue;
    std::string content = repository.blob(blob);
    if (repo::is_binary(content)) continue;
    auto side = parse_side(content, *adapter, path, options);
    if (side.failed) {
      stale.insert(path);
      continue;
    }
    files.push_back(graph::extract_file_facts(path, *side.tree, side.functions));
  }
  auto g = graph::CallGraph::build(files);
  if (!stale.empty()) {
    std::vector<graph::FileUpdate> marks;
    for (const auto &p : stale) marks.push_back({p, std::nullopt, true});
    g.update(marks);
  }
  return g;
}

CommitAnalyzer::CommitAnalyzer(const repo::Repository &repository, const Config &config,
                               std::optional<std::filesystem::path> checkpoint_dir)
    : repo_(repository),
      config_(config),
      store_(checkpoint_dir ? graph::CheckpointStore(*checkpoint_dir) : graph::CheckpointStore()) {}

CommitScore CommitAnalyzer::analyze_commit(const repo::CommitRecord &commit, std::size_t children) {
  auto commit_start = Clock::now();
  CommitScore score;
  score.commit = commit.id;
  score.parents = commit.parent_ids;
  score.timestamp = commit.timestamp;
  score.author = repo::resolve_developer(commit, config_.bots);

  std::vector<FileWork> work;
  {
    StageTimer t(timing_, "ingest");
    for (auto &change : repo_.changed_files(commit)) {
      FileWork w;
      w.change = std::move(change);
      work.push_back(std::move(w));
    }
    std::sort(work.begin(), work.end(), [](const FileWork &a, const FileWork &b) { return a.change.path < b.change.path; });
  }
  score.files_changed = work.size();
  score.bulk = work.size() > config_.bulk_threshold;

  syntax::ParseOptions options;
  options.blacklist = config_.blacklist;
  {
    StageTimer t(timing_, "parse");
    const auto n = static_cast<std::ptrdiff_t>(work.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      FileWork &w = work[static_cast<std::size_t>(i)];
      if (w.change.binary) continue;
      w.adapter = source_adapter(w.change.path);
      if (!w.adapter) continue;
      const std::string &before_path = w.change.old_path.empty() ? w.change.path : w.change.old_path;
      w.before = parse_side(w.change.before_content, *w.adapter, before_path, options);
      w.after = parse_side(w.change.after_content, *w.adapter, w.change.path, options);
      w.skipped = w.before.failed || w.after.failed;
    }
  }
  for (const auto &w : work) {
    if (!w.adapter) continue;
    ++score.source_files;
    if (w.skipped) score.skipped_files.push_back(w.change.path);
  }

  {
    StageTimer t(timing_, "graph");
    std::string first_parent = commit.parent_ids.empty() ? std::string{} : commit.parent_ids.front();
    if (current_ != first_parent) {
      if (first_parent.empty()) {
        graph_ = graph::CallGraph{};
      } else {
        graph_ = store_.restore(first_parent);
        ++restores_;
        auto pending = pending_children_.find(first_parent);
        if (pending != pending_children_.end() && --pending->second == 0) {
          store_.erase(first_parent);
          pending_children_.erase(pending);
        }
      }
    }
    std::vector<graph::FileUpdate> updates;
    for (const auto &w : work) {
      if (w.change.binary) continue;
      if (w.change.kind == repo::ChangeKind::Renamed && source_adapter(w.change.old_path))
        updates.push_back({w.change.old_path, std::nullopt, false});
      if (!w.adapter) continue;
      graph::FileUpdate u;
      u.path = w.change.path;
      if (w.change.after_content) {
        if (w.after.failed) {
          u.stale = true;
        } else {
          u.facts = graph::extract_file_facts(w.change.path, *w.after.tree, w.after.functions);
        }
      }
      updates.push_back(std::move(u));
    }
    graph_.update(updates);
    current_ = commit.id;
    if (children >= 2) {
      store_.save(commit.id, graph_);
      pending_children_[commit.id] = children - 1;
    }
  }

  bool any_diff = std::any_of(work.begin(), work.end(), [](const FileWork &w) { return w.adapter && !w.skipped; });
  std::optional<graph::ImpactScores> impact;
  if (any_diff) {
    StageTimer t(timing_, "impact");
    impact = graph::compute_impact(graph_, config_.damping, config_.decay);
  }

  {
    StageTimer t(timing_, "diff");
    const auto n = static_cast<std::ptrdiff_t>(work.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      FileWork &w = work[static_cast<std::size_t>(i)];
      if (!w.adapter || w.skipped) continue;
      diff_file(w, impact ? &*impact : nullptr, config_);
    }
  }
  for (auto &w : work)
    for (auto &r : w.records) {
      if (r.file_scope) {
        score.file_scope_delta += r.delta_ast;
        continue;
      }
      FunctionScore fs;
      fs.raw = std::move(r);
      score.delta_ast += fs.raw.delta_ast;
      score.function_scores.push_back(std::move(fs));
    }

  timing_.commits.emplace_back(commit.id, std::chrono::duration<double>(Clock::now() - commit_start).count());
  if (on_graph_) on_graph_(commit, graph_);
  return score;
}

scoring::NormalizationModel fit_model(const std::vector<CommitScore> &commits, const scoring::FitOptions &options) {
  std::map<std::string, std::vector<double>> samples;
  for (const auto &c : commits)
    for (const auto &f : c.function_scores) {
      samples["loc"].push_back(static_cast<double>(f.raw.loc));
      samples["cc"].push_back(static_cast<double>(f.raw.cc));
      samples["hv"].push_back(f.raw.hv);
      samples["pcom"].push_back(f.raw.pcom);
      samples["ip"].push_back(f.raw.ip_raw);
      samples["ddg"].push_back(f.raw.ddg_impact);
      samples["cdg"].push_back(f.raw.cdg_impact);
    }
  scoring::NormalizationModel model;
  for (const char *metric : {"loc", "cc", "hv", "pcom", "ip", "ddg", "cdg"})
    model[metric] = scoring::fit_boxcox(samples[metric], options);
  return model;
}

void fuse(std::vector<CommitScore> &commits, const scoring::NormalizationModel &model) {
  for (auto &c : commits) {
    std::vector<double> scores;
    for (auto &f : c.function_scores) {
      auto &n = f.normalized;
      n.loc_n = scoring::normalize(static_cast<double>(f.raw.loc), model.at("loc"));
      n.cc_n = scoring::normalize(static_cast<double>(f.raw.cc), model.at("cc"));
      n.hv_n = scoring::normalize(f.raw.hv, model.at("hv"));
      n.pcom_n = scoring::normalize(f.raw.pcom, model.at("pcom"));
      n.ip_n = scoring::normalize(f.raw.ip_raw, model.at("ip"));
      n.ddg_n = scoring::normalize(f.raw.ddg_impact, model.at("ddg"));
      n.cdg_n = scoring::normalize(f.raw.cdg_impact, model.at("cdg"));
      f.cm = scoring::combine_complexity(n.loc_n, n.cc_n, n.hv_n, n.pcom_n);
      f.score = scoring::function_score(f.raw.delta_ast, f.cm, n.ip_n, f.raw.ir);
      scores.push_back(f.score);
    }
    c.cvalue = scoring::commit_cvalue(scores);
  }
}

TimingReport timing_report(const AnalysisRun &run) { return run.timing; }

namespace {

nlohmann::json raw_json(const RawFunctionMetrics &r) {
  return {{"file", r.file},
          {"function", r.function},
          {"file_scope", r.file_scope},
          {"new_function", r.new_function},
          {"deleted_function", r.deleted_function},
          {"actions", r.actions},
          {"delta_ast", r.delta_ast},
          {"loc", r.loc},
          {"cc", r.cc},
          {"hv", r.hv},
          {"pcom", r.pcom},
          {"ip_raw", r.ip_raw},
          {"ddg_impact", r.ddg_impact},
          {"cdg_impact", r.cdg_impact},
          {"ir", r.ir}};
}

RawFunctionMetrics raw_of(const nlohmann::json &j) {
  RawFunctionMetrics r;
  r.file = j.at("file");
  r.function = j.at("function");
  r.file_scope = j.at("file_scope");
  r.new_function = j.at("new_function");
  r.deleted_function = j.at("deleted_function");
  r.actions = j.at("actions");
  r.delta_ast = j.at("delta_ast");
  r.loc = j.at("loc");
  r.cc = j.at("cc");
  r.hv = j.at("hv");
  r.pcom = j.at("pcom");
  r.ip_raw = j.at("ip_raw");
  r.ddg_impact = j.at("ddg_impact");
  r.cdg_impact = j.at("cdg_impact");
  r.ir = j.at("ir");
  return r;
}

void write_file(const std::filesystem::path &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) spdlog::warn("cannot write {}", path.string());
}

}  // namespace

AnalysisRun analyze_repository(const std::filesystem::path &path, const Config &config,
                               const AnalyzeOptions &options) {
  AnalysisRun run;
  run.config = config;
  repo::Repository repository(path);
  run.repository = std::filesystem::weakly_canonical(std::filesystem::absolute(path)).string();
  auto tree = repository.load(options.branch);

  std::optional<std::filesystem::path> cache;
  if (options.cache_dir) {
    cache = *options.cache_dir / repository.fingerprint();
    std::filesystem::remove_all(*cache / "graph-checkpoints");
    std::filesystem::create_directories(*cache / "graph-checkpoints");
  }

  auto order = repo::walk_commits(tree);
  std::map<std::string, std::size_t> children;
  for (const auto &[id, c] : tree.commits)
    if (!c.parent_ids.empty() && tree.commits.contains(c.parent_ids.front())) ++children[c.parent_ids.front()];
  run.forks = repo::count_forks(tree);

  CommitAnalyzer analyzer(repository, run.config,
                          cache ? std::optional<std::filesystem::path>(*cache / "graph-checkpoints") : std::nullopt);
  analyzer.set_graph_observer(options.on_graph);
  for (const auto *commit : order) {
    auto it = children.find(commit->id);
    run.commits.push_back(analyzer.analyze_commit(*commit, it == children.end() ? 0 : it->second));
  }
  run.restores = analyzer.restores();
  run.timing = std::move(analyzer.timing());

  {
    StageTimer t(run.timing, "fit");
    run.model = fit_model(run.commits, config.fit);
  }
  {
    StageTimer t(run.timing, "fuse");
    fuse(run.commits, run.model);
  }

  if (cache) {
    std::string lines;
    for (const auto &c : run.commits)
      for (const auto &f : c.function_scores) {
        auto j = raw_json(f.raw);
        j["commit"] = c.commit;
        lines += j.dump() + "\n";
      }
    write_file(*cache / "raw-metrics.jsonl", lines);
    write_file(*cache / "boxcox-params.json", scoring::model_to_json(run.model));
  }
  return run;
}

nlohmann::json run_to_json(const AnalysisRun &run) {
  nlohmann::json commits = nlohmann::json::array();
  for (const auto &c : run.commits) {
    nlohmann::json functions = nlohmann::json::array();
    for (const auto &f : c.function_scores) {
      nlohmann::json fj = raw_json(f.raw);
      fj["normalized"] = {{"loc", f.normalized.loc_n}, {"cc", f.normalized.cc_n},   {"hv", f.normalized.hv_n},
                          {"pcom", f.normalized.pcom_n}, {"ip", f.normalized.ip_n}, {"ddg", f.normalized.ddg_n},
                          {"cdg", f.normalized.cdg_n}};
      fj["cm"] = f.cm;
      fj["score"] = f.score;
      functions.push_back(std::move(fj));
    }
    commits.push_back({{"commit", c.commit},
                       {"parents", c.parents},
                       {"author",
                        {{"email", c.author.email}, {"name", c.author.display_name}, {"is_bot", c.author.is_bot}}},
                       {"timestamp", c.timestamp},
                       {"bulk", c.bulk},
                       {"files_changed", c.files_changed},
                       {"source_files", c.source_files},
                       {"skipped_files", c.skipped_files},
                       {"delta_ast", c.delta_ast},
                       {"file_scope_delta", c.file_scope_delta},
                       {"cvalue", c.cvalue},
                       {"functions", std::move(functions)}});
  }
  nlohmann::json model = nlohmann::json::parse(scoring::model_to_json(run.model));
  nlohmann::json timing = {{"stages", run.timing.stages}, {"total", run.timing.total}};
  nlohmann::json per_commit = nlohmann::json::array();
  for (const auto &[id, s] : run.timing.commits) per_commit.push_back({{"commit", id}, {"seconds", s}});
  timing["commits"] = std::move(per_commit);
  return {{"repository", run.repository},
          {"config", run.config.to_json()},
          {"forks", run.forks},
          {"restores", run.restores},
          {"normalization", std::move(model)},
          {"commits", std::move(commits)},
          {"timing", std::move(timing)}};
}

AnalysisRun run_from_json(const nlohmann::json &j) {
  AnalysisRun run;
  run.repository = j.at("repository");
  run.config = Config::from_json(j.at("config"));
  run.forks = j.at("forks");
  run.restores = j.at("restores");
  run.model = scoring::model_from_json(j.at("normalization").dump());
  for (const auto &cj : j.at("commits")) {
    CommitScore c;
    c.commit = cj.at("commit");
    c.parents = cj.at("parents").get<std::vector<std::string>>();
    c.author.email = cj.at("author").at("email");
    c.author.display_name = cj.at("author").at("name");
    c.author.is_bot = cj.at("author").at("is_bot");
    c.timestamp = cj.at("timestamp");
    c.bulk = cj.at("bulk");
    c.files_changed = cj.at("files_changed");
    c.source_files = cj.at("source_files");
    c.skipped_files = cj.at("skipped_files").get<std::vector<std::string>>();
    c.delta_ast = cj.at("delta_ast");
    c.file_scope_delta = cj.at("file_scope_delta");
    c.cvalue = cj.at("cvalue");
    for (const auto &fj : cj.at("functions")) {
      FunctionScore f;
      f.raw = raw_of(fj);
      const auto &n = fj.at("normalized");
      f.normalized = {n.at("loc"), n.at("cc"), n.at("hv"), n.at("pcom"), n.at("ip"), n.at("ddg"), n.at("cdg")};
      f.cm = fj.at("cm");
      f.score = fj.at("score");
      c.function_scores.push_back(std::move(f));
    }
    run.commits.push_back(std::move(c));
  }
  if (j.contains("timing")) {
    const auto &t = j.at("timing");
    run.timing.stages = t.at("stages").get<std::map<std::string, double>>();
    run.timing.total = t.at("total");
    for (const auto &pc : t.at("commits")) run.timing.commits.emplace_back(pc.at("commit"), pc.at("seconds"));
  }
  return run;
}

}  // namespace cvalue::pipeline
