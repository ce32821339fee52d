#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "cvalue/pipeline.hpp"
#include "git_fixture.hpp"
#include "history.hpp"

using namespace cvalue;
using namespace cvalue::pipeline;

namespace {

const std::string kBase = R"(package demo;

public class Calc {
  static int total(int x) {
    int sum = x + 1;
    if (sum > 10) {
      sum = sum - 2;
    }
    return helper(sum);
  }

  static int helper(int y) {
    return y * 2;
  }
}
)";

// independent re-computation of a function's score from its raw metrics
double norm(double x, const scoring::BoxCoxParams &p) {
  if (p.degenerate) return 1.0;
  double v = x + p.shift;
  double t = p.lambda == 0.0 ? std::log(v) : (std::pow(v, p.lambda) - 1.0) / p.lambda;
  return std::max(0.0, p.post_mean + p.post_std * (t - p.mean) / p.stddev);
}

double expected_score(const RawFunctionMetrics &r, const scoring::NormalizationModel &m) {
  double cm = 0.5 * (norm(static_cast<double>(r.loc), m.at("loc")) + norm(static_cast<double>(r.cc), m.at("cc")) +
                     norm(r.hv, m.at("hv")) - norm(r.pcom, m.at("pcom"))) +
              1.0;
  cm = std::max(cm, 1.0);
  double ir = 1.0 + std::sqrt(r.ddg_impact) + std::sqrt(r.cdg_impact);
  return r.delta_ast * cm * (norm(r.ip_raw, m.at("ip")) + 1.0) * ir;
}

const CommitScore &by_message(const AnalysisRun &run, const std::string &id) {
  for (const auto &c : run.commits)
    if (c.commit == id) return c;
  FAIL("commit not in run");
  return run.commits.front();
}

}  // namespace

TEST_CASE("an empty repository gives an empty run") {
  fixture::GitRepo g;
  auto run = analyze_repository(g.root(), Config{});
  CHECK(run.commits.empty());
  CHECK(run.timing.total >= 0.0);
  CHECK(run.timing.commits.empty());
}

TEST_CASE("one commit adding one function") {
  fixture::GitRepo g;
  g.write("A.java", "class A {\n  int f(int x) {\n    return x + 1;\n  }\n}\n");
  g.commit("add f");
  auto run = analyze_repository(g.root(), Config{});
  REQUIRE(run.commits.size() == 1);
  const auto &c = run.commits[0];
  REQUIRE(c.function_scores.size() == 1);
  CHECK(c.function_scores[0].raw.function == "A.f(int)");
  CHECK(c.function_scores[0].raw.new_function);
  CHECK(c.function_scores[0].raw.ir == 1.0);
  CHECK(c.cvalue > 0.0);
  CHECK(c.file_scope_delta > 0.0);
}

TEST_CASE("comment-only, format-only and non-source commits score zero") {
  fixture::GitRepo g;
  g.write("src/Calc.java", kBase);
  g.commit("base");
  std::string commented = kBase;
  commented.replace(commented.find("    int sum"), 0, "    // start from x\n");
  commented.replace(commented.find("  static int helper"), 0, "  /** Doubles. */\n");
  g.write("src/Calc.java", commented);
  auto comment = g.commit("comments");
  std::string formatted = commented;
  for (auto pos = formatted.find("  "); pos != std::string::npos; pos = formatted.find("  ", pos)) formatted.erase(pos, 1);
  g.write("src/Calc.java", formatted);
  auto format = g.commit("format");
  g.write("README.md", "# demo\n");
  auto docs = g.commit("docs");

  auto run = analyze_repository(g.root(), Config{});
  REQUIRE(run.commits.size() == 4);
  for (const auto &id : {comment, format, docs}) {
    const auto &c = by_message(run, id);
    CHECK(c.cvalue == 0.0);
    CHECK(c.delta_ast == 0.0);
  }
  CHECK(by_message(run, docs).source_files == 0);
}

TEST_CASE("a rename-only commit is one percent of the same edit counted in full") {
  fixture::GitRepo g;
  g.write("src/Calc.java", kBase);
  g.commit("base");
  std::string renamed = kBase;
  for (auto pos = renamed.find("sum"); pos != std::string::npos; pos = renamed.find("sum", pos)) renamed.replace(pos, 3, "acc");
  g.write("src/Calc.java", renamed);
  auto id = g.commit("rename");

  Config plain;
  Config full = plain;
  full.weights.name_only_factor = 1.0;
  auto a = analyze_repository(g.root(), plain);
  auto b = analyze_repository(g.root(), full);
  double renamed_value = by_message(a, id).cvalue;
  double retyped_value = by_message(b, id).cvalue;
  CHECK(renamed_value > 0.0);
  CHECK(renamed_value <= 0.01 * retyped_value * (1 + 1e-12));
}

TEST_CASE("scores match a recomputation from raw metrics") {
  fixture::GitRepo g;
  g.write("src/Calc.java", kBase);
  g.commit("base");
  std::string mixed = kBase;
  mixed.replace(mixed.find("sum - 2"), 7, "sum - 3 * x");
  mixed.replace(mixed.find("return y * 2;"), 13, "int z = y * 2;\n    if (z < 0 || y > 100) {\n      z = 0;\n    }\n    return z;");
  mixed.replace(mixed.rfind("}"), 0, "\n  static int extra(int q) {\n    return helper(q) + total(q);\n  }\n");
  g.write("src/Calc.java", mixed);
  auto mixed_id = g.commit("mixed");
  g.write("src/Util.java", "package demo;\n\nclass Util {\n  static int use(int v) {\n    return Calc.total(v) + Calc.helper(v);\n  }\n}\n");
  auto util_id = g.commit("util");

  auto run = analyze_repository(g.root(), Config{});
  for (const auto &c : run.commits) {
    double sum = 0.0;
    for (const auto &f : c.function_scores) {
      double expect = expected_score(f.raw, run.model);
      CHECK(f.score == doctest::Approx(expect).epsilon(1e-12));
      CHECK(f.cm >= 1.0);
      CHECK(f.raw.ir >= 1.0);
      CHECK(f.raw.ir <= 3.0);
      sum += expect;
    }
    CHECK(c.cvalue == doctest::Approx(sum).epsilon(1e-12));
  }
  const auto &m = by_message(run, mixed_id);
  std::vector<std::string> names;
  for (const auto &f : m.function_scores) names.push_back(f.raw.function);
  std::sort(names.begin(), names.end());
  CHECK(names == std::vector<std::string>{"Calc.extra(int)", "Calc.helper(int)", "Calc.total(int)"});
  for (const auto &f : m.function_scores) {
    if (f.raw.function == "Calc.helper(int)") {
      CHECK(f.raw.cc == 3);
      CHECK(f.raw.ir > 1.0);
      CHECK_FALSE(f.raw.new_function);
    }
    if (f.raw.function == "Calc.extra(int)") {
      CHECK(f.raw.new_function);
      CHECK(f.raw.ir == 1.0);
    }
  }
  CHECK(by_message(run, util_id).function_scores.size() == 1);
}

TEST_CASE("parse errors skip only the broken file") {
  fixture::GitRepo g;
  g.write("A.java", "class A { int f() { return 1; } }");
  g.write("B.java", "class B { int g() { return 1; } }");
  g.commit("base");
  g.write("A.java", "class A { int f() { return 1 }");
  g.write("B.java", "class B { int g() { return 2; } }");
  auto id = g.commit("half broken");
  auto run = analyze_repository(g.root(), Config{});
  const auto &c = by_message(run, id);
  CHECK(c.skipped_files == std::vector<std::string>{"A.java"});
  REQUIRE(c.function_scores.size() == 1);
  CHECK(c.function_scores[0].raw.function == "B.g()");
  CHECK(c.cvalue > 0.0);
}

TEST_CASE("bulk commits are flagged") {
  fixture::GitRepo g;
  for (int i = 0; i < 4; ++i) g.write("F" + std::to_string(i) + ".java", "class F" + std::to_string(i) + " {}");
  g.commit("four files");
  Config c;
  c.bulk_threshold = 3;
  CHECK(analyze_repository(g.root(), c).commits[0].bulk);
  c.bulk_threshold = 4;
  CHECK_FALSE(analyze_repository(g.root(), c).commits[0].bulk);
}

TEST_CASE("forked history: graph matches a full rebuild at every commit") {
  fixture::GitRepo g;
  auto history = fixture::build_history(g, 42, 8, 3);
  repo::Repository repository(g.root());
  std::size_t checked = 0;
  AnalyzeOptions options;
  options.on_graph = [&](const repo::CommitRecord &commit, const graph::CallGraph &graph) {
    auto full = full_graph_at(repository, commit.id, {});
    CHECK(graph.structurally_equal(full));
    ++checked;
  };
  auto dir = std::filesystem::temp_directory_path() / "cvalue-pipeline-cache";
  std::filesystem::remove_all(dir);
  options.cache_dir = dir;
  auto run = analyze_repository(g.root(), Config{}, options);
  CHECK(checked == history.commits.size());
  CHECK(run.commits.size() == history.commits.size());
  CHECK(run.forks == history.forks);
  CHECK(run.restores == run.forks);

  auto cache = dir / repository.fingerprint();
  CHECK(std::filesystem::is_directory(cache / "graph-checkpoints"));
  CHECK(std::filesystem::exists(cache / "raw-metrics.jsonl"));
  CHECK(std::filesystem::exists(cache / "boxcox-params.json"));
  CHECK(std::filesystem::is_empty(cache / "graph-checkpoints"));  // every fork was resumed
  std::filesystem::remove_all(dir);

  SUBCASE("timing covers every stage and commit") {
    double sum = 0.0;
    for (const auto &[stage, s] : run.timing.stages) sum += s;
    CHECK(run.timing.total == doctest::Approx(sum).epsilon(1e-9));
    CHECK(run.timing.commits.size() == run.commits.size());
    for (const auto &[id, s] : run.timing.commits) CHECK(s >= 0.0);
    for (const char *stage : {"ingest", "parse", "graph", "impact", "diff", "fit", "fuse"})
      CHECK(run.timing.stages.contains(stage));
    CHECK(timing_report(run).total == run.timing.total);
  }

  SUBCASE("re-running gives identical scores") {
    auto again = analyze_repository(g.root(), Config{});
    auto a = run_to_json(run);
    auto b = run_to_json(again);
    a.erase("timing");
    b.erase("timing");
    CHECK(a.dump() == b.dump());
  }

  SUBCASE("run JSON round trip") {
    auto j = run_to_json(run);
    auto back = run_from_json(j);
    CHECK(run_to_json(back).dump() == j.dump());
  }
}
