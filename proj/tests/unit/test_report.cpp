#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "cvalue/report.hpp"
#include "git_fixture.hpp"
#include "oracles.hpp"

using namespace cvalue;
using namespace cvalue::report;

namespace {

pipeline::AnalysisRun synthetic_run(const std::vector<std::pair<std::string, double>> &commits) {
  pipeline::AnalysisRun run;
  int i = 0;
  for (const auto &[email, value] : commits) {
    pipeline::CommitScore c;
    c.commit = "c" + std::to_string(i++);
    c.author.email = email;
    c.author.display_name = email.substr(0, email.find('@'));
    c.cvalue = value;
    run.commits.push_back(c);
  }
  return run;
}

DeveloperReport dev(double commit_share, double cvalue_share) {
  DeveloperReport r;
  r.commit_share = commit_share;
  r.cvalue_share = cvalue_share;
  return r;
}

std::string slurp(const std::filesystem::path &p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path temp_dir(const std::string &name) {
  auto d = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(d);
  return d;
}

}  // namespace

TEST_CASE("aggregation") {
  SUBCASE("single developer") {
    auto reports = aggregate_by_developer(synthetic_run({{"a@x", 2.0}, {"a@x", 0.0}}));
    REQUIRE(reports.size() == 1);
    CHECK(reports[0].commit_share == 1.0);
    CHECK(reports[0].cvalue_share == 1.0);
    CHECK(reports[0].commit_count == 2);
    CHECK_FALSE(reports[0].zero_syntax);
  }
  SUBCASE("two developers") {
    auto reports =
        aggregate_by_developer(synthetic_run({{"a@x", 0.5}, {"a@x", 0.25}, {"a@x", 0.25}, {"b@x", 3.0}}));
    REQUIRE(reports.size() == 2);
    CHECK(reports[0].identity.email == "a@x");
    CHECK(reports[0].commit_share == 0.75);
    CHECK(reports[1].commit_share == 0.25);
    CHECK(reports[0].cvalue_share == 0.25);
    CHECK(reports[1].cvalue_share == 0.75);
  }
  SUBCASE("shares sum to one") {
    std::mt19937 rng(37);
    std::vector<std::pair<std::string, double>> commits;
    for (int i = 0; i < 300; ++i)
      commits.emplace_back("d" + std::to_string(rng() % 17) + "@x", (rng() % 3) ? std::uniform_real_distribution<double>(0, 50)(rng) : 0.0);
    auto reports = aggregate_by_developer(synthetic_run(commits));
    double cs = 0, vs = 0;
    for (const auto &r : reports) {
      cs += r.commit_share;
      vs += r.cvalue_share;
    }
    CHECK(std::abs(cs - 1.0) <= 1e-9);
    CHECK(std::abs(vs - 1.0) <= 1e-9);
  }
  SUBCASE("all-zero runs have zero value shares") {
    auto reports = aggregate_by_developer(synthetic_run({{"a@x", 0.0}, {"b@x", 0.0}}));
    for (const auto &r : reports) {
      CHECK(r.cvalue_share == 0.0);
      CHECK(r.zero_syntax);
    }
  }
}

TEST_CASE("a documentation-only committer has zero syntax contribution") {
  fixture::GitRepo g;
  fixture::Author dev{"Dev", "dev@example.com"}, writer{"Writer", "Writer@Example.com"};
  g.write("A.java", "class A {\n  int f(int x) {\n    return x;\n  }\n}\n");
  g.commit("code", dev);
  g.write("README.md", "# A\n");
  g.commit("docs", writer);
  g.write("A.java", "class A {\n  // identity\n  int f(int x) {\n    return x;\n  }\n}\n");
  g.commit("comment", writer);
  auto run = pipeline::analyze_repository(g.root(), Config{});
  auto reports = aggregate_by_developer(run);
  REQUIRE(reports.size() == 2);
  CHECK(reports[0].identity.email == "dev@example.com");
  CHECK_FALSE(reports[0].zero_syntax);
  CHECK(reports[1].identity.email == "writer@example.com");
  CHECK(reports[1].zero_syntax);
  CHECK(reports[1].commit_count == 2);
}

TEST_CASE("inflated-commit detection") {
  std::vector<DeveloperReport> reports{dev(0.2217, 0.0204), dev(0.005, 0.0), dev(0.5, 0.1), dev(0.2, 0.3)};
  auto flagged = detect_inflated(reports);
  CHECK(reports[0].inflated);
  CHECK_FALSE(reports[1].inflated);
  CHECK_FALSE(reports[2].inflated);  // exactly at the boundary
  CHECK_FALSE(reports[3].inflated);
  CHECK(flagged.size() == 1);

  std::mt19937 rng(41);
  std::uniform_real_distribution<double> u(0.0, 0.5);
  for (int i = 0; i < 500; ++i) {
    std::vector<DeveloperReport> rs;
    for (int k = 0; k < 10; ++k) rs.push_back(dev(u(rng), u(rng)));
    double lo = u(rng), hi = lo + u(rng);
    auto a = rs, b = rs;
    detect_inflated(a, 0.01, lo);
    detect_inflated(b, 0.01, hi);
    for (std::size_t k = 0; k < rs.size(); ++k)
      if (a[k].inflated) CHECK(b[k].inflated);
  }
}

TEST_CASE("spearman") {
  std::vector<double> xs{1, 2, 3, 4, 5};
  CHECK(spearman(xs, xs) == 1.0);
  CHECK(spearman(xs, {5, 4, 3, 2, 1}) == -1.0);
  CHECK(spearman({1, 2, 3, 4}, {2, 1, 4, 3}) == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(average_ranks({10, 20, 20, 5}) == std::vector<double>{2, 3.5, 3.5, 1});
  CHECK_THROWS_AS(spearman({1, 1, 1}, {1, 2, 3}), ZeroVariance);
  CHECK_THROWS_AS(spearman({1}, {1}), std::invalid_argument);
  CHECK_THROWS_AS(spearman({1, 2}, {1, 2, 3}), std::invalid_argument);

  std::mt19937 rng(43);
  for (int trial = 0; trial < 300; ++trial) {
    std::size_t n = 2 + rng() % 30;
    std::vector<double> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = static_cast<double>(rng() % 6);
      b[i] = static_cast<double>(rng() % 6);
    }
    auto ra = oracle::ranks(a), rb = oracle::ranks(b);
    if (std::all_of(ra.begin(), ra.end(), [&](double r) { return r == ra[0]; }) ||
        std::all_of(rb.begin(), rb.end(), [&](double r) { return r == rb[0]; })) {
      CHECK_THROWS_AS(spearman(a, b), ZeroVariance);
      continue;
    }
    CHECK(std::abs(spearman(a, b) - oracle::spearman(a, b)) <= 1e-9);
    std::vector<double> affine;
    for (double x : a) affine.push_back(3.5 * x - 2.0);
    CHECK(spearman(a, affine) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("report output") {
  SUBCASE("empty run") {
    pipeline::AnalysisRun run;
    auto dir = temp_dir("cvalue-report-empty");
    auto files = emit_report(run, aggregate_by_developer(run), Format::Json, dir);
    REQUIRE(files.size() == 1);
    auto j = nlohmann::json::parse(slurp(files[0]));
    CHECK(j.at("schema_version") == kSchemaVersion);
    CHECK(j.at("commits").empty());
    CHECK(j.at("developers").empty());
    auto csv = emit_report(run, {}, Format::Csv, dir);
    CHECK(slurp(dir / "developers.csv").find('\n') == slurp(dir / "developers.csv").size() - 1);
    std::filesystem::remove_all(dir);
  }
  SUBCASE("fixture run") {
    fixture::GitRepo g;
    fixture::Author a{"Ann, Jr", "ann@example.com"}, b{"Bo \"B\" Smith", "bo@example.com"};
    g.write("A.java", "class A {\n  int f(int x) {\n    return x;\n  }\n}\n");
    g.commit("one", a);
    g.write("A.java", "class A {\n  int f(int x) {\n    return x + 1;\n  }\n}\n");
    g.commit("two", b);
    auto run = pipeline::analyze_repository(g.root(), Config{});
    auto reports = aggregate_by_developer(run);
    detect_inflated(reports);
    auto dir = temp_dir("cvalue-report-fixture");
    auto files = emit_report(run, reports, Format::Json, dir);
    auto text = slurp(files[0]);
    auto j = nlohmann::json::parse(text);
    CHECK(nlohmann::json::parse(j.dump()) == j);
    CHECK(j.at("developers").size() == 2);
    CHECK(j.at("commits").size() == 2);
    CHECK_FALSE(j.contains("timing"));

    emit_report(run, reports, Format::Csv, dir);
    auto dev_csv = slurp(dir / "developers.csv");
    CHECK(std::count(dev_csv.begin(), dev_csv.end(), '\n') == static_cast<long>(reports.size() + 1));
    CHECK(dev_csv.find("\"Ann, Jr\"") != std::string::npos);
    CHECK(dev_csv.find("\"Bo \"\"B\"\" Smith\"") != std::string::npos);
    auto commit_csv = slurp(dir / "commits.csv");
    CHECK(std::count(commit_csv.begin(), commit_csv.end(), '\n') == static_cast<long>(run.commits.size() + 1));
    std::filesystem::remove_all(dir);
  }
}

TEST_CASE("labels and evaluation") {
  auto run = synthetic_run({{"a@x", 1.0}, {"a@x", 5.0}, {"b@x", 3.0}});
  run.commits[0].commit = "aaaaaaaa11111111";
  run.commits[1].commit = "bbbbbbbb22222222";
  run.commits[2].commit = "cccccccc33333333";
  auto path = std::filesystem::temp_directory_path() / "cvalue-labels.csv";
  {
    std::ofstream out(path);
    out << "commit,score\naaaaaaaa,1\nbbbbbbbb22222222, 9.5\n\ncccccccc,4\n";
  }
  auto labels = load_labels(path);
  CHECK(labels.size() == 3);
  CHECK(labels.at("bbbbbbbb22222222") == 9.5);
  auto pair = evaluate(run, labels);
  CHECK(pair.labels.size() == 3);
  CHECK(pair.r_s == doctest::Approx(1.0));

  {
    std::ofstream out(path);
    out << "aaaaaaaa,1\nbbbbbbbb,oops\n";
  }
  CHECK_THROWS_AS(load_labels(path), EvaluationInputError);
  {
    std::ofstream out(path);
    out << "aaaaaaaa,1\n";
  }
  CHECK_THROWS_AS(evaluate(run, load_labels(path)), EvaluationInputError);
  {
    std::ofstream out(path);
    out << "aaaaaaaa,1\ndddddddd,2\n";
  }
  CHECK_THROWS_AS(evaluate(run, load_labels(path)), EvaluationInputError);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_labels(path), EvaluationInputError);
}
