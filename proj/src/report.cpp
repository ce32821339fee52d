#include "cvalue/report.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace cvalue::report {

std::vector<DeveloperReport> aggregate_by_developer(const pipeline::AnalysisRun &run) {
  std::map<std::string, DeveloperReport> by_email;
  double cvalue_sum = 0.0;
  for (const auto &c : run.commits) {
    auto &r = by_email[c.author.email];
    if (r.commit_count == 0) {
      r.identity = c.author;
      r.zero_syntax = true;
    }
    ++r.commit_count;
    r.cvalue_total += c.cvalue;
    if (c.cvalue != 0.0) r.zero_syntax = false;
    cvalue_sum += c.cvalue;
  }
  std::vector<DeveloperReport> out;
  const double commits = static_cast<double>(run.commits.size());
  for (auto &[email, r] : by_email) {
    r.commit_share = static_cast<double>(r.commit_count) / commits;
    r.cvalue_share = cvalue_sum > 0.0 ? r.cvalue_total / cvalue_sum : 0.0;
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<DeveloperReport> detect_inflated(std::vector<DeveloperReport> &reports, double commit_share_min,
                                             double ratio_max) {
  std::vector<DeveloperReport> flagged;
  for (auto &r : reports) {
    r.inflated = r.commit_share > commit_share_min && r.cvalue_share < ratio_max * r.commit_share;
    if (r.inflated) flagged.push_back(r);
  }
  return flagged;
}

std::vector<double> average_ranks(const std::vector<double> &values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double spearman(const std::vector<double> &xs, const std::vector<double> &ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("spearman: lists differ in length");
  if (xs.size() < 2) throw std::invalid_argument("spearman: need at least two observations");
  auto rx = average_ranks(xs);
  auto ry = average_ranks(ys);
  const double n = static_cast<double>(rx.size());
  // ranks always average (n + 1) / 2
  const double mean = (n + 1.0) / 2.0;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    double dx = rx[i] - mean, dy = ry[i] - mean;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw ZeroVariance("spearman: all ranks equal");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

namespace {

std::string number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string csv_field(const std::string &s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

nlohmann::json developer_json(const DeveloperReport &r) {
  return {{"email", r.identity.email},
          {"name", r.identity.display_name},
          {"is_bot", r.identity.is_bot},
          {"commit_count", r.commit_count},
          {"commit_share", r.commit_share},
          {"cvalue_total", r.cvalue_total},
          {"cvalue_share", r.cvalue_share},
          {"inflated", r.inflated},
          {"zero_syntax", r.zero_syntax}};
}

void write_text(const std::filesystem::path &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  out.close();
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

std::string trim(std::string s) {
  auto ws = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!s.empty() && ws(static_cast<unsigned char>(s.back()))) s.pop_back();
  std::size_t b = 0;
  while (b < s.size() && ws(static_cast<unsigned char>(s[b]))) ++b;
  return s.substr(b);
}

}  // namespace

nlohmann::json report_json(const pipeline::AnalysisRun &run, const std::vector<DeveloperReport> &reports) {
  auto run_json = pipeline::run_to_json(run);
  nlohmann::json developers = nlohmann::json::array();
  for (const auto &r : reports) developers.push_back(developer_json(r));
  nlohmann::json out = {{"schema_version", kSchemaVersion},
                        {"repository", run.repository},
                        {"config", run_json.at("config")},
                        {"commits", run_json.at("commits")},
                        {"developers", std::move(developers)}};
  return out;
}

std::string developers_csv(const std::vector<DeveloperReport> &reports) {
  std::string out = "email,name,is_bot,commit_count,commit_share,cvalue_total,cvalue_share,inflated,zero_syntax\n";
  for (const auto &r : reports) {
    out += csv_field(r.identity.email) + ',' + csv_field(r.identity.display_name) + ',' +
           (r.identity.is_bot ? "true" : "false") + ',' + std::to_string(r.commit_count) + ',' +
           number(r.commit_share) + ',' + number(r.cvalue_total) + ',' + number(r.cvalue_share) + ',' +
           (r.inflated ? "true" : "false") + ',' + (r.zero_syntax ? "true" : "false") + '\n';
  }
  return out;
}

std::string commits_csv(const pipeline::AnalysisRun &run) {
  std::string out = "commit,author_email,timestamp,bulk,functions,delta_ast,cvalue\n";
  for (const auto &c : run.commits) {
    out += c.commit + ',' + csv_field(c.author.email) + ',' + std::to_string(c.timestamp) + ',' +
           (c.bulk ? "true" : "false") + ',' + std::to_string(c.function_scores.size()) + ',' +
           number(c.delta_ast) + ',' + number(c.cvalue) + '\n';
  }
  return out;
}

std::vector<std::filesystem::path> emit_report(const pipeline::AnalysisRun &run,
                                               const std::vector<DeveloperReport> &reports, Format format,
                                               const std::filesystem::path &directory) {
  std::error_code ec;
  std::filesystem::create_directories(directory, ec);
  if (ec) throw std::runtime_error("cannot create " + directory.string() + ": " + ec.message());
  std::vector<std::filesystem::path> written;
  if (format == Format::Json) {
    written.push_back(directory / "report.json");
    write_text(written.back(), report_json(run, reports).dump(2) + "\n");
  } else {
    written.push_back(directory / "developers.csv");
    write_text(written.back(), developers_csv(reports));
    written.push_back(directory / "commits.csv");
    write_text(written.back(), commits_csv(run));
  }
  return written;
}

std::map<std::string, double> load_labels(const std::filesystem::path &file) {
  std::ifstream in(file);
  if (!in) throw EvaluationInputError("cannot read labels file " + file.string());
  std::map<std::string, double> labels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    auto comma = line.find(',');
    if (comma == std::string::npos)
      throw EvaluationInputError(file.string() + ":" + std::to_string(line_no) + ": expected commit-id,score");
    std::string id = trim(line.substr(0, comma));
    std::string value = trim(line.substr(comma + 1));
    double score = 0.0;
    auto res = std::from_chars(value.data(), value.data() + value.size(), score);
    if (res.ec != std::errc{} || res.ptr != value.data() + value.size()) {
      if (labels.empty() && line_no == 1) continue;  // header
      throw EvaluationInputError(file.string() + ":" + std::to_string(line_no) + ": bad score '" + value + "'");
    }
    if (id.empty()) throw EvaluationInputError(file.string() + ":" + std::to_string(line_no) + ": empty commit id");
    labels[id] = score;
  }
  return labels;
}

EvaluationPair evaluate(const pipeline::AnalysisRun &run, const std::map<std::string, double> &labels) {
  EvaluationPair pair;
  for (const auto &[id, score] : labels) {
    const pipeline::CommitScore *hit = nullptr;
    for (const auto &c : run.commits) {
      if (c.commit == id || (id.size() >= 7 && c.commit.starts_with(id))) {
        if (hit) throw EvaluationInputError("ambiguous commit id " + id);
        hit = &c;
      }
    }
    if (!hit) throw EvaluationInputError("labelled commit " + id + " is not in the run");
    pair.commits.push_back(hit->commit);
    pair.labels.push_back(score);
    pair.predictions.push_back(hit->cvalue);
  }
  if (pair.labels.size() < 2) throw EvaluationInputError("need at least two labelled commits");
  try {
    pair.r_s = spearman(pair.labels, pair.predictions);
  } catch (const ZeroVariance &e) {
    throw EvaluationInputError(e.what());
  }
  return pair;
}

}  // namespace cvalue::report
