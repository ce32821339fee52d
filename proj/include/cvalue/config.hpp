// Run configuration, read from an INI-style file:
//
//   [ast]        add, update, move, delete, name_factor, min_similarity
//   [graph]      decay, damping
//   [normalize]  lambda_min, lambda_max, lambda_step
//   [inflated]   commit_share_min, ratio_max
//   [blacklist]  patterns   (comma separated)
//   [bots]       patterns   (comma separated)
//   [pipeline]   bulk_threshold
//
// Keys may also be written flat at the top level ("ast.add = 1.0").

#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "cvalue/ast_diff.hpp"
#include "cvalue/repo.hpp"
#include "cvalue/scoring.hpp"
#include "cvalue/syntax.hpp"
#include "json.hpp"

namespace cvalue {

class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct Config {
  diff::DeltaWeights weights;
  diff::MatchOptions match;
  double decay = 0.5;
  double damping = 0.85;
  scoring::FitOptions fit;
  double inflated_commit_share_min = 0.01;
  double inflated_ratio_max = 0.20;
  syntax::Blacklist blacklist;
  repo::BotPatterns bots;
  std::size_t bulk_threshold = 500;

  static Config parse(const std::string &text);
  static Config load(const std::filesystem::path &file);

  nlohmann::json to_json() const;
  static Config from_json(const nlohmann::json &j);
};

}  // namespace cvalue
