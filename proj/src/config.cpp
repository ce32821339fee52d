#include "cvalue/config.hpp"

#include <fstream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>

namespace cvalue {

namespace {

using boost::property_tree::ptree;

std::optional<std::string> lookup(const ptree &tree, const std::string &section, const std::string &key) {
  if (auto s = tree.get_child_optional(ptree::path_type(section, '/'))) {
    if (auto v = s->get_optional<std::string>(ptree::path_type(key, '/'))) return *v;
  }
  if (auto v = tree.get_optional<std::string>(ptree::path_type(section + "." + key, '/'))) return *v;
  return std::nullopt;
}

double number(const ptree &tree, const std::string &section, const std::string &key, double fallback) {
  auto v = lookup(tree, section, key);
  if (!v) return fallback;
  try {
    std::size_t used = 0;
    double d = std::stod(*v, &used);
    if (used != v->size()) throw std::invalid_argument("trailing");
    return d;
  } catch (const std::exception &) {
    throw ConfigError(section + "." + key + ": not a number: " + *v);
  }
}

std::vector<std::string> list(const ptree &tree, const std::string &section, const std::string &key,
                              std::vector<std::string> fallback) {
  auto v = lookup(tree, section, key);
  if (!v) return fallback;
  std::vector<std::string> out;
  std::stringstream ss(*v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto b = item.find_first_not_of(" \t");
    auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

void check_weight(double w, const char *name) {
  if (!(w > 0.0 && w <= 1.0)) throw ConfigError(std::string("ast.") + name + " must be in (0, 1]");
}

}  // namespace

Config Config::parse(const std::string &text) {
  ptree tree;
  std::istringstream in(text);
  try {
    boost::property_tree::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error &e) {
    throw ConfigError(e.message() + " at line " + std::to_string(e.line()));
  }
  Config c;
  c.weights.add = number(tree, "ast", "add", c.weights.add);
  c.weights.update = number(tree, "ast", "update", c.weights.update);
  c.weights.move = number(tree, "ast", "move", c.weights.move);
  c.weights.del = number(tree, "ast", "delete", c.weights.del);
  c.weights.name_only_factor = number(tree, "ast", "name_factor", c.weights.name_only_factor);
  check_weight(c.weights.add, "add");
  check_weight(c.weights.update, "update");
  check_weight(c.weights.move, "move");
  check_weight(c.weights.del, "delete");
  check_weight(c.weights.name_only_factor, "name_factor");
  c.match.min_similarity = number(tree, "ast", "min_similarity", c.match.min_similarity);
  c.decay = number(tree, "graph", "decay", c.decay);
  c.damping = number(tree, "graph", "damping", c.damping);
  if (!(c.decay >= 0.0 && c.decay <= 1.0)) throw ConfigError("graph.decay must be in [0, 1]");
  if (!(c.damping > 0.0 && c.damping < 1.0)) throw ConfigError("graph.damping must be in (0, 1)");
  c.fit.lambda_min = number(tree, "normalize", "lambda_min", c.fit.lambda_min);
  c.fit.lambda_max = number(tree, "normalize", "lambda_max", c.fit.lambda_max);
  c.fit.lambda_step = number(tree, "normalize", "lambda_step", c.fit.lambda_step);
  if (!(c.fit.lambda_step > 0.0) || c.fit.lambda_max < c.fit.lambda_min)
    throw ConfigError("normalize: empty lambda grid");
  c.inflated_commit_share_min = number(tree, "inflated", "commit_share_min", c.inflated_commit_share_min);
  c.inflated_ratio_max = number(tree, "inflated", "ratio_max", c.inflated_ratio_max);
  c.blacklist.patterns = list(tree, "blacklist", "patterns", c.blacklist.patterns);
  c.bots.patterns = list(tree, "bots", "patterns", c.bots.patterns);
  double bulk = number(tree, "pipeline", "bulk_threshold", static_cast<double>(c.bulk_threshold));
  if (bulk < 0) throw ConfigError("pipeline.bulk_threshold must be non-negative");
  c.bulk_threshold = static_cast<std::size_t>(bulk);
  return c;
}

Config Config::load(const std::filesystem::path &file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot read config file " + file.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

nlohmann::json Config::to_json() const {
  return {
      {"ast",
       {{"add", weights.add},
        {"update", weights.update},
        {"move", weights.move},
        {"delete", weights.del},
        {"name_factor", weights.name_only_factor},
        {"min_similarity", match.min_similarity}}},
      {"graph", {{"decay", decay}, {"damping", damping}}},
      {"normalize",
       {{"lambda_min", fit.lambda_min}, {"lambda_max", fit.lambda_max}, {"lambda_step", fit.lambda_step}}},
      {"inflated", {{"commit_share_min", inflated_commit_share_min}, {"ratio_max", inflated_ratio_max}}},
      {"blacklist", {{"patterns", blacklist.patterns}}},
      {"bots", {{"patterns", bots.patterns}}},
      {"pipeline", {{"bulk_threshold", bulk_threshold}}},
  };
}

Config Config::from_json(const nlohmann::json &j) {
  Config c;
  const auto &ast = j.at("ast");
  c.weights.add = ast.at("add");
  c.weights.update = ast.at("update");
  c.weights.move = ast.at("move");
  c.weights.del = ast.at("delete");
  c.weights.name_only_factor = ast.at("name_factor");
  c.match.min_similarity = ast.at("min_similarity");
  c.decay = j.at("graph").at("decay");
  c.damping = j.at("graph").at("damping");
  c.fit.lambda_min = j.at("normalize").at("lambda_min");
  c.fit.lambda_max = j.at("normalize").at("lambda_max");
  c.fit.lambda_step = j.at("normalize").at("lambda_step");
  c.inflated_commit_share_min = j.at("inflated").at("commit_share_min");
  c.inflated_ratio_max = j.at("inflated").at("ratio_max");
  c.blacklist.patterns = j.at("blacklist").at("patterns").get<std::vector<std::string>>();
  c.bots.patterns = j.at("bots").at("patterns").get<std::vector<std::string>>();
  c.bulk_threshold = j.at("pipeline").at("bulk_threshold");
  return c;
}

}  // namespace cvalue
