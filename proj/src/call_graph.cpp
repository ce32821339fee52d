#include "cvalue/call_graph.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace cvalue::graph {

using syntax::Kind;
using syntax::NodeId;
using syntax::Role;

FunctionId external_node(const std::string &simple_name) { return FunctionId{"", "external:" + simple_name}; }

namespace {

NodeId child_with_role(const syntax::SyntaxTree &tree, NodeId id, Role role) {
  for (NodeId c : tree.node(id).children)
    if (tree.node(c).role == role) return c;
  return syntax::kNoNode;
}

// "java.util.List<String>[]" -> "List"
std::string simple_type_name(std::string type) {
  if (auto lt = type.find('<'); lt != std::string::npos) type.erase(lt);
  if (auto br = type.find('['); br != std::string::npos) type.erase(br);
  if (auto dot = type.rfind('.'); dot != std::string::npos) type.erase(0, dot + 1);
  return type;
}

bool qualifier_matches(const std::string &qualified, const std::string &qualifier, const std::string &callee) {
  std::string needle = qualifier + "." + callee + "(";
  for (auto pos = qualified.find(needle); pos != std::string::npos; pos = qualified.find(needle, pos + 1)) {
    if (pos == 0 || qualified[pos - 1] == '.' || qualified[pos - 1] == '$') return true;
  }
  return false;
}

}  // namespace

FileFacts extract_file_facts(const std::string &path, const syntax::SyntaxTree &tree,
                             const std::vector<syntax::FunctionUnit> &functions) {
  FileFacts facts;
  facts.path = path;
  for (const auto &f : functions) facts.declarations.push_back({f.qualified_name, f.simple_name});
  if (tree.empty()) return facts;

  std::vector<int> owner(static_cast<std::size_t>(tree.size()), -1);
  for (std::size_t i = 0; i < functions.size(); ++i) {
    NodeId decl = functions[i].declaration;
    for (NodeId id = decl; id < decl + tree.node(decl).subtree_size; ++id)
      owner[static_cast<std::size_t>(id)] = static_cast<int>(i);
  }

  for (NodeId id = 0; id < tree.size(); ++id) {
    int unit = owner[static_cast<std::size_t>(id)];
    if (unit < 0) continue;
    const auto &n = tree.node(id);
    CallSite site;
    site.caller = functions[static_cast<std::size_t>(unit)].qualified_name;
    if (n.kind == Kind::MethodInvocation) {
      NodeId name = child_with_role(tree, id, Role::Name);
      if (name == syntax::kNoNode) continue;
      site.callee = tree.node(name).label;
      NodeId receiver = child_with_role(tree, id, Role::Receiver);
      if (receiver != syntax::kNoNode && tree.node(receiver).kind == Kind::SimpleName)
        site.qualifier = tree.node(receiver).label;
    } else if (n.kind == Kind::ClassInstanceCreation) {
      NodeId type = child_with_role(tree, id, Role::Target);
      if (type == syntax::kNoNode) continue;
      site.callee = simple_type_name(tree.node(type).label);
    } else if (n.kind == Kind::MethodReference) {
      if (n.label == "new") {
        NodeId receiver = child_with_role(tree, id, Role::Receiver);
        if (receiver == syntax::kNoNode) continue;
        site.callee = simple_type_name(tree.node(receiver).label);
      } else {
        site.callee = n.label;
      }
    } else {
      continue;
    }
    if (site.callee.empty()) continue;
    facts.calls.push_back(std::move(site));
  }
  return facts;
}

CallGraph CallGraph::build(const std::vector<FileFacts> &files) {
  CallGraph g;
  for (const auto &f : files) g.index_file(f);
  for (auto &[path, entry] : g.files_) g.resolve_file(path);
  return g;
}

void CallGraph::index_file(const FileFacts &facts) {
  FileEntry &entry = files_[facts.path];
  entry.facts = facts;
  entry.edges.clear();
  for (const auto &d : facts.declarations)
    if (!d.simple_name.empty()) declarations_[d.simple_name].insert(FunctionId{facts.path, d.qualified_name});
  for (const auto &c : facts.calls) callers_[c.callee].insert(facts.path);
}

void CallGraph::drop_edges(const std::string &path) {
  auto it = files_.find(path);
  if (it == files_.end()) return;
  for (const auto &[from, to] : it->second.edges) {
    if (!to.external()) continue;
    auto ext = externals_.find(to);
    if (ext != externals_.end() && --ext->second == 0) externals_.erase(ext);
  }
  it->second.edges.clear();
}

void CallGraph::unindex_file(const std::string &path) {
  auto it = files_.find(path);
  if (it == files_.end()) return;
  drop_edges(path);
  for (const auto &d : it->second.facts.declarations) {
    if (d.simple_name.empty()) continue;
    auto decl = declarations_.find(d.simple_name);
    if (decl == declarations_.end()) continue;
    decl->second.erase(FunctionId{path, d.qualified_name});
    if (decl->second.empty()) declarations_.erase(decl);
  }
  for (const auto &c : it->second.facts.calls) {
    auto callers = callers_.find(c.callee);
    if (callers == callers_.end()) continue;
    callers->second.erase(path);
    if (callers->second.empty()) callers_.erase(callers);
  }
  files_.erase(it);
}

void CallGraph::resolve_file(const std::string &path) {
  FileEntry &entry = files_.at(path);
  std::map<std::string, std::vector<const Declaration *>> local;
  for (const auto &d : entry.facts.declarations)
    if (!d.simple_name.empty()) local[d.simple_name].push_back(&d);

  for (const auto &call : entry.facts.calls) {
    FunctionId caller{path, call.caller};
    std::vector<FunctionId> targets;
    if (auto it = local.find(call.callee); it != local.end()) {
      for (const Declaration *d : it->second) targets.push_back(FunctionId{path, d->qualified_name});
    } else if (auto g = declarations_.find(call.callee); g != declarations_.end()) {
      if (!call.qualifier.empty()) {
        for (const auto &id : g->second)
          if (qualifier_matches(id.name, call.qualifier, call.callee)) targets.push_back(id);
      }
      if (targets.empty()) targets.assign(g->second.begin(), g->second.end());
    }
    if (targets.empty()) targets.push_back(external_node(call.callee));
    for (auto &t : targets) {
      bool external = t.external();
      auto [pos, inserted] = entry.edges.emplace(caller, std::move(t));
      if (inserted && external) ++externals_[pos->second];
    }
  }
}

void CallGraph::update(const std::vector<FileUpdate> &changes) {
  std::set<std::string> affected_names;
  std::set<std::string> dirty;
  for (const auto &change : changes) {
    if (auto it = files_.find(change.path); it != files_.end()) {
      for (const auto &d : it->second.facts.declarations)
        if (!d.simple_name.empty()) affected_names.insert(d.simple_name);
      unindex_file(change.path);
    }
    stale_.erase(change.path);
    if (change.stale) stale_.insert(change.path);
    if (change.facts) {
      FileFacts facts = *change.facts;
      facts.path = change.path;
      index_file(facts);
      for (const auto &d : facts.declarations)
        if (!d.simple_name.empty()) affected_names.insert(d.simple_name);
      dirty.insert(change.path);
    }
  }
  for (const auto &name : affected_names) {
    if (auto it = callers_.find(name); it != callers_.end()) dirty.insert(it->second.begin(), it->second.end());
  }
  for (const auto &path : dirty) {
    if (!files_.contains(path)) continue;
    drop_edges(path);
    resolve_file(path);
  }
}

std::set<FunctionId> CallGraph::nodes() const {
  std::set<FunctionId> out;
  for (const auto &[path, entry] : files_)
    for (const auto &d : entry.facts.declarations) out.insert(FunctionId{path, d.qualified_name});
  for (const auto &[ext, count] : externals_) out.insert(ext);
  return out;
}

std::set<CallGraph::Edge> CallGraph::edges() const {
  std::set<Edge> out;
  for (const auto &[path, entry] : files_) out.insert(entry.edges.begin(), entry.edges.end());
  return out;
}

std::size_t CallGraph::node_count() const { return nodes().size(); }

std::size_t CallGraph::edge_count() const {
  std::size_t n = 0;
  for (const auto &[path, entry] : files_) n += entry.edges.size();
  return n;
}

bool CallGraph::contains(const FunctionId &id) const {
  if (id.external()) return externals_.contains(id);
  auto it = files_.find(id.file);
  if (it == files_.end()) return false;
  for (const auto &d : it->second.facts.declarations)
    if (d.qualified_name == id.name) return true;
  return false;
}

std::vector<std::string> CallGraph::files() const {
  std::vector<std::string> out;
  for (const auto &[path, entry] : files_) out.push_back(path);
  return out;
}

bool CallGraph::structurally_equal(const CallGraph &other) const {
  return nodes() == other.nodes() && edges() == other.edges();
}

bool CallGraph::operator==(const CallGraph &other) const {
  if (files_.size() != other.files_.size() || stale_ != other.stale_ || externals_ != other.externals_) return false;
  for (auto a = files_.begin(), b = other.files_.begin(); a != files_.end(); ++a, ++b) {
    if (a->first != b->first) return false;
    const auto &fa = a->second.facts;
    const auto &fb = b->second.facts;
    if (fa.declarations != fb.declarations || fa.calls != fb.calls || a->second.edges != b->second.edges) return false;
  }
  return true;
}

std::string CallGraph::to_json() const {
  nlohmann::json j;
  j["version"] = 1;
  j["stale"] = stale_;
  auto &files = j["files"] = nlohmann::json::array();
  for (const auto &[path, entry] : files_) {
    nlohmann::json f;
    f["path"] = path;
    auto &decls = f["declarations"] = nlohmann::json::array();
    for (const auto &d : entry.facts.declarations) decls.push_back({d.qualified_name, d.simple_name});
    auto &calls = f["calls"] = nlohmann::json::array();
    for (const auto &c : entry.facts.calls) calls.push_back({c.caller, c.callee, c.qualifier});
    files.push_back(std::move(f));
  }
  return j.dump();
}

CallGraph CallGraph::from_json(const std::string &text) {
  auto j = nlohmann::json::parse(text);
  if (j.value("version", 0) != 1) throw std::runtime_error("unsupported call graph format");
  std::vector<FileFacts> files;
  for (const auto &f : j.at("files")) {
    FileFacts facts;
    facts.path = f.at("path").get<std::string>();
    for (const auto &d : f.at("declarations")) facts.declarations.push_back({d.at(0), d.at(1)});
    for (const auto &c : f.at("calls")) facts.calls.push_back({c.at(0), c.at(1), c.at(2)});
    files.push_back(std::move(facts));
  }
  CallGraph g = build(files);
  g.stale_ = j.at("stale").get<std::set<std::string>>();
  return g;
}

CheckpointStore::CheckpointStore(std::filesystem::path directory) : directory_(std::move(directory)) {
  std::filesystem::create_directories(*directory_);
}

std::filesystem::path CheckpointStore::file_for(const std::string &commit) const {
  return *directory_ / (commit + ".json");
}

void CheckpointStore::save(const std::string &commit, const CallGraph &graph) {
  memory_.insert_or_assign(commit, graph);
  if (directory_) {
    std::ofstream out(file_for(commit), std::ios::binary);
    out << graph.to_json();
  }
}

CallGraph CheckpointStore::restore(const std::string &commit) const {
  if (auto it = memory_.find(commit); it != memory_.end()) return it->second;
  if (directory_) {
    std::ifstream in(file_for(commit), std::ios::binary);
    if (in) {
      std::stringstream buffer;
      buffer << in.rdbuf();
      return CallGraph::from_json(buffer.str());
    }
  }
  throw UnknownCheckpoint(commit);
}

bool CheckpointStore::contains(const std::string &commit) const {
  if (memory_.contains(commit)) return true;
  return directory_ && std::filesystem::exists(file_for(commit));
}

void CheckpointStore::erase(const std::string &commit) {
  memory_.erase(commit);
  if (directory_) std::filesystem::remove(file_for(commit));
}

GraphCheckpoint checkpoint(const CallGraph &graph, const std::string &commit) { return GraphCheckpoint{commit, graph}; }

CallGraph restore(const GraphCheckpoint &checkpoint) { return checkpoint.graph; }

}  // namespace cvalue::graph
