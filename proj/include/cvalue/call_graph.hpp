// Project call graph with a per-file index, incremental update and
// commit checkpoints.

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "cvalue/syntax.hpp"

namespace cvalue::graph {

/// A function node. External nodes have an empty file and a name of the form
/// "external:<simple name>".
struct FunctionId {
  std::string file;
  std::string name;

  bool external() const { return file.empty(); }
  std::string key() const { return file + "::" + name; }
  auto operator<=>(const FunctionId &) const = default;
};

FunctionId external_node(const std::string &simple_name);

struct Declaration {
  std::string qualified_name;
  std::string simple_name;
  auto operator<=>(const Declaration &) const = default;
};

struct CallSite {
  std::string caller;     // qualified name of the innermost calling unit
  std::string callee;     // simple name at the call site
  std::string qualifier;  // receiver identifier when it is a bare name, else empty
  auto operator<=>(const CallSite &) const = default;
};

/// What the graph needs to know about one source file.
struct FileFacts {
  std::string path;
  std::vector<Declaration> declarations;
  std::vector<CallSite> calls;
};

FileFacts extract_file_facts(const std::string &path, const syntax::SyntaxTree &tree,
                             const std::vector<syntax::FunctionUnit> &functions);

/// New content for a changed file. `facts` is empty when the file was
/// deleted, is not source, or failed to parse (`stale`).
struct FileUpdate {
  std::string path;
  std::optional<FileFacts> facts;
  bool stale = false;
};

class CallGraph {
public:
  using Edge = std::pair<FunctionId, FunctionId>;

  static CallGraph build(const std::vector<FileFacts> &files);

  /// Replaces the facts of every changed file and re-resolves the calls that
  /// can be affected: those made from changed files and those naming a
  /// function declared or removed in a changed file.
  void update(const std::vector<FileUpdate> &changes);

  std::set<FunctionId> nodes() const;
  std::set<Edge> edges() const;
  std::size_t node_count() const;
  std::size_t edge_count() const;
  bool contains(const FunctionId &id) const;
  const std::set<std::string> &stale_files() const { return stale_; }
  std::vector<std::string> files() const;

  /// Same node identities and edge set.
  bool structurally_equal(const CallGraph &other) const;
  bool operator==(const CallGraph &other) const;

  std::string to_json() const;
  static CallGraph from_json(const std::string &text);

private:
  struct FileEntry {
    FileFacts facts;
    std::set<Edge> edges;  // edges whose caller lives in this file
  };

  void index_file(const FileFacts &facts);
  void unindex_file(const std::string &path);
  void resolve_file(const std::string &path);
  void drop_edges(const std::string &path);

  std::map<std::string, FileEntry> files_;
  // simple name -> declaring functions
  std::map<std::string, std::set<FunctionId>> declarations_;
  // simple name -> files with call sites naming it
  std::map<std::string, std::set<std::string>> callers_;
  // external node -> number of edges pointing at it
  std::map<FunctionId, std::size_t> externals_;
  std::set<std::string> stale_;
};

class UnknownCheckpoint : public std::runtime_error {
public:
  explicit UnknownCheckpoint(const std::string &commit)
      : std::runtime_error("no checkpoint for commit " + commit) {}
};

struct GraphCheckpoint {
  std::string commit;
  CallGraph graph;
};

/// Saved graphs keyed by commit id, optionally mirrored to a directory.
class CheckpointStore {
public:
  CheckpointStore() = default;
  explicit CheckpointStore(std::filesystem::path directory);

  void save(const std::string &commit, const CallGraph &graph);
  CallGraph restore(const std::string &commit) const;
  bool contains(const std::string &commit) const;
  void erase(const std::string &commit);
  std::size_t size() const { return memory_.size(); }

private:
  std::filesystem::path file_for(const std::string &commit) const;

  std::map<std::string, CallGraph> memory_;
  std::optional<std::filesystem::path> directory_;
};

GraphCheckpoint checkpoint(const CallGraph &graph, const std::string &commit);
CallGraph restore(const GraphCheckpoint &checkpoint);

}  // namespace cvalue::graph
