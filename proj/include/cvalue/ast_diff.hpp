// Tree matching, edit scripts and the weighted edit size of a function.
//
// Matching follows the two-phase GumTree policy: greedy top-down matching of
// identical subtrees (largest first), then bottom-up matching of containers
// whose descendants are already mapped, with a recovery pass over the
// children of every newly matched pair.

#pragma once

#include <string>
#include <vector>

#include "cvalue/syntax.hpp"

namespace cvalue::diff {

using syntax::NodeId;
using syntax::kNoNode;
using syntax::Span;
using syntax::SyntaxTree;

struct MatchOptions {
  // Subtrees at least this tall take part in top-down matching.
  int min_height = 2;
  // Dice similarity over mapped descendants required by bottom-up matching.
  double min_similarity = 0.5;
};

class NodeMapping {
public:
  NodeMapping() = default;
  NodeMapping(NodeId before_size, NodeId after_size);

  void link(NodeId before, NodeId after);
  NodeId after_of(NodeId before) const { return to_after_[static_cast<std::size_t>(before)]; }
  NodeId before_of(NodeId after) const { return to_before_[static_cast<std::size_t>(after)]; }
  bool has_before(NodeId before) const { return after_of(before) != kNoNode; }
  bool has_after(NodeId after) const { return before_of(after) != kNoNode; }
  std::size_t size() const { return pairs_; }

private:
  std::vector<NodeId> to_after_;
  std::vector<NodeId> to_before_;
  std::size_t pairs_ = 0;
};

NodeMapping map_trees(const SyntaxTree &before, const SyntaxTree &after, const MatchOptions &options = {});

enum class ActionKind { Insert, Update, Delete, Move };

std::string_view to_string(ActionKind kind);

/// One changed subtree. Insert/Delete regions are maximal connected sets of
/// unmapped nodes, cut at function declarations so that each unit's edits
/// stay with that unit. `subtree_depth` is the height of the changed region.
struct EditAction {
  ActionKind kind = ActionKind::Insert;
  NodeId before_node = kNoNode;  // Delete, Update and Move source
  NodeId after_node = kNoNode;   // Insert, Update and Move target
  Span before_span;
  Span after_span;
  int subtree_depth = 1;
  bool only_name_or_modifier = false;
  bool blacklisted = false;
};

std::vector<EditAction> edit_script(const NodeMapping &mapping, const SyntaxTree &before, const SyntaxTree &after);

inline constexpr std::string_view kFileScope = "<file-scope>";

struct FunctionChangeSet {
  std::string function;  // qualified name, kFileScope for top-level edits
  std::string file;
  int before_unit = -1;  // index into functions_before, -1 when absent
  int after_unit = -1;   // index into functions_after, -1 when absent
  std::vector<EditAction> actions;
};

/// Pairs of (before unit, after unit) judged to be the same function: their
/// declarations are mapped, or failing that their qualified names agree.
std::vector<std::pair<int, int>> pair_functions(const NodeMapping &mapping,
                                                const std::vector<syntax::FunctionUnit> &functions_before,
                                                const std::vector<syntax::FunctionUnit> &functions_after);

/// Assigns each action to the innermost function containing it. A Move whose
/// source and target lie in different functions is recorded in both.
std::vector<FunctionChangeSet> group_by_function(const std::vector<EditAction> &actions, const NodeMapping &mapping,
                                                 const SyntaxTree &before, const SyntaxTree &after,
                                                 const std::vector<syntax::FunctionUnit> &functions_before,
                                                 const std::vector<syntax::FunctionUnit> &functions_after,
                                                 const std::string &file);

struct DeltaWeights {
  double add = 1.0;
  double update = 1.0;
  double move = 0.1;
  double del = 0.01;
  double name_only_factor = 0.01;

  double weight(ActionKind kind) const;
};

/// Sum over actions of weight(kind) * depth * name factor, zero for
/// blacklisted actions.
double delta_ast(const std::vector<EditAction> &actions, const DeltaWeights &weights = {});
double delta_ast(const FunctionChangeSet &changeset, const DeltaWeights &weights = {});

}  // namespace cvalue::diff
