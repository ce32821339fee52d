// Statement-level program dependence graphs and the intra-function impact
// range of a change.

#pragma once

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cvalue/ast_diff.hpp"
#include "cvalue/syntax.hpp"

namespace cvalue::pdg {

using syntax::NodeId;
using syntax::Span;

struct PdgNode {
  NodeId statement = syntax::kNoNode;
  // The statement itself for simple statements, the header only for control
  // statements (condition, loop header, resources, catch parameter).
  Span own_span;
  std::set<std::string> defs;
  std::set<std::string> uses;
};

struct FunctionPDG {
  std::vector<PdgNode> nodes;
  std::set<std::pair<std::size_t, std::size_t>> ddg_edges;  // def -> use
  std::set<std::pair<std::size_t, std::size_t>> cdg_edges;  // predicate -> directly controlled

  std::size_t size() const { return nodes.size(); }
  /// Index of the node for a statement, or size() when absent.
  std::size_t index_of(NodeId statement) const;
};

FunctionPDG build_pdg(const syntax::SyntaxTree &tree, const syntax::FunctionUnit &function);

using NodeSet = std::set<std::size_t>;

/// Marks, in the after-PDG, every statement whose own span overlaps an
/// action's after-side span. Before-side spans (deletions, move sources) go
/// through the node mapping; a statement with no surviving counterpart is
/// replaced by the next surviving statement, or failing that the previous.
NodeSet changed_pdg_nodes(const FunctionPDG &pdg_before, const FunctionPDG &pdg_after,
                          const diff::FunctionChangeSet &changeset, const diff::NodeMapping &mapping);

/// |forward ∪ backward ∪ changed| / |nodes| along DDG edges.
double ddg_impact(const FunctionPDG &pdg, const NodeSet &changed);

/// For changed nodes with more than one CDG successor: the node and all
/// nodes reachable from it along CDG edges, as a fraction of all nodes.
double cdg_impact(const FunctionPDG &pdg, const NodeSet &changed);

struct ImpactRange {
  double ddg_impact = 0.0;
  double cdg_impact = 0.0;
  double ir = 1.0;
};

double impact_range(double ddg_impact, double cdg_impact);
ImpactRange impact(const FunctionPDG &pdg, const NodeSet &changed);

}  // namespace cvalue::pdg
