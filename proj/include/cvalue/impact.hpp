// Inter-function impact: PageRank over the call graph followed by backward
// propagation with decay, cycles condensed into strongly connected components.

#pragma once

#include <map>
#include <stdexcept>
#include <vector>

#include "cvalue/call_graph.hpp"
#include "cvalue/kernels/pagerank.hpp"

namespace cvalue::graph {

/// Dense directed graph over internal functions, the form the impact
/// algorithms run on. External nodes are not included.
struct DenseGraph {
  std::vector<FunctionId> ids;
  std::vector<std::vector<std::size_t>> children;  // sorted, unique

  static DenseGraph from(const CallGraph &graph);
  std::size_t size() const { return ids.size(); }
};

struct ImpactScores {
  std::vector<FunctionId> ids;
  std::vector<double> pr;
  std::vector<double> tmp;
  std::vector<double> out;

  /// out for `id`, 0 when absent.
  double inter_impact(const FunctionId &id) const;
  std::map<FunctionId, double> out_map() const;
};

class NonConvergence : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

enum class KernelChoice { Serial, OpenMP };

/// Scores sum to 1. When tol is not reached within max_iter, the last
/// iterate is returned and a warning is logged.
std::vector<double> pagerank(const DenseGraph &graph, const kernels::PageRankParams &params = {},
                             KernelChoice kernel = KernelChoice::OpenMP);

/// Tarjan's algorithm. Components come out in reverse topological order
/// (every component precedes the components that reach it).
std::vector<std::vector<std::size_t>> strongly_connected_components(const DenseGraph &graph);

/// pr[i] belongs to graph.ids[i]. For a component S: tmp_S is the summed pr
/// of S when S has no child components, otherwise the decayed sum of its
/// children's tmp; each member receives tmp_S / |S|; out = pr + tmp.
ImpactScores backward_propagate(const DenseGraph &graph, const std::vector<double> &pr, double decay = 0.5);

ImpactScores compute_impact(const CallGraph &graph, double damping = 0.85, double decay = 0.5,
                            KernelChoice kernel = KernelChoice::OpenMP);

}  // namespace cvalue::graph
