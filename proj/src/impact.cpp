#include "cvalue/impact.hpp"

#include <algorithm>

#include <spdlog/spdlog.h>

namespace cvalue::graph {

DenseGraph DenseGraph::from(const CallGraph &graph) {
  DenseGraph g;
  std::map<FunctionId, std::size_t> index;
  for (const auto &id : graph.nodes()) {
    if (id.external()) continue;
    index.emplace(id, g.ids.size());
    g.ids.push_back(id);
  }
  g.children.resize(g.ids.size());
  for (const auto &[from, to] : graph.edges()) {
    auto a = index.find(from);
    auto b = index.find(to);
    if (a == index.end() || b == index.end()) continue;
    g.children[a->second].push_back(b->second);
  }
  for (auto &c : g.children) {
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
  }
  return g;
}

double ImpactScores::inter_impact(const FunctionId &id) const {
  auto it = std::lower_bound(ids.begin(), ids.end(), id);
  if (it == ids.end() || *it != id) return 0.0;
  return out[static_cast<std::size_t>(it - ids.begin())];
}

std::map<FunctionId, double> ImpactScores::out_map() const {
  std::map<FunctionId, double> m;
  for (std::size_t i = 0; i < ids.size(); ++i) m.emplace(ids[i], out[i]);
  return m;
}

std::vector<double> pagerank(const DenseGraph &graph, const kernels::PageRankParams &params, KernelChoice kernel) {
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t u = 0; u < graph.size(); ++u)
    for (std::size_t v : graph.children[u]) edges.emplace_back(u, v);
  auto csr = kernels::IncomingCsr::from_edges(graph.size(), edges);
  auto result = kernel == KernelChoice::Serial ? kernels::pagerank_serial(csr, params)
                                               : kernels::pagerank_omp(csr, params);
  if (!result.converged)
    spdlog::warn("pagerank did not reach tolerance {} within {} iterations", params.tol, params.max_iter);
  return result.scores;
}

std::vector<std::vector<std::size_t>> strongly_connected_components(const DenseGraph &graph) {
  const std::size_t n = graph.size();
  constexpr std::size_t kUnvisited = static_cast<std::size_t>(-1);
  std::vector<std::size_t> index(n, kUnvisited), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::vector<std::vector<std::size_t>> components;
  std::size_t counter = 0;

  struct Frame {
    std::size_t node;
    std::size_t next_child;
  };
  for (std::size_t start = 0; start < n; ++start) {
    if (index[start] != kUnvisited) continue;
    std::vector<Frame> call{{start, 0}};
    index[start] = low[start] = counter++;
    stack.push_back(start);
    on_stack[start] = true;
    while (!call.empty()) {
      Frame &f = call.back();
      const auto &kids = graph.children[f.node];
      if (f.next_child < kids.size()) {
        std::size_t w = kids[f.next_child++];
        if (index[w] == kUnvisited) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.node] = std::min(low[f.node], index[w]);
        }
        continue;
      }
      std::size_t v = f.node;
      call.pop_back();
      if (!call.empty()) low[call.back().node] = std::min(low[call.back().node], low[v]);
      if (low[v] == index[v]) {
        std::vector<std::size_t> component;
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          component.push_back(w);
        } while (w != v);
        std::sort(component.begin(), component.end());
        components.push_back(std::move(component));
      }
    }
  }
  return components;
}

ImpactScores backward_propagate(const DenseGraph &graph, const std::vector<double> &pr, double decay) {
  const std::size_t n = graph.size();
  ImpactScores scores;
  scores.ids = graph.ids;
  scores.pr = pr;
  scores.tmp.assign(n, 0.0);
  scores.out.assign(n, 0.0);

  auto components = strongly_connected_components(graph);
  std::vector<std::size_t> component_of(n);
  for (std::size_t c = 0; c < components.size(); ++c)
    for (std::size_t v : components[c]) component_of[v] = c;

  // Children always finish before their parents in Tarjan's output order.
  std::vector<double> component_tmp(components.size(), 0.0);
  for (std::size_t c = 0; c < components.size(); ++c) {
    std::vector<std::size_t> kids;
    double pr_sum = 0.0;
    for (std::size_t v : components[c]) {
      pr_sum += pr[v];
      for (std::size_t w : graph.children[v])
        if (component_of[w] != c) kids.push_back(component_of[w]);
    }
    std::sort(kids.begin(), kids.end());
    kids.erase(std::unique(kids.begin(), kids.end()), kids.end());
    double tmp = 0.0;
    if (kids.empty()) {
      tmp = pr_sum;
    } else {
      for (std::size_t k : kids) tmp += component_tmp[k] * decay;
    }
    component_tmp[c] = tmp;
    double share = tmp / static_cast<double>(components[c].size());
    for (std::size_t v : components[c]) scores.tmp[v] = share;
  }
  for (std::size_t v = 0; v < n; ++v) scores.out[v] = scores.pr[v] + scores.tmp[v];
  return scores;
}

ImpactScores compute_impact(const CallGraph &graph, double damping, double decay, KernelChoice kernel) {
  DenseGraph dense = DenseGraph::from(graph);
  kernels::PageRankParams params;
  params.damping = damping;
  auto pr = pagerank(dense, params, kernel);
  return backward_propagate(dense, pr, decay);
}

}  // namespace cvalue::graph
