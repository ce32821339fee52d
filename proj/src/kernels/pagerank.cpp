#include "cvalue/kernels/pagerank.hpp"

#include <cmath>

namespace cvalue::kernels {

IncomingCsr IncomingCsr::from_edges(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>> &edges) {
  IncomingCsr g;
  g.n = n;
  g.offsets.assign(n + 1, 0);
  g.out_degree.assign(n, 0);
  for (auto [from, to] : edges) {
    ++g.offsets[to + 1];
    ++g.out_degree[from];
  }
  for (std::size_t v = 0; v < n; ++v) g.offsets[v + 1] += g.offsets[v];
  g.sources.resize(edges.size());
  std::vector<std::size_t> cursor(g.offsets.begin(), g.offsets.end() - 1);
  for (auto [from, to] : edges) g.sources[cursor[to]++] = from;
  return g;
}

namespace {

double dangling_mass(const IncomingCsr &g, const std::vector<double> &rank) {
  double mass = 0.0;
  for (std::size_t v = 0; v < g.n; ++v)
    if (g.out_degree[v] == 0) mass += rank[v];
  return mass;
}

double gather(const IncomingCsr &g, const std::vector<double> &rank, std::size_t v) {
  double sum = 0.0;
  for (std::size_t k = g.offsets[v]; k < g.offsets[v + 1]; ++k) {
    std::size_t u = g.sources[k];
    sum += rank[u] / static_cast<double>(g.out_degree[u]);
  }
  return sum;
}

template <typename Step>
PageRankResult iterate(const IncomingCsr &g, const PageRankParams &params, Step step) {
  PageRankResult result;
  if (g.n == 0) {
    result.converged = true;
    return result;
  }
  const double n = static_cast<double>(g.n);
  std::vector<double> rank(g.n, 1.0 / n);
  std::vector<double> next(g.n, 0.0);
  for (int it = 1; it <= params.max_iter; ++it) {
    const double base = (1.0 - params.damping) / n + params.damping * dangling_mass(g, rank) / n;
    step(rank, next, base);
    double diff = 0.0;
    for (std::size_t v = 0; v < g.n; ++v) diff += std::fabs(next[v] - rank[v]);
    rank.swap(next);
    result.iterations = it;
    if (diff < params.tol) {
      result.converged = true;
      break;
    }
  }
  result.scores = std::move(rank);
  return result;
}

}  // namespace

PageRankResult pagerank_serial(const IncomingCsr &g, const PageRankParams &params) {
  return iterate(g, params, [&](const std::vector<double> &rank, std::vector<double> &next, double base) {
    for (std::size_t v = 0; v < g.n; ++v) next[v] = base + params.damping * gather(g, rank, v);
  });
}

PageRankResult pagerank_omp(const IncomingCsr &g, const PageRankParams &params) {
  return iterate(g, params, [&](const std::vector<double> &rank, std::vector<double> &next, double base) {
    const auto n = static_cast<std::ptrdiff_t>(g.n);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t v = 0; v < n; ++v)
      next[static_cast<std::size_t>(v)] = base + params.damping * gather(g, rank, static_cast<std::size_t>(v));
  });
}

}  // namespace cvalue::kernels
