// PageRank power iteration over a compressed incoming-edge layout.
// The serial kernel is the reference; the OpenMP kernel parallelizes the
// per-node gather and keeps reductions serial, so both return identical bits.

#pragma once

#include <cstddef>
#include <vector>

namespace cvalue::kernels {

struct IncomingCsr {
  std::size_t n = 0;
  std::vector<std::size_t> offsets;  // size n + 1
  std::vector<std::size_t> sources;  // in-neighbours of node v at [offsets[v], offsets[v+1])
  std::vector<std::size_t> out_degree;

  static IncomingCsr from_edges(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>> &edges);
};

struct PageRankParams {
  double damping = 0.85;
  double tol = 1e-8;
  int max_iter = 200;
};

struct PageRankResult {
  std::vector<double> scores;
  int iterations = 0;
  bool converged = false;
};

PageRankResult pagerank_serial(const IncomingCsr &graph, const PageRankParams &params);
PageRankResult pagerank_omp(const IncomingCsr &graph, const PageRankParams &params);

}  // namespace cvalue::kernels
