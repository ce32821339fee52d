// Independent reference implementations used to check the library.

#pragma once

#include <cstddef>
#include <set>
#include <utility>
#include <vector>

#include "cvalue/ast_diff.hpp"

namespace oracle {

struct Weights {
  double insert = 1.0, update = 1.0, move = 0.1, del = 0.01, name = 0.01;
};

/// Straight summation over the action list.
double delta_ast(const std::vector<cvalue::diff::EditAction> &actions, const Weights &w = {});

/// Dense power iteration; rank flows from caller to callee along `edges`.
std::vector<double> pagerank(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>> &edges,
                             double damping = 0.85, double tol = 1e-13);

/// Leaves: tmp = pr. Other nodes: sum over every path to a leaf of
/// pr(leaf) * decay^length. Only valid on DAGs.
std::vector<double> path_sum_tmp(const std::vector<std::vector<std::size_t>> &children, const std::vector<double> &pr,
                                 double decay);

/// Nodes reachable from `start` (inclusive) along edges, forwards or backwards.
std::set<std::size_t> reach(std::size_t n, const std::set<std::pair<std::size_t, std::size_t>> &edges,
                            const std::set<std::size_t> &start, bool forward);

/// O(n^2) average ranks: 1 + #less + (#equal - 1) / 2.
std::vector<double> ranks(const std::vector<double> &xs);
double pearson(const std::vector<double> &xs, const std::vector<double> &ys);
double spearman(const std::vector<double> &xs, const std::vector<double> &ys);

}  // namespace oracle
