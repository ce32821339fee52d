#include "cvalue/ast_diff.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <queue>
#include <unordered_map>

namespace cvalue::diff {

using syntax::Kind;
using syntax::NodeCategory;
using syntax::SyntaxNode;

NodeMapping::NodeMapping(NodeId before_size, NodeId after_size)
    : to_after_(static_cast<std::size_t>(before_size), kNoNode),
      to_before_(static_cast<std::size_t>(after_size), kNoNode) {}

void NodeMapping::link(NodeId before, NodeId after) {
  to_after_[static_cast<std::size_t>(before)] = after;
  to_before_[static_cast<std::size_t>(after)] = before;
  ++pairs_;
}

std::string_view to_string(ActionKind kind) {
  switch (kind) {
    case ActionKind::Insert:
      return "insert";
    case ActionKind::Update:
      return "update";
    case ActionKind::Delete:
      return "delete";
    case ActionKind::Move:
      return "move";
  }
  return "insert";
}

namespace {

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

std::vector<std::uint64_t> subtree_hashes(const SyntaxTree &tree) {
  std::vector<std::uint64_t> hashes(static_cast<std::size_t>(tree.size()));
  for (NodeId id = tree.size() - 1; id >= 0; --id) {
    const SyntaxNode &n = tree.node(id);
    std::uint64_t h = std::hash<std::string>{}(n.label);
    h = mix(h, static_cast<std::uint64_t>(n.kind) + 1);
    for (NodeId c : n.children) h = mix(h, hashes[static_cast<std::size_t>(c)]);
    h = mix(h, n.children.size());
    hashes[static_cast<std::size_t>(id)] = h;
  }
  return hashes;
}

bool is_unit_declaration(Kind kind) {
  return kind == Kind::MethodDeclaration || kind == Kind::Initializer || kind == Kind::LambdaExpression;
}

class Matcher {
public:
  Matcher(const SyntaxTree &before, const SyntaxTree &after, const MatchOptions &options)
      : t1_(before),
        t2_(after),
        options_(options),
        h1_(subtree_hashes(before)),
        h2_(subtree_hashes(after)),
        mapping_(before.size(), after.size()) {}

  NodeMapping run() {
    if (t1_.empty() || t2_.empty()) return std::move(mapping_);
    match_top_down();
    match_bottom_up();
    return std::move(mapping_);
  }

private:
  bool identical(NodeId a, NodeId b) const {
    if (h1_[static_cast<std::size_t>(a)] != h2_[static_cast<std::size_t>(b)]) return false;
    const SyntaxNode &na = t1_.node(a);
    const SyntaxNode &nb = t2_.node(b);
    if (na.subtree_size != nb.subtree_size) return false;
    for (int i = 0; i < na.subtree_size; ++i) {
      const SyntaxNode &x = t1_.node(a + i);
      const SyntaxNode &y = t2_.node(b + i);
      if (x.kind != y.kind || x.label != y.label || x.children.size() != y.children.size()) return false;
    }
    return true;
  }

  void link_subtrees(NodeId a, NodeId b) {
    int n = t1_.node(a).subtree_size;
    for (int i = 0; i < n; ++i) {
      if (!mapping_.has_before(a + i) && !mapping_.has_after(b + i)) mapping_.link(a + i, b + i);
    }
  }

  double dice(NodeId a, NodeId b) const {
    const SyntaxNode &na = t1_.node(a);
    const SyntaxNode &nb = t2_.node(b);
    int desc_a = na.subtree_size - 1;
    int desc_b = nb.subtree_size - 1;
    if (desc_a + desc_b == 0) return 0.0;
    int common = 0;
    for (NodeId d = a + 1; d < a + na.subtree_size; ++d) {
      NodeId p = mapping_.after_of(d);
      if (p != kNoNode && t2_.is_descendant(p, b) && p != b) ++common;
    }
    return 2.0 * common / (desc_a + desc_b);
  }

  // Height-indexed priority list of subtree roots.
  struct HeightQueue {
    const SyntaxTree *tree;
    std::priority_queue<std::pair<int, NodeId>> heap;
    int peek() const { return heap.empty() ? 0 : heap.top().first; }
    void push(NodeId id) { heap.emplace(tree->node(id).depth, -id); }
    std::vector<NodeId> pop() {
      std::vector<NodeId> out;
      int h = peek();
      while (!heap.empty() && heap.top().first == h) {
        out.push_back(-heap.top().second);
        heap.pop();
      }
      return out;
    }
    void open(NodeId id) {
      for (NodeId c : tree->node(id).children) push(c);
    }
  };

  void match_top_down() {
    HeightQueue q1{&t1_, {}};
    HeightQueue q2{&t2_, {}};
    q1.push(t1_.root());
    q2.push(t2_.root());
    std::vector<std::pair<NodeId, NodeId>> ambiguous;
    while (std::min(q1.peek(), q2.peek()) >= options_.min_height) {
      if (q1.peek() > q2.peek()) {
        for (NodeId id : q1.pop()) q1.open(id);
        continue;
      }
      if (q2.peek() > q1.peek()) {
        for (NodeId id : q2.pop()) q2.open(id);
        continue;
      }
      auto h1 = q1.pop();
      auto h2 = q2.pop();
      std::unordered_map<std::uint64_t, std::vector<NodeId>> by_hash;
      for (NodeId b : h2) by_hash[h2_[static_cast<std::size_t>(b)]].push_back(b);
      std::map<NodeId, std::vector<NodeId>> cand1;
      std::map<NodeId, std::vector<NodeId>> cand2;
      for (NodeId a : h1) {
        auto it = by_hash.find(h1_[static_cast<std::size_t>(a)]);
        if (it == by_hash.end()) continue;
        for (NodeId b : it->second) {
          if (!identical(a, b)) continue;
          cand1[a].push_back(b);
          cand2[b].push_back(a);
        }
      }
      for (auto &[a, bs] : cand1) {
        if (bs.size() == 1 && cand2[bs.front()].size() == 1) {
          link_subtrees(a, bs.front());
        } else {
          for (NodeId b : bs) ambiguous.emplace_back(a, b);
        }
      }
      for (NodeId a : h1)
        if (!cand1.contains(a)) q1.open(a);
      for (NodeId b : h2)
        if (!cand2.contains(b)) q2.open(b);
    }
    // Resolve ambiguous identical subtrees by parent similarity, then by
    // closeness of position in the source.
    std::vector<std::tuple<double, long, NodeId, NodeId>> ranked;
    ranked.reserve(ambiguous.size());
    for (auto [a, b] : ambiguous) {
      NodeId pa = t1_.node(a).parent;
      NodeId pb = t2_.node(b).parent;
      double sim = (pa != kNoNode && pb != kNoNode) ? dice(pa, pb) : 0.0;
      long distance = std::labs(static_cast<long>(a) - static_cast<long>(b));
      ranked.emplace_back(-sim, distance, a, b);
    }
    std::sort(ranked.begin(), ranked.end());
    for (auto &[sim, distance, a, b] : ranked) {
      if (!mapping_.has_before(a) && !mapping_.has_after(b)) link_subtrees(a, b);
    }
  }

  std::vector<NodeId> postorder(const SyntaxTree &tree) const {
    std::vector<NodeId> order;
    order.reserve(static_cast<std::size_t>(tree.size()));
    std::vector<std::pair<NodeId, std::size_t>> stack{{tree.root(), 0}};
    while (!stack.empty()) {
      auto &[id, next] = stack.back();
      const auto &children = tree.node(id).children;
      if (next < children.size()) {
        NodeId c = children[next++];
        stack.emplace_back(c, 0);
      } else {
        order.push_back(id);
        stack.pop_back();
      }
    }
    return order;
  }

  void match_bottom_up() {
    for (NodeId a : postorder(t1_)) {
      if (a == t1_.root()) {
        if (!mapping_.has_before(a) && !mapping_.has_after(t2_.root()) &&
            t1_.node(a).kind == t2_.node(t2_.root()).kind) {
          mapping_.link(a, t2_.root());
        }
        if (mapping_.after_of(a) == t2_.root()) recover(a, t2_.root());
        continue;
      }
      if (mapping_.has_before(a)) continue;
      const SyntaxNode &na = t1_.node(a);
      std::vector<NodeId> candidates;
      for (NodeId d = a + 1; d < a + na.subtree_size; ++d) {
        NodeId p = mapping_.after_of(d);
        if (p == kNoNode) continue;
        for (NodeId up = t2_.node(p).parent; up != kNoNode; up = t2_.node(up).parent) {
          if (t2_.node(up).kind == na.kind && !mapping_.has_after(up) && up != t2_.root()) candidates.push_back(up);
        }
      }
      if (candidates.empty()) continue;
      std::sort(candidates.begin(), candidates.end());
      candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
      NodeId best = kNoNode;
      double best_sim = -1.0;
      for (NodeId b : candidates) {
        double sim = dice(a, b);
        if (sim > best_sim) {
          best_sim = sim;
          best = b;
        }
      }
      if (best != kNoNode && best_sim >= options_.min_similarity) {
        mapping_.link(a, best);
        recover(a, best);
      }
    }
  }

  // Maps unmatched children of a matched pair: identical subtrees along the
  // LCS first, then same kind and label, then same kind, in source order.
  void recover(NodeId a, NodeId b) {
    const auto &ca = t1_.node(a).children;
    const auto &cb = t2_.node(b).children;
    const std::size_t n = ca.size();
    const std::size_t m = cb.size();
    if (n == 0 || m == 0) return;
    auto equal = [&](NodeId x, NodeId y) {
      if (mapping_.after_of(x) == y) return true;
      return !mapping_.has_before(x) && !mapping_.has_after(y) && identical(x, y);
    };
    std::vector<std::vector<int>> lcs(n + 1, std::vector<int>(m + 1, 0));
    for (std::size_t i = n; i-- > 0;)
      for (std::size_t j = m; j-- > 0;)
        lcs[i][j] = equal(ca[i], cb[j]) ? lcs[i + 1][j + 1] + 1 : std::max(lcs[i + 1][j], lcs[i][j + 1]);
    for (std::size_t i = 0, j = 0; i < n && j < m;) {
      if (equal(ca[i], cb[j])) {
        if (!mapping_.has_before(ca[i])) link_subtrees(ca[i], cb[j]);
        ++i;
        ++j;
      } else if (lcs[i + 1][j] >= lcs[i][j + 1]) {
        ++i;
      } else {
        ++j;
      }
    }
    auto pass = [&](bool need_label) {
      std::size_t cursor = 0;
      for (NodeId x : ca) {
        if (mapping_.has_before(x)) continue;
        const SyntaxNode &nx = t1_.node(x);
        for (std::size_t j = cursor; j < m; ++j) {
          NodeId y = cb[j];
          if (mapping_.has_after(y)) continue;
          const SyntaxNode &ny = t2_.node(y);
          if (nx.kind != ny.kind || (need_label && nx.label != ny.label)) continue;
          mapping_.link(x, y);
          recover(x, y);
          cursor = j + 1;
          break;
        }
      }
    };
    pass(true);
    pass(false);
  }

  const SyntaxTree &t1_;
  const SyntaxTree &t2_;
  MatchOptions options_;
  std::vector<std::uint64_t> h1_;
  std::vector<std::uint64_t> h2_;
  NodeMapping mapping_;
};

bool name_or_modifier(NodeCategory c) { return c == NodeCategory::NameBearing || c == NodeCategory::Modifier; }

bool inside_log_statement(const SyntaxTree &tree, NodeId id) {
  for (NodeId p = id; p != kNoNode; p = tree.node(p).parent)
    if (tree.node(p).category == NodeCategory::LogStatement) return true;
  return false;
}

// Region of unmapped nodes rooted at `root`: stops at mapped nodes and at
// nested function declarations. Returns (height, all name/modifier).
std::pair<int, bool> region_shape(const SyntaxTree &tree, NodeId root, const std::function<bool(NodeId)> &mapped) {
  bool names_only = true;
  std::function<int(NodeId)> height = [&](NodeId id) -> int {
    const SyntaxNode &n = tree.node(id);
    names_only = names_only && name_or_modifier(n.category);
    int best = 0;
    for (NodeId c : n.children) {
      if (mapped(c) || is_unit_declaration(tree.node(c).kind)) continue;
      best = std::max(best, height(c));
    }
    return best + 1;
  };
  int h = height(root);
  return {h, names_only};
}

bool all_name_or_modifier(const SyntaxTree &tree, NodeId root) {
  const SyntaxNode &n = tree.node(root);
  for (NodeId id = root; id < root + n.subtree_size; ++id)
    if (!name_or_modifier(tree.node(id).category)) return false;
  return true;
}

// Indices (into `seq`) forming a longest strictly increasing subsequence.
std::vector<std::size_t> longest_increasing(const std::vector<int> &seq) {
  std::vector<std::size_t> tails;
  std::vector<std::ptrdiff_t> prev(seq.size(), -1);
  for (std::size_t i = 0; i < seq.size(); ++i) {
    auto it = std::lower_bound(tails.begin(), tails.end(), seq[i],
                               [&](std::size_t idx, int v) { return seq[idx] < v; });
    if (it != tails.begin()) prev[i] = static_cast<std::ptrdiff_t>(*std::prev(it));
    if (it == tails.end()) {
      tails.push_back(i);
    } else {
      *it = i;
    }
  }
  std::vector<std::size_t> out;
  if (tails.empty()) return out;
  for (std::ptrdiff_t i = static_cast<std::ptrdiff_t>(tails.back()); i >= 0; i = prev[static_cast<std::size_t>(i)])
    out.push_back(static_cast<std::size_t>(i));
  std::reverse(out.begin(), out.end());
  return out;
}

}  // namespace

NodeMapping map_trees(const SyntaxTree &before, const SyntaxTree &after, const MatchOptions &options) {
  return Matcher(before, after, options).run();
}

std::vector<EditAction> edit_script(const NodeMapping &mapping, const SyntaxTree &before, const SyntaxTree &after) {
  std::vector<EditAction> actions;
  auto mapped_before = [&](NodeId id) { return mapping.has_before(id); };
  auto mapped_after = [&](NodeId id) { return mapping.has_after(id); };

  // Deletions, in before preorder.
  for (NodeId id = 0; id < before.size(); ++id) {
    if (mapping.has_before(id)) continue;
    const SyntaxNode &n = before.node(id);
    bool region_root = n.parent == kNoNode || mapping.has_before(n.parent) || is_unit_declaration(n.kind);
    if (!region_root) continue;
    auto [height, names] = region_shape(before, id, mapped_before);
    EditAction a;
    a.kind = ActionKind::Delete;
    a.before_node = id;
    a.before_span = n.span;
    a.subtree_depth = height;
    a.only_name_or_modifier = names;
    a.blacklisted = inside_log_statement(before, id);
    actions.push_back(a);
  }

  // Updates and moves over mapped pairs, in after preorder.
  std::vector<bool> moved(static_cast<std::size_t>(after.size()), false);
  for (NodeId b = 0; b < after.size(); ++b) {
    NodeId a = mapping.before_of(b);
    if (a == kNoNode) continue;
    NodeId pa = before.node(a).parent;
    NodeId pb = after.node(b).parent;
    if (pa == kNoNode && pb == kNoNode) continue;
    if (pa == kNoNode || pb == kNoNode || mapping.after_of(pa) != pb) moved[static_cast<std::size_t>(b)] = true;
  }
  // Reordering among children of a matched parent pair.
  for (NodeId pb = 0; pb < after.size(); ++pb) {
    NodeId pa = mapping.before_of(pb);
    if (pa == kNoNode) continue;
    std::vector<int> positions;  // position in `pa` of each stable child, ordered by `pb`
    std::vector<NodeId> stable;
    const auto &children_a = before.node(pa).children;
    for (NodeId cb : after.node(pb).children) {
      NodeId ca = mapping.before_of(cb);
      if (ca == kNoNode || before.node(ca).parent != pa) continue;
      auto pos = std::find(children_a.begin(), children_a.end(), ca) - children_a.begin();
      positions.push_back(static_cast<int>(pos));
      stable.push_back(cb);
    }
    auto keep = longest_increasing(positions);
    std::vector<bool> in_order(stable.size(), false);
    for (auto i : keep) in_order[i] = true;
    for (std::size_t i = 0; i < stable.size(); ++i)
      if (!in_order[i]) moved[static_cast<std::size_t>(stable[i])] = true;
  }

  for (NodeId b = 0; b < after.size(); ++b) {
    NodeId a = mapping.before_of(b);
    if (a == kNoNode) {
      const SyntaxNode &n = after.node(b);
      bool region_root = n.parent == kNoNode || mapping.has_after(n.parent) || is_unit_declaration(n.kind);
      if (!region_root) continue;
      auto [height, names] = region_shape(after, b, mapped_after);
      EditAction act;
      act.kind = ActionKind::Insert;
      act.after_node = b;
      act.after_span = n.span;
      act.subtree_depth = height;
      act.only_name_or_modifier = names;
      act.blacklisted = inside_log_statement(after, b);
      actions.push_back(act);
      continue;
    }
    const SyntaxNode &na = before.node(a);
    const SyntaxNode &nb = after.node(b);
    if (na.label != nb.label) {
      EditAction act;
      act.kind = ActionKind::Update;
      act.before_node = a;
      act.after_node = b;
      act.before_span = na.span;
      act.after_span = nb.span;
      act.subtree_depth = 1;
      act.only_name_or_modifier = name_or_modifier(na.category) && name_or_modifier(nb.category);
      act.blacklisted = inside_log_statement(before, a) && inside_log_statement(after, b);
      actions.push_back(act);
    }
    if (moved[static_cast<std::size_t>(b)]) {
      EditAction act;
      act.kind = ActionKind::Move;
      act.before_node = a;
      act.after_node = b;
      act.before_span = na.span;
      act.after_span = nb.span;
      act.subtree_depth = nb.depth;
      act.only_name_or_modifier = all_name_or_modifier(after, b);
      act.blacklisted = inside_log_statement(before, a) && inside_log_statement(after, b);
      actions.push_back(act);
    }
  }
  return actions;
}

namespace {

// owner[node] = innermost function unit index, or -1.
std::vector<int> owner_map(const SyntaxTree &tree, const std::vector<syntax::FunctionUnit> &functions) {
  std::vector<int> owner(static_cast<std::size_t>(tree.size()), -1);
  // Units are in preorder of their declarations, so later units are nested
  // inside (or disjoint from) earlier ones.
  for (std::size_t i = 0; i < functions.size(); ++i) {
    NodeId decl = functions[i].declaration;
    if (decl == kNoNode) continue;
    for (NodeId id = decl; id < decl + tree.node(decl).subtree_size; ++id)
      owner[static_cast<std::size_t>(id)] = static_cast<int>(i);
  }
  return owner;
}

}  // namespace

std::vector<std::pair<int, int>> pair_functions(const NodeMapping &mapping,
                                                const std::vector<syntax::FunctionUnit> &functions_before,
                                                const std::vector<syntax::FunctionUnit> &functions_after) {
  std::vector<std::pair<int, int>> pairs;
  std::vector<bool> used_after(functions_after.size(), false);
  std::vector<bool> used_before(functions_before.size(), false);
  std::unordered_map<NodeId, int> after_by_decl;
  for (std::size_t j = 0; j < functions_after.size(); ++j)
    after_by_decl[functions_after[j].declaration] = static_cast<int>(j);
  for (std::size_t i = 0; i < functions_before.size(); ++i) {
    NodeId decl = functions_before[i].declaration;
    if (!mapping.has_before(decl)) continue;
    auto it = after_by_decl.find(mapping.after_of(decl));
    if (it == after_by_decl.end() || used_after[static_cast<std::size_t>(it->second)]) continue;
    pairs.emplace_back(static_cast<int>(i), it->second);
    used_after[static_cast<std::size_t>(it->second)] = true;
    used_before[i] = true;
  }
  std::unordered_map<std::string, int> after_by_name;
  for (std::size_t j = 0; j < functions_after.size(); ++j)
    if (!used_after[j]) after_by_name.emplace(functions_after[j].qualified_name, static_cast<int>(j));
  for (std::size_t i = 0; i < functions_before.size(); ++i) {
    if (used_before[i]) continue;
    auto it = after_by_name.find(functions_before[i].qualified_name);
    if (it == after_by_name.end()) continue;
    pairs.emplace_back(static_cast<int>(i), it->second);
    after_by_name.erase(it);
  }
  std::sort(pairs.begin(), pairs.end());
  return pairs;
}

std::vector<FunctionChangeSet> group_by_function(const std::vector<EditAction> &actions, const NodeMapping &mapping,
                                                 const SyntaxTree &before, const SyntaxTree &after,
                                                 const std::vector<syntax::FunctionUnit> &functions_before,
                                                 const std::vector<syntax::FunctionUnit> &functions_after,
                                                 const std::string &file) {
  auto owner_before = owner_map(before, functions_before);
  auto owner_after = owner_map(after, functions_after);
  std::vector<int> before_to_after(functions_before.size(), -1);
  std::vector<int> after_to_before(functions_after.size(), -1);
  for (auto [i, j] : pair_functions(mapping, functions_before, functions_after)) {
    before_to_after[static_cast<std::size_t>(i)] = j;
    after_to_before[static_cast<std::size_t>(j)] = i;
  }

  // Changeset key: ('a', after unit) when the function exists after the
  // change, ('b', before unit) for deleted functions, ('f', -1) file scope.
  std::map<std::pair<char, int>, FunctionChangeSet> sets;
  std::vector<std::pair<char, int>> order;
  auto key_for_before = [&](NodeId id) -> std::pair<char, int> {
    int u = id == kNoNode ? -1 : owner_before[static_cast<std::size_t>(id)];
    if (u < 0) return {'f', -1};
    int v = before_to_after[static_cast<std::size_t>(u)];
    return v >= 0 ? std::pair<char, int>{'a', v} : std::pair<char, int>{'b', u};
  };
  auto key_for_after = [&](NodeId id) -> std::pair<char, int> {
    int v = id == kNoNode ? -1 : owner_after[static_cast<std::size_t>(id)];
    if (v < 0) return {'f', -1};
    return {'a', v};
  };
  auto add = [&](std::pair<char, int> key, const EditAction &action) {
    auto [it, inserted] = sets.try_emplace(key);
    FunctionChangeSet &set = it->second;
    if (inserted) {
      order.push_back(key);
      set.file = file;
      if (key.first == 'a') {
        set.after_unit = key.second;
        set.before_unit = after_to_before[static_cast<std::size_t>(key.second)];
        set.function = functions_after[static_cast<std::size_t>(key.second)].qualified_name;
      } else if (key.first == 'b') {
        set.before_unit = key.second;
        set.function = functions_before[static_cast<std::size_t>(key.second)].qualified_name;
      } else {
        set.function = std::string(kFileScope);
      }
    }
    set.actions.push_back(action);
  };

  for (const auto &action : actions) {
    switch (action.kind) {
      case ActionKind::Insert:
      case ActionKind::Update:
        add(key_for_after(action.after_node), action);
        break;
      case ActionKind::Delete:
        add(key_for_before(action.before_node), action);
        break;
      case ActionKind::Move: {
        auto target = key_for_after(action.after_node);
        auto source = key_for_before(action.before_node);
        add(target, action);
        if (source != target) add(source, action);
        break;
      }
    }
  }
  std::vector<FunctionChangeSet> out;
  out.reserve(order.size());
  for (const auto &key : order) out.push_back(std::move(sets[key]));
  return out;
}

double DeltaWeights::weight(ActionKind kind) const {
  switch (kind) {
    case ActionKind::Insert:
      return add;
    case ActionKind::Update:
      return update;
    case ActionKind::Move:
      return move;
    case ActionKind::Delete:
      return del;
  }
  return add;
}

double delta_ast(const std::vector<EditAction> &actions, const DeltaWeights &weights) {
  double total = 0.0;
  for (const auto &a : actions) {
    if (a.blacklisted) continue;
    double factor = a.only_name_or_modifier ? weights.name_only_factor : 1.0;
    total += weights.weight(a.kind) * static_cast<double>(a.subtree_depth) * factor;
  }
  return total;
}

double delta_ast(const FunctionChangeSet &changeset, const DeltaWeights &weights) {
  return delta_ast(changeset.actions, weights);
}

}  // namespace cvalue::diff
