#include "cvalue/pdg.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <map>

namespace cvalue::pdg {

using syntax::Kind;
using syntax::Role;
using syntax::SyntaxTree;

std::size_t FunctionPDG::index_of(NodeId statement) const {
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].statement == statement) return i;
  return nodes.size();
}

namespace {

bool is_statement(Kind k) {
  switch (k) {
    case Kind::LocalVariableStatement:
    case Kind::ExpressionStatement:
    case Kind::IfStatement:
    case Kind::ForStatement:
    case Kind::EnhancedForStatement:
    case Kind::WhileStatement:
    case Kind::DoStatement:
    case Kind::SwitchStatement:
    case Kind::BreakStatement:
    case Kind::ContinueStatement:
    case Kind::ReturnStatement:
    case Kind::ThrowStatement:
    case Kind::YieldStatement:
    case Kind::TryStatement:
    case Kind::CatchClause:
    case Kind::SynchronizedStatement:
    case Kind::AssertStatement:
    case Kind::ConstructorCall:
    case Kind::LocalClassStatement:
      return true;
    default:
      return false;
  }
}

bool is_predicate(Kind k) {
  return k == Kind::IfStatement || k == Kind::ForStatement || k == Kind::EnhancedForStatement ||
         k == Kind::WhileStatement || k == Kind::DoStatement || k == Kind::SwitchStatement ||
         k == Kind::CatchClause;
}

bool nested_unit(Kind k) {
  return k == Kind::LambdaExpression || k == Kind::AnonymousClass || k == Kind::LocalClassStatement;
}

bool header_role(Role r) {
  return r == Role::Condition || r == Role::Init || r == Role::Update || r == Role::Iterable || r == Role::Resource;
}

using State = std::map<std::string, std::set<std::size_t>>;

void merge_into(State &into, const State &from) {
  for (const auto &[var, defs] : from) into[var].insert(defs.begin(), defs.end());
}

class Builder {
public:
  Builder(const SyntaxTree &tree) : tree_(tree) {}

  FunctionPDG run(const syntax::FunctionUnit &function) {
    if (function.body == syntax::kNoNode) return std::move(pdg_);
    const auto &body = tree_.node(function.body);
    if (body.kind == Kind::Block) {
      for (NodeId c : body.children) collect(c, kNone);
    } else {
      // expression-bodied lambda: the expression is the only statement
      add_node(function.body, body.span, {function.body}, kNone);
    }
    State state;
    if (body.kind == Kind::Block) {
      flow_children(function.body, state);
    } else {
      apply(0, state);
    }
    return std::move(pdg_);
  }

private:
  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

  std::vector<NodeId> header_children(NodeId id) const {
    std::vector<NodeId> out;
    for (NodeId c : tree_.node(id).children) {
      const auto &cn = tree_.node(c);
      if (header_role(cn.role) || cn.kind == Kind::Parameter) out.push_back(c);
    }
    return out;
  }

  Span header_span(NodeId id, const std::vector<NodeId> &header) const {
    const auto &n = tree_.node(id);
    if (n.kind == Kind::DoStatement) {
      for (NodeId c : header)
        if (tree_.node(c).role == Role::Condition) return tree_.node(c).span;
    }
    Span s{n.span.begin, n.span.begin};
    for (NodeId c : header) s.end = std::max(s.end, tree_.node(c).span.end);
    if (s.end == s.begin) {
      // keyword only ("try", "do")
      s.end = std::min(n.span.end, n.span.begin + (n.kind == Kind::TryStatement ? 3 : 1));
    }
    return s;
  }

  std::size_t add_node(NodeId stmt, Span own, const std::vector<NodeId> &regions, std::size_t parent) {
    PdgNode node;
    node.statement = stmt;
    node.own_span = own;
    for (NodeId r : regions) scan(r, node);
    pdg_.nodes.push_back(std::move(node));
    std::size_t idx = pdg_.nodes.size() - 1;
    index_[stmt] = idx;
    if (parent != kNone) pdg_.cdg_edges.emplace(parent, idx);
    return idx;
  }

  // Creates nodes in preorder; `controller` is the nearest enclosing predicate.
  void collect(NodeId id, std::size_t controller) {
    const auto &n = tree_.node(id);
    if (n.kind == Kind::Block || n.kind == Kind::LabeledStatement) {
      for (NodeId c : n.children) collect(c, controller);
      return;
    }
    if (n.kind == Kind::SwitchCase || n.kind == Kind::EmptyStatement) return;
    if (!is_statement(n.kind)) return;
    if (n.kind == Kind::LocalClassStatement) {
      add_node(id, n.span, {}, controller);
      return;
    }
    bool compound = n.kind == Kind::IfStatement || n.kind == Kind::ForStatement ||
                    n.kind == Kind::EnhancedForStatement || n.kind == Kind::WhileStatement ||
                    n.kind == Kind::DoStatement || n.kind == Kind::SwitchStatement || n.kind == Kind::TryStatement ||
                    n.kind == Kind::CatchClause || n.kind == Kind::SynchronizedStatement;
    if (!compound) {
      add_node(id, n.span, {id}, controller);
      return;
    }
    auto header = header_children(id);
    std::size_t self = add_node(id, header_span(id, header), header, controller);
    std::size_t inner = is_predicate(n.kind) ? self : controller;
    for (NodeId c : n.children) {
      const auto &cn = tree_.node(c);
      if (header_role(cn.role) || cn.kind == Kind::Parameter) continue;
      // catch clauses hang off the try, the finally block is unconditional
      collect(c, cn.kind == Kind::CatchClause || cn.role == Role::Finally ? controller : inner);
    }
  }

  void scan(NodeId id, PdgNode &node) const {
    const auto &n = tree_.node(id);
    if (nested_unit(n.kind)) return;
    switch (n.kind) {
      case Kind::SimpleName: {
        if (n.role == Role::Name) return;  // declared or member names
        node.uses.insert(n.label);
        return;
      }
      case Kind::VariableFragment:
      case Kind::Parameter:
        for (NodeId c : n.children) {
          const auto &cn = tree_.node(c);
          if (cn.role == Role::Name && cn.kind == Kind::SimpleName) {
            node.defs.insert(cn.label);
          } else {
            scan(c, node);
          }
        }
        return;
      case Kind::Assignment: {
        for (NodeId c : n.children) {
          const auto &cn = tree_.node(c);
          if (cn.role == Role::Target) {
            std::string var = assigned_variable(c);
            if (!var.empty()) node.defs.insert(var);
            // compound assignments also read the target; array and field
            // targets read their base and index
            if (n.label != "=" || cn.kind != Kind::SimpleName) scan(c, node);
          } else {
            scan(c, node);
          }
        }
        return;
      }
      case Kind::PrefixExpression:
      case Kind::PostfixExpression:
        if (n.label == "++" || n.label == "--") {
          std::string var = assigned_variable(n.children.front());
          if (!var.empty()) node.defs.insert(var);
        }
        break;
      case Kind::Type:
      case Kind::Modifier:
      case Kind::Annotation:
        return;
      default:
        break;
    }
    for (NodeId c : n.children) scan(c, node);
  }

  std::string assigned_variable(NodeId id) const {
    const auto &n = tree_.node(id);
    switch (n.kind) {
      case Kind::SimpleName:
        return n.label;
      case Kind::FieldAccess:
        for (NodeId c : n.children)
          if (tree_.node(c).role == Role::Name) return tree_.node(c).label;
        return {};
      case Kind::ArrayAccess:
      case Kind::ParenthesizedExpression:
        return n.children.empty() ? std::string{} : assigned_variable(n.children.front());
      default:
        return {};
    }
  }

  // Uses read the reaching definitions, then defs kill them.
  void apply(std::size_t idx, State &state) {
    const PdgNode &node = pdg_.nodes[idx];
    for (const auto &var : node.uses) {
      auto it = state.find(var);
      if (it == state.end()) continue;
      for (std::size_t d : it->second)
        if (d != idx) pdg_.ddg_edges.emplace(d, idx);
    }
    for (const auto &var : node.defs) state[var] = {idx};
  }

  void flow_children(NodeId id, State &state) {
    for (NodeId c : tree_.node(id).children) flow(c, state);
  }

  template <typename Body>
  void loop_fixpoint(State &state, Body body) {
    State acc = state;
    for (;;) {
      State iter = acc;
      body(iter);
      State merged = acc;
      merge_into(merged, iter);
      if (merged == acc) break;
      acc = std::move(merged);
    }
    state = std::move(acc);
  }

  void flow(NodeId id, State &state) {
    const auto &n = tree_.node(id);
    auto found = index_.find(id);
    if (n.kind == Kind::Block || n.kind == Kind::LabeledStatement) {
      flow_children(id, state);
      return;
    }
    if (found == index_.end()) return;
    std::size_t self = found->second;
    auto child = [&](Role role) {
      for (NodeId c : n.children)
        if (tree_.node(c).role == role) return c;
      return syntax::kNoNode;
    };
    auto body_children = [&]() {
      std::vector<NodeId> out;
      for (NodeId c : n.children) {
        const auto &cn = tree_.node(c);
        if (!header_role(cn.role) && cn.kind != Kind::Parameter) out.push_back(c);
      }
      return out;
    };
    switch (n.kind) {
      case Kind::IfStatement: {
        apply(self, state);
        State then_state = state;
        State else_state = state;
        if (NodeId t = child(Role::Then); t != syntax::kNoNode) flow(t, then_state);
        if (NodeId e = child(Role::Else); e != syntax::kNoNode) flow(e, else_state);
        state = std::move(then_state);
        merge_into(state, else_state);
        return;
      }
      case Kind::ForStatement:
      case Kind::EnhancedForStatement:
      case Kind::WhileStatement:
        apply(self, state);
        loop_fixpoint(state, [&](State &s) {
          for (NodeId c : body_children()) flow(c, s);
          apply(self, s);
        });
        return;
      case Kind::DoStatement:
        loop_fixpoint(state, [&](State &s) {
          for (NodeId c : body_children()) flow(c, s);
          apply(self, s);
        });
        return;
      case Kind::SwitchStatement: {
        apply(self, state);
        State entry = state;
        for (NodeId c : n.children) {
          const auto &cn = tree_.node(c);
          if (cn.role == Role::Condition) continue;
          if (cn.kind == Kind::SwitchCase) {
            merge_into(state, entry);
            continue;
          }
          flow(c, state);
        }
        merge_into(state, entry);
        return;
      }
      case Kind::TryStatement: {
        apply(self, state);
        State entry = state;
        NodeId finally_block = child(Role::Finally);
        if (NodeId b = child(Role::Body); b != syntax::kNoNode) flow(b, state);
        State all = state;
        for (NodeId c : n.children) {
          if (tree_.node(c).kind != Kind::CatchClause) continue;
          State s = entry;
          merge_into(s, state);
          flow(c, s);
          merge_into(all, s);
        }
        state = std::move(all);
        if (finally_block != syntax::kNoNode) flow(finally_block, state);
        return;
      }
      case Kind::CatchClause:
      case Kind::SynchronizedStatement:
        apply(self, state);
        for (NodeId c : body_children()) flow(c, state);
        return;
      default:
        apply(self, state);
        return;
    }
  }

  const SyntaxTree &tree_;
  FunctionPDG pdg_;
  std::map<NodeId, std::size_t> index_;
};

// Statements of `pdg` whose own span overlaps `span`. Zero-width spans match
// the statement containing the position.
std::vector<std::size_t> overlapping(const FunctionPDG &pdg, Span span) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < pdg.nodes.size(); ++i) {
    const Span &own = pdg.nodes[i].own_span;
    bool hit = span.begin == span.end ? (own.begin <= span.begin && span.begin < own.end) : own.overlaps(span);
    if (hit) out.push_back(i);
  }
  return out;
}

NodeSet reach(const FunctionPDG &pdg, const NodeSet &start, const std::set<std::pair<std::size_t, std::size_t>> &edges,
              bool forward) {
  std::vector<std::vector<std::size_t>> adj(pdg.size());
  for (auto [a, b] : edges) {
    if (forward) {
      adj[a].push_back(b);
    } else {
      adj[b].push_back(a);
    }
  }
  NodeSet seen(start.begin(), start.end());
  std::deque<std::size_t> queue(start.begin(), start.end());
  while (!queue.empty()) {
    std::size_t v = queue.front();
    queue.pop_front();
    for (std::size_t w : adj[v])
      if (seen.insert(w).second) queue.push_back(w);
  }
  return seen;
}

}  // namespace

FunctionPDG build_pdg(const SyntaxTree &tree, const syntax::FunctionUnit &function) {
  return Builder(tree).run(function);
}

NodeSet changed_pdg_nodes(const FunctionPDG &pdg_before, const FunctionPDG &pdg_after,
                          const diff::FunctionChangeSet &changeset, const diff::NodeMapping &mapping) {
  NodeSet changed;
  auto after_index = [&](NodeId before_stmt) -> std::size_t {
    if (!mapping.has_before(before_stmt)) return pdg_after.size();
    return pdg_after.index_of(mapping.after_of(before_stmt));
  };
  auto mark_before = [&](Span span) {
    for (std::size_t i : overlapping(pdg_before, span)) {
      std::size_t target = after_index(pdg_before.nodes[i].statement);
      for (std::size_t j = i + 1; target == pdg_after.size() && j < pdg_before.size(); ++j)
        target = after_index(pdg_before.nodes[j].statement);
      for (std::size_t j = i; target == pdg_after.size() && j-- > 0;)
        target = after_index(pdg_before.nodes[j].statement);
      if (target != pdg_after.size()) changed.insert(target);
    }
  };
  auto mark_after = [&](Span span) {
    for (std::size_t i : overlapping(pdg_after, span)) changed.insert(i);
  };
  for (const auto &action : changeset.actions) {
    switch (action.kind) {
      case diff::ActionKind::Insert:
        mark_after(action.after_span);
        break;
      case diff::ActionKind::Update:
        mark_after(action.after_span);
        break;
      case diff::ActionKind::Delete:
        mark_before(action.before_span);
        break;
      case diff::ActionKind::Move:
        mark_after(action.after_span);
        mark_before(action.before_span);
        break;
    }
  }
  return changed;
}

double ddg_impact(const FunctionPDG &pdg, const NodeSet &changed) {
  if (pdg.size() == 0 || changed.empty()) return 0.0;
  NodeSet all = reach(pdg, changed, pdg.ddg_edges, true);
  NodeSet back = reach(pdg, changed, pdg.ddg_edges, false);
  all.insert(back.begin(), back.end());
  return static_cast<double>(all.size()) / static_cast<double>(pdg.size());
}

double cdg_impact(const FunctionPDG &pdg, const NodeSet &changed) {
  if (pdg.size() == 0) return 0.0;
  std::vector<std::size_t> successors(pdg.size(), 0);
  for (auto [a, b] : pdg.cdg_edges) ++successors[a];
  NodeSet roots;
  for (std::size_t v : changed)
    if (v < pdg.size() && successors[v] > 1) roots.insert(v);
  if (roots.empty()) return 0.0;
  NodeSet collected = reach(pdg, roots, pdg.cdg_edges, true);
  return static_cast<double>(collected.size()) / static_cast<double>(pdg.size());
}

double impact_range(double ddg, double cdg) { return 1.0 + std::sqrt(ddg) + std::sqrt(cdg); }

ImpactRange impact(const FunctionPDG &pdg, const NodeSet &changed) {
  ImpactRange r;
  r.ddg_impact = ddg_impact(pdg, changed);
  r.cdg_impact = cdg_impact(pdg, changed);
  r.ir = impact_range(r.ddg_impact, r.cdg_impact);
  return r;
}

}  // namespace cvalue::pdg
