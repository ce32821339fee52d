#include "cvalue/syntax.hpp"

#include <algorithm>
#include <cctype>
#include <map>

namespace cvalue::syntax {

std::string_view to_string(Kind kind) {
  switch (kind) {
#define CVALUE_KIND(k) \
  case Kind::k:        \
    return #k;
    CVALUE_KIND(CompilationUnit)
    CVALUE_KIND(PackageDeclaration)
    CVALUE_KIND(ImportDeclaration)
    CVALUE_KIND(QualifiedName)
    CVALUE_KIND(TypeDeclaration)
    CVALUE_KIND(EnumConstant)
    CVALUE_KIND(AnonymousClass)
    CVALUE_KIND(Initializer)
    CVALUE_KIND(FieldDeclaration)
    CVALUE_KIND(MethodDeclaration)
    CVALUE_KIND(TypeParameters)
    CVALUE_KIND(Throws)
    CVALUE_KIND(Parameter)
    CVALUE_KIND(VariableFragment)
    CVALUE_KIND(Modifier)
    CVALUE_KIND(Annotation)
    CVALUE_KIND(Type)
    CVALUE_KIND(SimpleName)
    CVALUE_KIND(Block)
    CVALUE_KIND(LocalVariableStatement)
    CVALUE_KIND(LocalClassStatement)
    CVALUE_KIND(ExpressionStatement)
    CVALUE_KIND(IfStatement)
    CVALUE_KIND(ForStatement)
    CVALUE_KIND(EnhancedForStatement)
    CVALUE_KIND(WhileStatement)
    CVALUE_KIND(DoStatement)
    CVALUE_KIND(SwitchStatement)
    CVALUE_KIND(SwitchCase)
    CVALUE_KIND(BreakStatement)
    CVALUE_KIND(ContinueStatement)
    CVALUE_KIND(ReturnStatement)
    CVALUE_KIND(ThrowStatement)
    CVALUE_KIND(YieldStatement)
    CVALUE_KIND(TryStatement)
    CVALUE_KIND(CatchClause)
    CVALUE_KIND(SynchronizedStatement)
    CVALUE_KIND(LabeledStatement)
    CVALUE_KIND(AssertStatement)
    CVALUE_KIND(EmptyStatement)
    CVALUE_KIND(ConstructorCall)
    CVALUE_KIND(Assignment)
    CVALUE_KIND(InfixExpression)
    CVALUE_KIND(PrefixExpression)
    CVALUE_KIND(PostfixExpression)
    CVALUE_KIND(ConditionalExpression)
    CVALUE_KIND(InstanceofExpression)
    CVALUE_KIND(CastExpression)
    CVALUE_KIND(MethodInvocation)
    CVALUE_KIND(FieldAccess)
    CVALUE_KIND(ArrayAccess)
    CVALUE_KIND(ClassInstanceCreation)
    CVALUE_KIND(ArrayCreation)
    CVALUE_KIND(ArrayInitializer)
    CVALUE_KIND(LambdaExpression)
    CVALUE_KIND(MethodReference)
    CVALUE_KIND(ParenthesizedExpression)
    CVALUE_KIND(SwitchExpression)
    CVALUE_KIND(NumberLiteral)
    CVALUE_KIND(StringLiteral)
    CVALUE_KIND(CharacterLiteral)
    CVALUE_KIND(BooleanLiteral)
    CVALUE_KIND(NullLiteral)
    CVALUE_KIND(ThisExpression)
    CVALUE_KIND(SuperExpression)
    CVALUE_KIND(TypeLiteral)
#undef CVALUE_KIND
  }
  return "Unknown";
}

std::string_view to_string(NodeCategory category) {
  switch (category) {
    case NodeCategory::NameBearing:
      return "NameBearing";
    case NodeCategory::Modifier:
      return "Modifier";
    case NodeCategory::Comment:
      return "Comment";
    case NodeCategory::LogStatement:
      return "LogStatement";
    case NodeCategory::Other:
      return "Other";
  }
  return "Other";
}

SyntaxTree::SyntaxTree(std::vector<SyntaxNode> nodes, std::string source, std::vector<Comment> comments)
    : nodes_(std::move(nodes)), source_(std::move(source)), comments_(std::move(comments)) {
  line_starts_.push_back(0);
  for (std::size_t i = 0; i < source_.size(); ++i)
    if (source_[i] == '\n') line_starts_.push_back(i + 1);
}

std::size_t SyntaxTree::line_of(std::size_t offset) const {
  auto it = std::upper_bound(line_starts_.begin(), line_starts_.end(), offset);
  return static_cast<std::size_t>(it - line_starts_.begin());
}

namespace {

void flatten_into(const TreeBuilderNode &src, NodeId parent, std::vector<SyntaxNode> &out) {
  auto id = static_cast<NodeId>(out.size());
  out.push_back(SyntaxNode{});
  {
    SyntaxNode &n = out.back();
    n.kind = src.kind;
    n.label = src.label;
    n.role = src.role;
    n.parent = parent;
    n.span = src.span;
  }
  std::vector<NodeId> children;
  children.reserve(src.children.size());
  int depth = 0;
  for (const auto &child : src.children) {
    children.push_back(static_cast<NodeId>(out.size()));
    flatten_into(*child, id, out);
    depth = std::max(depth, out[static_cast<std::size_t>(children.back())].depth);
  }
  SyntaxNode &n = out[static_cast<std::size_t>(id)];
  n.children = std::move(children);
  n.depth = depth + 1;
  n.subtree_size = static_cast<int>(out.size()) - id;
}

}  // namespace

std::vector<SyntaxNode> flatten(const TreeBuilderNode &root) {
  std::vector<SyntaxNode> out;
  flatten_into(root, kNoNode, out);
  return out;
}

ParseError::ParseError(std::size_t position, const std::string &message)
    : std::runtime_error("parse error at offset " + std::to_string(position) + ": " + message),
      position_(position) {}

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::vector<std::string> split_dotted(std::string_view dotted) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (start <= dotted.size()) {
    std::size_t dot = dotted.find('.', start);
    if (dot == std::string_view::npos) dot = dotted.size();
    std::string part(dotted.substr(start, dot - start));
    if (part.size() >= 2 && part.ends_with("()")) part.resize(part.size() - 2);
    parts.push_back(lower(part));
    start = dot + 1;
  }
  return parts;
}

}  // namespace

bool Blacklist::matches(std::string_view dotted_callee) const {
  if (dotted_callee.empty()) return false;
  auto segments = split_dotted(dotted_callee);
  for (const auto &pattern : patterns) {
    auto wanted = split_dotted(pattern);
    if (wanted.empty()) continue;
    if (wanted.size() == 1) {
      if (std::find(segments.begin(), segments.end(), wanted.front()) != segments.end()) return true;
    } else if (wanted.size() <= segments.size() &&
               std::equal(wanted.begin(), wanted.end(), segments.begin())) {
      return true;
    }
  }
  return false;
}

AdapterRegistry::AdapterRegistry() { add(make_java_adapter()); }

void AdapterRegistry::add(std::shared_ptr<const LanguageAdapter> adapter) {
  adapters_.push_back(std::move(adapter));
}

const LanguageAdapter *AdapterRegistry::for_language(std::string_view language) const {
  for (const auto &a : adapters_)
    if (a->id() == language) return a.get();
  return nullptr;
}

const LanguageAdapter *AdapterRegistry::for_path(std::string_view path) const {
  for (const auto &a : adapters_)
    for (const auto &ext : a->extensions())
      if (path.size() >= ext.size() && path.substr(path.size() - ext.size()) == ext) return a.get();
  return nullptr;
}

const AdapterRegistry &AdapterRegistry::instance() {
  static const AdapterRegistry registry;
  return registry;
}

SyntaxTree parse_source(std::string_view text, std::string_view language, const ParseOptions &options) {
  const LanguageAdapter *adapter = AdapterRegistry::instance().for_language(language);
  if (adapter == nullptr) throw ParseError(0, "no grammar registered for '" + std::string(language) + "'");
  SyntaxTree tree = adapter->parse(text);
  classify_tree(tree, options.blacklist);
  return tree;
}

std::string callee_path(const SyntaxTree &tree, NodeId invocation) {
  const SyntaxNode &call = tree.node(invocation);
  if (call.kind != Kind::MethodInvocation) return {};
  std::string receiver;
  std::string name;
  for (NodeId c : call.children) {
    const SyntaxNode &child = tree.node(c);
    if (child.role == Role::Name) name = child.label;
    if (child.role != Role::Receiver) continue;
    switch (child.kind) {
      case Kind::SimpleName:
        receiver = child.label;
        break;
      case Kind::ThisExpression:
        receiver = "this";
        break;
      case Kind::SuperExpression:
        receiver = "super";
        break;
      case Kind::FieldAccess: {
        // a.b.c: collect names down the receiver chain.
        std::vector<std::string> parts;
        NodeId cur = c;
        while (tree.node(cur).kind == Kind::FieldAccess) {
          const SyntaxNode &fa = tree.node(cur);
          NodeId next = kNoNode;
          for (NodeId g : fa.children) {
            if (tree.node(g).role == Role::Name) parts.push_back(tree.node(g).label);
            if (tree.node(g).role == Role::Receiver) next = g;
          }
          if (next == kNoNode) break;
          cur = next;
        }
        const SyntaxNode &base = tree.node(cur);
        if (base.kind == Kind::SimpleName) parts.push_back(base.label);
        if (base.kind == Kind::ThisExpression) parts.push_back("this");
        std::reverse(parts.begin(), parts.end());
        for (const auto &p : parts) receiver += (receiver.empty() ? "" : ".") + p;
        break;
      }
      case Kind::MethodInvocation:
        receiver = callee_path(tree, c) + "()";
        break;
      default:
        receiver = "?";
        break;
    }
  }
  return receiver.empty() ? name : receiver + "." + name;
}

NodeCategory classify_node(const SyntaxTree &tree, NodeId id, const Blacklist &blacklist) {
  const SyntaxNode &n = tree.node(id);
  if (n.kind == Kind::Modifier || n.kind == Kind::Annotation) return NodeCategory::Modifier;
  for (NodeId p = n.parent; p != kNoNode; p = tree.node(p).parent)
    if (tree.node(p).kind == Kind::Annotation) return NodeCategory::Modifier;
  if (n.kind == Kind::SimpleName) return NodeCategory::NameBearing;
  if (n.kind == Kind::ExpressionStatement && n.children.size() == 1) {
    NodeId expr = n.children.front();
    if (tree.node(expr).kind == Kind::MethodInvocation && blacklist.matches(callee_path(tree, expr)))
      return NodeCategory::LogStatement;
  }
  return NodeCategory::Other;
}

void classify_tree(SyntaxTree &tree, const Blacklist &blacklist) {
  for (NodeId id = 0; id < tree.size(); ++id) tree.mutable_node(id).category = classify_node(tree, id, blacklist);
}

namespace {

class FunctionCollector {
public:
  FunctionCollector(const SyntaxTree &tree, std::string_view file) : tree_(tree), file_(file) {}

  std::vector<FunctionUnit> run() {
    if (!tree_.empty()) visit(tree_.root(), "", -1);
    // Disambiguate duplicate names (invalid code, or identical lambdas).
    std::map<std::string, int> seen;
    for (auto &u : units_) {
      int n = seen[u.qualified_name]++;
      if (n > 0) u.qualified_name += "#" + std::to_string(n + 1);
    }
    return std::move(units_);
  }

private:
  std::string child_name(NodeId id) const {
    for (NodeId c : tree_.node(id).children)
      if (tree_.node(c).role == Role::Name && tree_.node(c).kind == Kind::SimpleName) return tree_.node(c).label;
    return {};
  }

  NodeId child_with_role(NodeId id, Role role) const {
    for (NodeId c : tree_.node(id).children)
      if (tree_.node(c).role == role) return c;
    return kNoNode;
  }

  std::string signature(NodeId method) const {
    std::string sig = "(";
    bool first = true;
    for (NodeId c : tree_.node(method).children) {
      if (tree_.node(c).kind != Kind::Parameter) continue;
      for (NodeId g : tree_.node(c).children) {
        if (tree_.node(g).kind != Kind::Type) continue;
        if (!first) sig += ",";
        sig += tree_.node(g).label;
        first = false;
      }
    }
    return sig + ")";
  }

  Span unit_span(NodeId decl) const {
    Span span = tree_.node(decl).span;
    // Attach directly preceding comments (doc comments) to the unit.
    const auto &comments = tree_.comments();
    const std::string &src = tree_.source();
    auto it = std::lower_bound(comments.begin(), comments.end(), span.begin,
                               [](const Comment &c, std::size_t pos) { return c.span.end <= pos; });
    while (it != comments.begin()) {
      auto prev = std::prev(it);
      if (prev->span.end > span.begin) break;
      bool only_space = std::all_of(src.begin() + static_cast<std::ptrdiff_t>(prev->span.end),
                                    src.begin() + static_cast<std::ptrdiff_t>(span.begin),
                                    [](unsigned char c) { return std::isspace(c) != 0; });
      if (!only_space) break;
      span.begin = prev->span.begin;
      it = prev;
    }
    return span;
  }

  int add_unit(NodeId decl, std::string qualified, std::string simple, NodeId body, int enclosing) {
    FunctionUnit u;
    u.qualified_name = std::move(qualified);
    u.simple_name = std::move(simple);
    u.file = std::string(file_);
    u.span = tree_.node(decl).kind == Kind::LambdaExpression ? tree_.node(decl).span : unit_span(decl);
    u.declaration = decl;
    u.body = body;
    u.enclosing = enclosing;
    units_.push_back(std::move(u));
    return static_cast<int>(units_.size()) - 1;
  }

  // `scope` is the container path; `current` the innermost enclosing unit.
  void visit(NodeId id, const std::string &scope, int current) {
    const SyntaxNode &n = tree_.node(id);
    switch (n.kind) {
      case Kind::TypeDeclaration: {
        std::string name = child_name(id);
        std::string inner = scope.empty() ? name : scope + "." + name;
        for (NodeId c : n.children) visit(c, inner, current);
        return;
      }
      case Kind::EnumConstant: {
        std::string inner = scope + "." + child_name(id);
        for (NodeId c : n.children) visit(c, inner, current);
        return;
      }
      case Kind::AnonymousClass: {
        if (tree_.node(n.parent).kind == Kind::EnumConstant) {
          for (NodeId c : n.children) visit(c, scope, current);
          return;
        }
        std::string base = current >= 0 ? units_[static_cast<std::size_t>(current)].qualified_name : scope;
        int index = anon_counter_[base]++;
        std::string inner = base + "$anon" + std::to_string(index);
        for (NodeId c : n.children) visit(c, inner, current);
        return;
      }
      case Kind::MethodDeclaration: {
        std::string name = child_name(id);
        std::string qualified = (scope.empty() ? "" : scope + ".") + name + signature(id);
        int unit = add_unit(id, std::move(qualified), name, child_with_role(id, Role::Body), current);
        for (NodeId c : n.children) visit(c, scope, unit);
        return;
      }
      case Kind::Initializer: {
        std::string base = (scope.empty() ? "" : scope + ".") + (n.label == "static" ? "<clinit>" : "<init>");
        int index = init_counter_[base]++;
        if (index > 0) base += std::to_string(index);
        int unit = add_unit(id, std::move(base), "", child_with_role(id, Role::Body), current);
        for (NodeId c : n.children) visit(c, scope, unit);
        return;
      }
      case Kind::LambdaExpression: {
        std::string base = current >= 0 ? units_[static_cast<std::size_t>(current)].qualified_name : scope;
        int index = lambda_counter_[base]++;
        int unit = add_unit(id, base + "$lambda" + std::to_string(index), "", child_with_role(id, Role::Body),
                            current);
        for (NodeId c : n.children) visit(c, scope, unit);
        return;
      }
      default:
        for (NodeId c : n.children) visit(c, scope, current);
        return;
    }
  }

  const SyntaxTree &tree_;
  std::string_view file_;
  std::vector<FunctionUnit> units_;
  std::map<std::string, int> anon_counter_;
  std::map<std::string, int> lambda_counter_;
  std::map<std::string, int> init_counter_;
};

}  // namespace

std::vector<FunctionUnit> extract_functions(const SyntaxTree &tree, std::string_view file) {
  return FunctionCollector(tree, file).run();
}

int enclosing_function(const SyntaxTree &tree, const std::vector<FunctionUnit> &functions, NodeId id) {
  int best = -1;
  for (std::size_t i = 0; i < functions.size(); ++i) {
    if (tree.is_descendant(id, functions[i].declaration)) best = static_cast<int>(i);
  }
  return best;
}

LineCounts comment_metrics(const SyntaxTree &tree, Span span) {
  LineCounts counts;
  if (span.end <= span.begin) return counts;
  std::size_t first = tree.line_of(span.begin);
  std::size_t last = tree.line_of(span.end - 1);
  counts.total_lines = last - first + 1;
  std::vector<bool> covered(counts.total_lines, false);
  for (const auto &c : tree.comments()) {
    if (!c.span.overlaps(span)) continue;
    std::size_t lo = std::max(first, tree.line_of(c.span.begin));
    std::size_t hi = std::min(last, tree.line_of(c.span.end - 1));
    for (std::size_t line = lo; line <= hi; ++line) covered[line - first] = true;
  }
  counts.comment_lines = static_cast<std::size_t>(std::count(covered.begin(), covered.end(), true));
  return counts;
}

}  // namespace cvalue::syntax
