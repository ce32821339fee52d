// Language-neutral syntax tree model and the grammar adapter registry.
//
// Trees are stored as a preorder arena: node 0 is the root and the subtree of
// node i occupies ids [i, i + subtree_size). Comments never appear as nodes;
// they are kept on the side for line metrics.

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cvalue::syntax {

using NodeId = std::int32_t;
inline constexpr NodeId kNoNode = -1;

struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;

  bool contains(const Span &other) const {
    return begin <= other.begin && other.end <= end;
  }
  bool overlaps(const Span &other) const {
    return begin < other.end && other.begin < end;
  }
  bool operator==(const Span &) const = default;
};

enum class Kind : std::uint8_t {
  CompilationUnit,
  PackageDeclaration,
  ImportDeclaration,
  QualifiedName,
  TypeDeclaration,
  EnumConstant,
  AnonymousClass,
  Initializer,
  FieldDeclaration,
  MethodDeclaration,
  TypeParameters,
  Throws,
  Parameter,
  VariableFragment,
  Modifier,
  Annotation,
  Type,
  SimpleName,
  // statements
  Block,
  LocalVariableStatement,
  LocalClassStatement,
  ExpressionStatement,
  IfStatement,
  ForStatement,
  EnhancedForStatement,
  WhileStatement,
  DoStatement,
  SwitchStatement,
  SwitchCase,
  BreakStatement,
  ContinueStatement,
  ReturnStatement,
  ThrowStatement,
  YieldStatement,
  TryStatement,
  CatchClause,
  SynchronizedStatement,
  LabeledStatement,
  AssertStatement,
  EmptyStatement,
  ConstructorCall,
  // expressions
  Assignment,
  InfixExpression,
  PrefixExpression,
  PostfixExpression,
  ConditionalExpression,
  InstanceofExpression,
  CastExpression,
  MethodInvocation,
  FieldAccess,
  ArrayAccess,
  ClassInstanceCreation,
  ArrayCreation,
  ArrayInitializer,
  LambdaExpression,
  MethodReference,
  ParenthesizedExpression,
  SwitchExpression,
  NumberLiteral,
  StringLiteral,
  CharacterLiteral,
  BooleanLiteral,
  NullLiteral,
  ThisExpression,
  SuperExpression,
  TypeLiteral,
};

std::string_view to_string(Kind kind);

/// Position of a node inside its parent, for constructs where the child
/// order alone is ambiguous (receiver vs. callee name, condition vs. body).
enum class Role : std::uint8_t {
  None,
  Name,
  Receiver,
  Argument,
  Condition,
  Then,
  Else,
  Body,
  Init,
  Update,
  Iterable,
  Resource,
  Finally,
  ReturnType,
  Target,
  Value,
};

enum class NodeCategory : std::uint8_t { NameBearing, Modifier, Comment, LogStatement, Other };

std::string_view to_string(NodeCategory category);

struct SyntaxNode {
  Kind kind = Kind::CompilationUnit;
  std::string label;
  Role role = Role::None;
  NodeId parent = kNoNode;
  std::vector<NodeId> children;
  Span span;
  // Height of the subtree: 1 for leaves, 1 + max(children) otherwise.
  int depth = 1;
  int subtree_size = 1;
  NodeCategory category = NodeCategory::Other;
};

struct Comment {
  Span span;
  bool block = false;
};

class SyntaxTree {
public:
  SyntaxTree() = default;
  SyntaxTree(std::vector<SyntaxNode> nodes, std::string source, std::vector<Comment> comments);

  const SyntaxNode &node(NodeId id) const { return nodes_[static_cast<std::size_t>(id)]; }
  SyntaxNode &mutable_node(NodeId id) { return nodes_[static_cast<std::size_t>(id)]; }
  NodeId root() const { return nodes_.empty() ? kNoNode : 0; }
  NodeId size() const { return static_cast<NodeId>(nodes_.size()); }
  bool empty() const { return nodes_.empty(); }

  const std::vector<SyntaxNode> &nodes() const { return nodes_; }
  const std::string &source() const { return source_; }
  const std::vector<Comment> &comments() const { return comments_; }

  bool is_descendant(NodeId id, NodeId ancestor) const {
    return id >= ancestor && id < ancestor + node(ancestor).subtree_size;
  }
  std::string_view text(Span span) const {
    return std::string_view(source_).substr(span.begin, span.end - span.begin);
  }
  /// 1-based line number of a byte offset.
  std::size_t line_of(std::size_t offset) const;

private:
  std::vector<SyntaxNode> nodes_;
  std::string source_;
  std::vector<Comment> comments_;
  std::vector<std::size_t> line_starts_;
};

/// Builder node used by grammar adapters before flattening into the arena.
struct TreeBuilderNode {
  Kind kind;
  std::string label;
  Span span;
  Role role = Role::None;
  std::vector<std::unique_ptr<TreeBuilderNode>> children;
};

/// Flattens a builder tree into preorder and fills depth, size and parent.
std::vector<SyntaxNode> flatten(const TreeBuilderNode &root);

class ParseError : public std::runtime_error {
public:
  ParseError(std::size_t position, const std::string &message);
  std::size_t position() const { return position_; }

private:
  std::size_t position_;
};

/// Callee patterns whose call statements are treated as logging noise.
struct Blacklist {
  std::vector<std::string> patterns{"log", "logger", "print", "println", "System.out", "System.err"};
  bool matches(std::string_view dotted_callee) const;
};

struct ParseOptions {
  Blacklist blacklist;
};

class LanguageAdapter {
public:
  virtual ~LanguageAdapter() = default;
  virtual std::string_view id() const = 0;
  virtual std::vector<std::string> extensions() const = 0;
  virtual SyntaxTree parse(std::string_view text) const = 0;
};

/// Adapters keyed by file extension. The Java-like adapter is always present.
class AdapterRegistry {
public:
  AdapterRegistry();
  void add(std::shared_ptr<const LanguageAdapter> adapter);
  const LanguageAdapter *for_language(std::string_view language) const;
  const LanguageAdapter *for_path(std::string_view path) const;

  static const AdapterRegistry &instance();

private:
  std::vector<std::shared_ptr<const LanguageAdapter>> adapters_;
};

std::shared_ptr<const LanguageAdapter> make_java_adapter();

/// Parses text with the grammar registered for `language` ("java") and
/// classifies every node against the blacklist. Throws ParseError.
SyntaxTree parse_source(std::string_view text, std::string_view language,
                        const ParseOptions &options = {});

struct FunctionUnit {
  std::string qualified_name;
  std::string simple_name;
  std::string file;
  Span span;
  NodeId declaration = kNoNode;
  // The body block or lambda body expression; kNoNode for abstract methods.
  NodeId body = kNoNode;
  // Innermost enclosing function unit index, or -1.
  int enclosing = -1;
};

/// One unit per method, constructor, initializer and lambda. Lambdas are
/// named "<enclosing>$lambdaN" in source order within their enclosing unit.
std::vector<FunctionUnit> extract_functions(const SyntaxTree &tree, std::string_view file = {});

/// Index of the innermost unit whose declaration subtree contains `id`, or -1.
int enclosing_function(const SyntaxTree &tree, const std::vector<FunctionUnit> &functions, NodeId id);

NodeCategory classify_node(const SyntaxTree &tree, NodeId id, const Blacklist &blacklist);

/// Recomputes every node's category in place.
void classify_tree(SyntaxTree &tree, const Blacklist &blacklist);

/// Dotted text of a call's callee ("System.out.println"), empty for non-calls.
std::string callee_path(const SyntaxTree &tree, NodeId invocation);

struct LineCounts {
  std::size_t comment_lines = 0;
  std::size_t total_lines = 0;
  bool operator==(const LineCounts &) const = default;
};

LineCounts comment_metrics(const SyntaxTree &tree, Span span);

}  // namespace cvalue::syntax
