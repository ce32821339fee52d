#include "cvalue/complexity.hpp"

#include <cmath>
#include <functional>

#include "java_lexer.hpp"

namespace cvalue::complexity {

using syntax::Kind;
using syntax::NodeId;
using syntax::Role;
using syntax::SyntaxTree;

namespace {

bool nested_unit(Kind kind) {
  return kind == Kind::LambdaExpression || kind == Kind::AnonymousClass || kind == Kind::LocalClassStatement;
}

// Visits the body of `function` in preorder, not entering nested units.
void walk_body(const SyntaxTree &tree, const syntax::FunctionUnit &function,
               const std::function<void(NodeId)> &visit) {
  if (function.body == syntax::kNoNode) return;
  std::function<void(NodeId)> rec = [&](NodeId id) {
    visit(id);
    for (NodeId c : tree.node(id).children) {
      if (nested_unit(tree.node(c).kind)) continue;
      rec(c);
    }
  };
  rec(function.body);
}

bool has_role(const SyntaxTree &tree, NodeId id, Role role) {
  for (NodeId c : tree.node(id).children)
    if (tree.node(c).role == role) return true;
  return false;
}

}  // namespace

std::size_t HalsteadCounts::total() const {
  std::size_t n = 0;
  for (const auto &[k, v] : operators) n += v;
  for (const auto &[k, v] : operands) n += v;
  return n;
}

double HalsteadCounts::volume() const {
  std::size_t eta = distinct();
  if (eta <= 1) return 0.0;
  return static_cast<double>(total()) * std::log2(static_cast<double>(eta));
}

std::size_t loc(const SyntaxTree &tree, const syntax::FunctionUnit &function) {
  return syntax::comment_metrics(tree, function.span).total_lines;
}

std::size_t cyclomatic(const SyntaxTree &tree, const syntax::FunctionUnit &function) {
  std::size_t cc = 1;
  walk_body(tree, function, [&](NodeId id) {
    const auto &n = tree.node(id);
    switch (n.kind) {
      case Kind::IfStatement:
      case Kind::ForStatement:
      case Kind::EnhancedForStatement:
      case Kind::WhileStatement:
      case Kind::DoStatement:
      case Kind::CatchClause:
      case Kind::ConditionalExpression:
        ++cc;
        break;
      case Kind::SwitchCase:
        // one decision per case value; default is not a decision
        if (n.label == "case") cc += std::max<std::size_t>(1, n.children.size());
        break;
      case Kind::InfixExpression:
        if (n.label == "&&" || n.label == "||") ++cc;
        break;
      default:
        break;
    }
  });
  return cc;
}

HalsteadCounts halstead_counts(const SyntaxTree &tree, const syntax::FunctionUnit &function) {
  HalsteadCounts counts;
  auto op = [&](const std::string &s) { ++counts.operators[s]; };
  auto operand = [&](const std::string &s) { ++counts.operands[s]; };
  walk_body(tree, function, [&](NodeId id) {
    const auto &n = tree.node(id);
    switch (n.kind) {
      case Kind::Assignment:
      case Kind::InfixExpression:
      case Kind::PrefixExpression:
        op(n.label);
        break;
      case Kind::PostfixExpression:
        op("post" + n.label);
        break;
      case Kind::ConditionalExpression:
        op("?:");
        break;
      case Kind::InstanceofExpression:
        op("instanceof");
        break;
      case Kind::CastExpression:
        op("(cast)");
        break;
      case Kind::MethodInvocation:
        op("()");
        if (has_role(tree, id, Role::Receiver)) op(".");
        break;
      case Kind::ConstructorCall:
        op("()");
        operand(n.label);
        break;
      case Kind::FieldAccess:
        op(".");
        break;
      case Kind::ArrayAccess:
        op("[]");
        break;
      case Kind::ParenthesizedExpression:
        op("(group)");
        break;
      case Kind::ClassInstanceCreation:
      case Kind::ArrayCreation:
        op("new");
        break;
      case Kind::ArrayInitializer:
        op("{}");
        break;
      case Kind::MethodReference:
        op("::");
        operand(n.label);
        break;
      case Kind::VariableFragment:
        if (n.children.size() > 1) op("=");
        break;
      case Kind::Type:
        if (syntax::java::is_primitive_type(n.label)) {
          op(n.label);
        } else {
          operand(n.label);
        }
        break;
      case Kind::Modifier:
        op(n.label);
        break;
      case Kind::SimpleName:
      case Kind::NumberLiteral:
      case Kind::StringLiteral:
      case Kind::CharacterLiteral:
      case Kind::BooleanLiteral:
      case Kind::NullLiteral:
      case Kind::TypeLiteral:
        operand(n.label);
        break;
      case Kind::ThisExpression:
        operand("this");
        break;
      case Kind::SuperExpression:
        operand("super");
        break;
      case Kind::IfStatement:
        op("if");
        if (has_role(tree, id, Role::Else)) op("else");
        break;
      case Kind::ForStatement:
      case Kind::EnhancedForStatement:
        op("for");
        break;
      case Kind::WhileStatement:
        op("while");
        break;
      case Kind::DoStatement:
        op("do");
        break;
      case Kind::SwitchStatement:
      case Kind::SwitchExpression:
        op("switch");
        break;
      case Kind::SwitchCase:
        op(n.label);
        break;
      case Kind::BreakStatement:
      case Kind::ContinueStatement:
        op(n.kind == Kind::BreakStatement ? "break" : "continue");
        if (!n.label.empty()) operand(n.label);
        break;
      case Kind::ReturnStatement:
        op("return");
        break;
      case Kind::ThrowStatement:
        op("throw");
        break;
      case Kind::YieldStatement:
        op("yield");
        break;
      case Kind::TryStatement:
        op("try");
        if (has_role(tree, id, Role::Finally)) op("finally");
        break;
      case Kind::CatchClause:
        op("catch");
        break;
      case Kind::SynchronizedStatement:
        op("synchronized");
        break;
      case Kind::AssertStatement:
        op("assert");
        break;
      case Kind::LabeledStatement:
        op(":");
        operand(n.label);
        break;
      default:
        break;
    }
  });
  return counts;
}

double halstead_volume(const SyntaxTree &tree, const syntax::FunctionUnit &function) {
  return halstead_counts(tree, function).volume();
}

double comment_percentage(const SyntaxTree &tree, const syntax::FunctionUnit &function) {
  auto counts = syntax::comment_metrics(tree, function.span);
  if (counts.total_lines == 0) return 0.0;
  return static_cast<double>(counts.comment_lines) / static_cast<double>(counts.total_lines);
}

ComplexityRaw measure(const SyntaxTree &tree, const syntax::FunctionUnit &function) {
  ComplexityRaw raw;
  auto lines = syntax::comment_metrics(tree, function.span);
  raw.loc = lines.total_lines;
  raw.pcom = lines.total_lines == 0 ? 0.0
                                    : static_cast<double>(lines.comment_lines) /
                                          static_cast<double>(lines.total_lines);
  raw.cc = cyclomatic(tree, function);
  raw.hv = halstead_volume(tree, function);
  return raw;
}

}  // namespace cvalue::complexity
