// Per-function understandability metrics: LOC, cyclomatic complexity,
// Halstead volume and comment fraction.
//
// CC and HV are computed over the unit's body and skip nested units
// (lambdas, anonymous and local classes), which are measured on their own.
//
// Halstead classification, by node:
//
//   operators
//     Assignment, InfixExpression, PrefixExpression   the operator text (=, +=, &&, !, ...)
//     PostfixExpression                              the operator text with a "post" prefix (post++)
//     ConditionalExpression                          ?:
//     InstanceofExpression                           instanceof
//     CastExpression                                 (cast)
//     MethodInvocation, ConstructorCall              ()  plus "." when a receiver is present
//     FieldAccess                                    .
//     ArrayAccess                                    []
//     ParenthesizedExpression                        (group)
//     ClassInstanceCreation, ArrayCreation           new
//     ArrayInitializer                               {}
//     MethodReference                                ::
//     VariableFragment with an initializer           =
//     Type naming a primitive (int, void, ...)       the keyword
//     Modifier                                       the keyword (final, ...)
//     statements                                     their keyword: if (+ else), for, while, do,
//                                                    switch, case, default, break, continue,
//                                                    return, throw, yield, try (+ finally),
//                                                    catch, synchronized, assert; a label adds ":"
//   operands
//     SimpleName, literals, TypeLiteral              the token text
//     Type naming a class or interface               the type text
//     ThisExpression, SuperExpression                this / super
//     MethodReference                                the referenced name
//     break/continue/labeled statement labels        the label
//
// Statement terminators, braces and commas are not counted.

#pragma once

#include <cstddef>
#include <map>
#include <string>

#include "cvalue/syntax.hpp"

namespace cvalue::complexity {

struct ComplexityRaw {
  std::size_t loc = 0;
  std::size_t cc = 1;
  double hv = 0.0;
  double pcom = 0.0;
};

struct HalsteadCounts {
  std::map<std::string, std::size_t> operators;
  std::map<std::string, std::size_t> operands;

  std::size_t total() const;
  std::size_t distinct() const { return operators.size() + operands.size(); }
  double volume() const;
};

std::size_t loc(const syntax::SyntaxTree &tree, const syntax::FunctionUnit &function);
std::size_t cyclomatic(const syntax::SyntaxTree &tree, const syntax::FunctionUnit &function);
HalsteadCounts halstead_counts(const syntax::SyntaxTree &tree, const syntax::FunctionUnit &function);
double halstead_volume(const syntax::SyntaxTree &tree, const syntax::FunctionUnit &function);
double comment_percentage(const syntax::SyntaxTree &tree, const syntax::FunctionUnit &function);

ComplexityRaw measure(const syntax::SyntaxTree &tree, const syntax::FunctionUnit &function);

}  // namespace cvalue::complexity
