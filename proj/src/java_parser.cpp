// Recursive-descent parser for a Java-like grammar.
//
// Produces a GumTree-style abstract tree: punctuation is dropped, operators
// and identifiers become node labels, types are single leaves labelled with
// their normalized text. Coverage targets everyday Java 8-17 source; exotic
// forms (type-annotation placement, record patterns) are rejected with a
// ParseError so the caller can skip the file.

#include <algorithm>
#include <cctype>
#include <string>
#include <unordered_map>

#include "cvalue/syntax.hpp"
#include "java_lexer.hpp"

namespace cvalue::syntax {
namespace {

using java::Token;
using java::TokenKind;
using Ptr = std::unique_ptr<TreeBuilderNode>;

bool is_modifier_keyword(std::string_view w) {
  return w == "public" || w == "protected" || w == "private" || w == "static" || w == "final" ||
         w == "abstract" || w == "native" || w == "synchronized" || w == "transient" ||
         w == "volatile" || w == "strictfp";
}

const std::unordered_map<std::string_view, int> &binary_precedence() {
  static const std::unordered_map<std::string_view, int> table = {
      {"||", 1}, {"&&", 2}, {"|", 3},  {"^", 4},  {"&", 5},   {"==", 6},  {"!=", 6},
      {"<", 7},  {">", 7},  {"<=", 7}, {">=", 7}, {"instanceof", 7},      {"<<", 8},
      {">>", 8}, {">>>", 8}, {"+", 9}, {"-", 9},  {"*", 10},  {"/", 10},  {"%", 10}};
  return table;
}

bool is_assignment_op(std::string_view op) {
  return op == "=" || op == "+=" || op == "-=" || op == "*=" || op == "/=" || op == "%=" ||
         op == "&=" || op == "|=" || op == "^=" || op == "<<=" || op == ">>=" || op == ">>>=";
}

class Parser {
public:
  explicit Parser(std::string_view source) : source_(source) {
    auto lexed = java::lex(source);
    tokens_ = std::move(lexed.tokens);
    comments_ = std::move(lexed.comments);
  }

  SyntaxTree parse() {
    auto root = node(Kind::CompilationUnit, "", 0);
    root->span = Span{0, source_.size()};
    parse_compilation_unit(*root);
    auto nodes = flatten(*root);
    return SyntaxTree(std::move(nodes), std::string(source_), std::move(comments_));
  }

private:
  // ---- token helpers -----------------------------------------------------

  const Token &peek(std::size_t ahead = 0) const {
    std::size_t i = pos_ + ahead;
    return i < tokens_.size() ? tokens_[i] : tokens_.back();
  }
  const Token &at(std::size_t i) const { return i < tokens_.size() ? tokens_[i] : tokens_.back(); }
  bool check(std::string_view op, std::size_t ahead = 0) const { return peek(ahead).is(op); }
  bool check_ident(std::size_t ahead = 0) const { return peek(ahead).kind == TokenKind::Identifier; }
  bool check_ident_text(std::string_view text, std::size_t ahead = 0) const {
    return check_ident(ahead) && peek(ahead).text == text;
  }
  bool at_end() const { return peek().kind == TokenKind::End; }

  const Token &advance() {
    const Token &t = tokens_[pos_];
    if (pos_ + 1 < tokens_.size()) ++pos_;
    last_end_ = t.end;
    return t;
  }
  bool accept(std::string_view op) {
    if (!check(op)) return false;
    advance();
    return true;
  }
  const Token &expect(std::string_view op) {
    if (!check(op)) fail("expected '" + std::string(op) + "'");
    return advance();
  }
  const Token &expect_ident() {
    if (!check_ident()) fail("expected identifier");
    return advance();
  }
  [[noreturn]] void fail(const std::string &what) const {
    std::string got = at_end() ? "end of input" : "'" + std::string(peek().text) + "'";
    throw ParseError(peek().begin, what + ", got " + got);
  }

  // Adjacent '>' tokens form shift operators.
  bool adjacent(std::size_t a, std::size_t b) const { return at(a).end == at(b).begin; }

  // ---- node helpers ------------------------------------------------------

  Ptr node(Kind kind, std::string label, std::size_t begin) {
    auto n = std::make_unique<TreeBuilderNode>();
    n->kind = kind;
    n->label = std::move(label);
    n->span = Span{begin, begin};
    return n;
  }
  Ptr leaf(Kind kind, const Token &t) {
    auto n = node(kind, std::string(t.text), t.begin);
    n->span.end = t.end;
    return n;
  }
  Ptr finish(Ptr n) {
    n->span.end = std::max(last_end_, n->span.begin);
    return n;
  }
  static void add(TreeBuilderNode &parent, Ptr child, Role role = Role::None) {
    if (!child) return;
    child->role = role;
    parent.children.push_back(std::move(child));
  }

  // ---- compilation unit and declarations ---------------------------------

  void parse_compilation_unit(TreeBuilderNode &cu) {
    // Leading annotations may belong to the package declaration.
    std::size_t save = pos_;
    std::vector<Ptr> mods = parse_modifiers(false);
    if (check("package")) {
      auto pkg = node(Kind::PackageDeclaration, "", peek().begin);
      advance();
      for (auto &m : mods) add(*pkg, std::move(m));
      add(*pkg, parse_qualified_name(false), Role::Name);
      expect(";");
      add(cu, finish(std::move(pkg)));
    } else {
      pos_ = save;
    }
    while (check("import")) {
      auto imp = node(Kind::ImportDeclaration, "", peek().begin);
      advance();
      if (check("static")) {
        advance();
        imp->label = "static";
      }
      add(*imp, parse_qualified_name(true), Role::Name);
      expect(";");
      add(cu, finish(std::move(imp)));
    }
    while (!at_end()) {
      if (accept(";")) continue;
      std::size_t begin = peek().begin;
      auto m = parse_modifiers(true);
      add(cu, parse_type_declaration(std::move(m), begin));
    }
  }

  Ptr parse_qualified_name(bool allow_star) {
    std::size_t begin = peek().begin;
    std::string text(expect_ident().text);
    while (check(".")) {
      advance();
      if (allow_star && check("*")) {
        advance();
        text += ".*";
        break;
      }
      text += ".";
      text += expect_ident().text;
    }
    auto n = node(Kind::QualifiedName, std::move(text), begin);
    return finish(std::move(n));
  }

  std::vector<Ptr> parse_modifiers(bool member_context) {
    std::vector<Ptr> out;
    for (;;) {
      const Token &t = peek();
      if (t.is("@") && !check("interface", 1)) {
        out.push_back(parse_annotation());
      } else if (t.kind == TokenKind::Keyword && is_modifier_keyword(t.text)) {
        // "synchronized (" starts a statement, not a modifier.
        if (t.text == "synchronized" && check("(", 1)) break;
        out.push_back(leaf(Kind::Modifier, advance()));
      } else if (member_context && t.is("default") && !check(":", 1) && !check("->", 1)) {
        out.push_back(leaf(Kind::Modifier, advance()));
      } else if (member_context && t.kind == TokenKind::Identifier &&
                 (t.text == "sealed") && (check_ident(1) || peek(1).kind == TokenKind::Keyword)) {
        out.push_back(leaf(Kind::Modifier, advance()));
      } else if (member_context && t.kind == TokenKind::Identifier && t.text == "non" &&
                 check("-", 1) && check_ident_text("sealed", 2)) {
        std::size_t begin = t.begin;
        advance();
        advance();
        advance();
        auto n = node(Kind::Modifier, "non-sealed", begin);
        out.push_back(finish(std::move(n)));
      } else {
        break;
      }
    }
    return out;
  }

  Ptr parse_annotation() {
    auto ann = node(Kind::Annotation, "", peek().begin);
    expect("@");
    add(*ann, parse_qualified_name(false), Role::Name);
    if (accept("(")) {
      if (!check(")")) {
        if (check_ident() && check("=", 1)) {
          do {
            auto pair = node(Kind::Assignment, "=", peek().begin);
            add(*pair, leaf(Kind::SimpleName, advance()), Role::Target);
            expect("=");
            add(*pair, parse_element_value(), Role::Value);
            add(*ann, finish(std::move(pair)), Role::Argument);
          } while (accept(","));
        } else {
          add(*ann, parse_element_value(), Role::Argument);
        }
      }
      expect(")");
    }
    return finish(std::move(ann));
  }

  Ptr parse_element_value() {
    if (check("@")) return parse_annotation();
    if (check("{")) return parse_array_initializer();
    return parse_conditional();
  }

  bool at_type_declaration_start() const {
    return check("class") || check("interface") || check("enum") ||
           (check("@") && check("interface", 1)) ||
           (check_ident_text("record") && check_ident(1) && (check("(", 2) || check("<", 2)));
  }

  Ptr parse_type_declaration(std::vector<Ptr> mods, std::size_t begin) {
    std::string label;
    if (check("@")) {
      advance();
      expect("interface");
      label = "@interface";
    } else if (check("class") || check("interface") || check("enum")) {
      label = std::string(advance().text);
    } else if (check_ident_text("record")) {
      advance();
      label = "record";
    } else {
      fail("expected type declaration");
    }
    auto decl = node(Kind::TypeDeclaration, label, begin);
    for (auto &m : mods) add(*decl, std::move(m));
    const Token &name = expect_ident();
    std::string class_name(name.text);
    add(*decl, leaf(Kind::SimpleName, name), Role::Name);
    if (check("<")) add(*decl, parse_type_parameters());
    if (label == "record") {
      expect("(");
      if (!check(")")) {
        do {
          add(*decl, parse_parameter());
        } while (accept(","));
      }
      expect(")");
    }
    for (;;) {
      if (accept("extends") || accept("implements")) {
        do {
          add(*decl, parse_type_leaf(true), Role::Target);
        } while (accept(","));
      } else if (check_ident_text("permits")) {
        advance();
        do {
          add(*decl, parse_type_leaf(true), Role::Target);
        } while (accept(","));
      } else {
        break;
      }
    }
    if (label == "enum") {
      parse_enum_body(*decl, class_name);
    } else {
      parse_class_body(*decl, class_name);
    }
    return finish(std::move(decl));
  }

  Ptr parse_type_parameters() {
    std::size_t begin = peek().begin;
    std::size_t start = pos_;
    if (!skip_type_arguments(pos_)) fail("malformed type parameters");
    std::string text = join_tokens(start, pos_);
    last_end_ = at(pos_ - 1).end;
    auto n = node(Kind::TypeParameters, std::move(text), begin);
    return finish(std::move(n));
  }

  void parse_enum_body(TreeBuilderNode &decl, const std::string &class_name) {
    expect("{");
    while (!check(";") && !check("}")) {
      std::size_t begin = peek().begin;
      auto mods = parse_modifiers(false);
      auto constant = node(Kind::EnumConstant, "", begin);
      for (auto &m : mods) add(*constant, std::move(m));
      add(*constant, leaf(Kind::SimpleName, expect_ident()), Role::Name);
      if (check("(")) parse_arguments(*constant);
      if (check("{")) {
        auto body = node(Kind::AnonymousClass, "", peek().begin);
        parse_class_body(*body, class_name);
        add(*constant, finish(std::move(body)), Role::Body);
      }
      add(decl, finish(std::move(constant)));
      if (!accept(",")) break;
    }
    if (accept(";")) {
      while (!check("}")) {
        if (at_end()) fail("unterminated enum body");
        parse_member(decl, class_name);
      }
    }
    expect("}");
  }

  void parse_class_body(TreeBuilderNode &decl, const std::string &class_name) {
    expect("{");
    while (!check("}")) {
      if (at_end()) fail("unterminated class body");
      parse_member(decl, class_name);
    }
    expect("}");
  }

  void parse_member(TreeBuilderNode &decl, const std::string &class_name) {
    if (accept(";")) return;
    std::size_t begin = peek().begin;
    auto mods = parse_modifiers(true);
    if (check("{")) {
      bool is_static = false;
      for (auto &m : mods) is_static = is_static || m->label == "static";
      auto init = node(Kind::Initializer, is_static ? "static" : "", begin);
      for (auto &m : mods) add(*init, std::move(m));
      add(*init, parse_block(), Role::Body);
      add(decl, finish(std::move(init)));
      return;
    }
    if (at_type_declaration_start()) {
      add(decl, parse_type_declaration(std::move(mods), begin));
      return;
    }
    Ptr type_params;
    if (check("<")) type_params = parse_type_parameters();
    // Constructor (or compact record constructor).
    if (check_ident() && peek().text == class_name && (check("(", 1) || check("{", 1))) {
      auto method = node(Kind::MethodDeclaration, "", begin);
      for (auto &m : mods) add(*method, std::move(m));
      add(*method, std::move(type_params));
      add(*method, leaf(Kind::SimpleName, advance()), Role::Name);
      if (check("(")) parse_parameter_list(*method);
      parse_method_rest(*method);
      add(decl, finish(std::move(method)));
      return;
    }
    auto type = parse_type_leaf(true);
    if (check_ident() && check("(", 1)) {
      auto method = node(Kind::MethodDeclaration, "", begin);
      for (auto &m : mods) add(*method, std::move(m));
      add(*method, std::move(type_params));
      add(*method, std::move(type), Role::ReturnType);
      add(*method, leaf(Kind::SimpleName, advance()), Role::Name);
      parse_parameter_list(*method);
      while (check("[") && check("]", 1)) {
        advance();
        advance();
      }
      parse_method_rest(*method);
      add(decl, finish(std::move(method)));
      return;
    }
    auto field = node(Kind::FieldDeclaration, "", begin);
    for (auto &m : mods) add(*field, std::move(m));
    add(*field, std::move(type));
    do {
      add(*field, parse_variable_fragment());
    } while (accept(","));
    expect(";");
    add(decl, finish(std::move(field)));
  }

  void parse_parameter_list(TreeBuilderNode &method) {
    expect("(");
    if (!check(")")) {
      do {
        add(method, parse_parameter());
      } while (accept(","));
    }
    expect(")");
  }

  void parse_method_rest(TreeBuilderNode &method) {
    if (check("throws")) {
      auto throws = node(Kind::Throws, "", peek().begin);
      advance();
      do {
        add(*throws, parse_type_leaf(false));
      } while (accept(","));
      add(method, finish(std::move(throws)));
    }
    if (check("default")) {
      advance();
      add(method, parse_element_value(), Role::Value);
      expect(";");
    } else if (check("{")) {
      add(method, parse_block(), Role::Body);
    } else {
      expect(";");
    }
  }

  Ptr parse_parameter() {
    std::size_t begin = peek().begin;
    auto mods = parse_modifiers(false);
    auto param = node(Kind::Parameter, "", begin);
    for (auto &m : mods) add(*param, std::move(m));
    auto type = parse_type_leaf(true);
    if (check("...")) {
      advance();
      type->label += "...";
      type->span.end = last_end_;
      param->label = "...";
    }
    add(*param, std::move(type));
    if (check("this")) {
      add(*param, leaf(Kind::ThisExpression, advance()), Role::Name);
    } else {
      add(*param, leaf(Kind::SimpleName, expect_ident()), Role::Name);
    }
    while (check("[") && check("]", 1)) {
      advance();
      advance();
    }
    return finish(std::move(param));
  }

  Ptr parse_variable_fragment() {
    auto frag = node(Kind::VariableFragment, "", peek().begin);
    add(*frag, leaf(Kind::SimpleName, expect_ident()), Role::Name);
    while (check("[") && check("]", 1)) {
      advance();
      advance();
      frag->label += "[]";
    }
    if (accept("=")) {
      add(*frag, check("{") ? parse_array_initializer() : parse_expression(), Role::Value);
    }
    return finish(std::move(frag));
  }

  // ---- types ---------------------------------------------------------------

  std::string join_tokens(std::size_t from, std::size_t to) const {
    std::string text;
    for (std::size_t i = from; i < to; ++i) {
      const Token &t = at(i);
      if (t.is("extends") || t.is("super") || t.is("&")) {
        text += " ";
        text += t.text;
        text += " ";
      } else {
        text += t.text;
      }
    }
    return text;
  }

  // Skips "<...>" starting at `i`; returns false when it is not balanced
  // type-argument syntax.
  bool skip_type_arguments(std::size_t &i) const {
    if (!at(i).is("<")) return false;
    int depth = 0;
    std::size_t j = i;
    while (true) {
      const Token &t = at(j);
      if (t.kind == TokenKind::End) return false;
      if (t.is("<")) {
        ++depth;
      } else if (t.is(">")) {
        --depth;
        if (depth == 0) {
          i = j + 1;
          return true;
        }
      } else if (t.kind == TokenKind::Identifier || t.is(",") || t.is(".") || t.is("?") ||
                 t.is("extends") || t.is("super") || t.is("[") || t.is("]") || t.is("&") ||
                 t.is("@") || (t.kind == TokenKind::Keyword && java::is_primitive_type(t.text))) {
        // allowed inside type arguments
      } else {
        return false;
      }
      ++j;
    }
  }

  // Scans a type at token index `i` without building nodes.
  bool scan_type(std::size_t &i, bool allow_dims) const {
    std::size_t j = i;
    while (at(j).is("@") && at(j + 1).kind == TokenKind::Identifier) j += 2;
    const Token &t = at(j);
    if (t.kind == TokenKind::Keyword && java::is_primitive_type(t.text)) {
      ++j;
    } else if (t.kind == TokenKind::Identifier) {
      ++j;
      if (at(j).is("<") && !skip_type_arguments(j)) return false;
      while (at(j).is(".") && at(j + 1).kind == TokenKind::Identifier) {
        j += 2;
        if (at(j).is("<") && !skip_type_arguments(j)) return false;
      }
    } else {
      return false;
    }
    if (allow_dims) {
      while (at(j).is("[") && at(j + 1).is("]")) j += 2;
    }
    i = j;
    return true;
  }

  Ptr parse_type_leaf(bool allow_dims) {
    std::size_t start = pos_;
    while (check("@") && check_ident(1) && !check("(", 2)) {
      advance();
      advance();
      start = pos_;
    }
    std::size_t end = pos_;
    if (!scan_type(end, allow_dims)) fail("expected type");
    std::size_t begin = peek().begin;
    std::string text = join_tokens(start, end);
    while (pos_ < end) advance();
    // Union types in catch clauses.
    auto n = node(Kind::Type, std::move(text), begin);
    return finish(std::move(n));
  }

  // ---- statements ----------------------------------------------------------

  Ptr parse_block() {
    auto block = node(Kind::Block, "", peek().begin);
    expect("{");
    while (!check("}")) {
      if (at_end()) fail("unterminated block");
      add(*block, parse_block_statement());
    }
    expect("}");
    return finish(std::move(block));
  }

  bool looks_like_local_variable() const {
    std::size_t i = pos_;
    if (!scan_type(i, true)) return false;
    if (at(i).kind != TokenKind::Identifier) return false;
    const Token &after = at(i + 1);
    return after.is("=") || after.is(";") || after.is(",") || after.is("[") || after.is(":");
  }

  Ptr parse_block_statement() {
    std::size_t begin = peek().begin;
    if (at_type_declaration_start() ||
        ((check("abstract") || check("final") || check("static")) &&
         (check("class", 1) || check("interface", 1) || check("enum", 1)))) {
      auto mods = parse_modifiers(false);
      auto stmt = node(Kind::LocalClassStatement, "", begin);
      add(*stmt, parse_type_declaration(std::move(mods), begin));
      return finish(std::move(stmt));
    }
    if (check("final") || (check("@") && !check("interface", 1))) {
      auto mods = parse_modifiers(false);
      if (at_type_declaration_start()) {
        auto stmt = node(Kind::LocalClassStatement, "", begin);
        add(*stmt, parse_type_declaration(std::move(mods), begin));
        return finish(std::move(stmt));
      }
      auto stmt = parse_local_variable(std::move(mods), begin);
      expect(";");
      return finish(std::move(stmt));
    }
    if (looks_like_local_variable()) {
      auto stmt = parse_local_variable({}, begin);
      expect(";");
      return finish(std::move(stmt));
    }
    return parse_statement();
  }

  Ptr parse_local_variable(std::vector<Ptr> mods, std::size_t begin) {
    auto stmt = node(Kind::LocalVariableStatement, "", begin);
    for (auto &m : mods) add(*stmt, std::move(m));
    add(*stmt, parse_type_leaf(true));
    do {
      add(*stmt, parse_variable_fragment());
    } while (accept(","));
    return finish(std::move(stmt));
  }

  Ptr parse_paren_condition() {
    expect("(");
    auto cond = parse_expression();
    expect(")");
    return cond;
  }

  Ptr parse_statement() {
    const Token &t = peek();
    std::size_t begin = t.begin;
    if (t.is("{")) return parse_block();
    if (t.is(";")) {
      auto n = leaf(Kind::EmptyStatement, advance());
      n->label.clear();
      return n;
    }
    if (t.is("if")) {
      advance();
      auto n = node(Kind::IfStatement, "", begin);
      add(*n, parse_paren_condition(), Role::Condition);
      add(*n, parse_statement(), Role::Then);
      if (accept("else")) add(*n, parse_statement(), Role::Else);
      return finish(std::move(n));
    }
    if (t.is("for")) return parse_for();
    if (t.is("while")) {
      advance();
      auto n = node(Kind::WhileStatement, "", begin);
      add(*n, parse_paren_condition(), Role::Condition);
      add(*n, parse_statement(), Role::Body);
      return finish(std::move(n));
    }
    if (t.is("do")) {
      advance();
      auto n = node(Kind::DoStatement, "", begin);
      add(*n, parse_statement(), Role::Body);
      expect("while");
      add(*n, parse_paren_condition(), Role::Condition);
      expect(";");
      return finish(std::move(n));
    }
    if (t.is("switch")) {
      auto n = parse_switch(Kind::SwitchStatement);
      accept(";");
      return n;
    }
    if (t.is("try")) return parse_try();
    if (t.is("return") || t.is("throw")) {
      bool is_return = t.is("return");
      advance();
      auto n = node(is_return ? Kind::ReturnStatement : Kind::ThrowStatement, "", begin);
      if (!check(";")) add(*n, parse_expression(), Role::Value);
      expect(";");
      return finish(std::move(n));
    }
    if (t.is("break") || t.is("continue")) {
      bool is_break = t.is("break");
      advance();
      auto n = node(is_break ? Kind::BreakStatement : Kind::ContinueStatement, "", begin);
      if (check_ident()) n->label = std::string(advance().text);
      expect(";");
      return finish(std::move(n));
    }
    if (t.is("synchronized")) {
      advance();
      auto n = node(Kind::SynchronizedStatement, "", begin);
      add(*n, parse_paren_condition(), Role::Condition);
      add(*n, parse_block(), Role::Body);
      return finish(std::move(n));
    }
    if (t.is("assert")) {
      advance();
      auto n = node(Kind::AssertStatement, "", begin);
      add(*n, parse_expression(), Role::Condition);
      if (accept(":")) add(*n, parse_expression(), Role::Value);
      expect(";");
      return finish(std::move(n));
    }
    if (t.kind == TokenKind::Identifier && t.text == "yield" && starts_expression(1)) {
      advance();
      auto n = node(Kind::YieldStatement, "", begin);
      add(*n, parse_expression(), Role::Value);
      expect(";");
      return finish(std::move(n));
    }
    if (t.kind == TokenKind::Identifier && check(":", 1)) {
      auto n = node(Kind::LabeledStatement, std::string(advance().text), begin);
      advance();
      add(*n, parse_statement(), Role::Body);
      return finish(std::move(n));
    }
    if ((t.is("this") || t.is("super")) && check("(", 1)) {
      auto n = node(Kind::ConstructorCall, std::string(advance().text), begin);
      parse_arguments(*n);
      expect(";");
      return finish(std::move(n));
    }
    auto n = node(Kind::ExpressionStatement, "", begin);
    add(*n, parse_expression());
    expect(";");
    return finish(std::move(n));
  }

  bool starts_expression(std::size_t ahead) const {
    const Token &t = peek(ahead);
    switch (t.kind) {
      case TokenKind::Identifier:
      case TokenKind::Number:
      case TokenKind::String:
      case TokenKind::Char:
      case TokenKind::TextBlock:
        return true;
      case TokenKind::Keyword:
        return t.text == "this" || t.text == "super" || t.text == "new" || t.text == "null" ||
               t.text == "true" || t.text == "false" || t.text == "switch";
      case TokenKind::Operator:
        return t.text == "(" || t.text == "!" || t.text == "~" || t.text == "-" || t.text == "+";
      default:
        return false;
    }
  }

  Ptr parse_for() {
    std::size_t begin = peek().begin;
    expect("for");
    expect("(");
    // Enhanced for: [mods] Type name ':'
    {
      std::size_t save = pos_;
      auto mods = parse_modifiers(false);
      std::size_t i = pos_;
      if (scan_type(i, true) && at(i).kind == TokenKind::Identifier && at(i + 1).is(":")) {
        auto n = node(Kind::EnhancedForStatement, "", begin);
        auto param = node(Kind::Parameter, "", peek().begin);
        for (auto &m : mods) add(*param, std::move(m));
        add(*param, parse_type_leaf(true));
        add(*param, leaf(Kind::SimpleName, expect_ident()), Role::Name);
        add(*n, finish(std::move(param)), Role::Init);
        expect(":");
        add(*n, parse_expression(), Role::Iterable);
        expect(")");
        add(*n, parse_statement(), Role::Body);
        return finish(std::move(n));
      }
      pos_ = save;
    }
    auto n = node(Kind::ForStatement, "", begin);
    if (!check(";")) {
      std::size_t init_begin = peek().begin;
      if (check("final") || check("@") || looks_like_local_variable()) {
        auto mods = parse_modifiers(false);
        add(*n, parse_local_variable(std::move(mods), init_begin), Role::Init);
      } else {
        do {
          add(*n, parse_expression(), Role::Init);
        } while (accept(","));
      }
    }
    expect(";");
    if (!check(";")) add(*n, parse_expression(), Role::Condition);
    expect(";");
    if (!check(")")) {
      do {
        add(*n, parse_expression(), Role::Update);
      } while (accept(","));
    }
    expect(")");
    add(*n, parse_statement(), Role::Body);
    return finish(std::move(n));
  }

  Ptr parse_switch(Kind kind) {
    std::size_t begin = peek().begin;
    expect("switch");
    auto n = node(kind, "", begin);
    add(*n, parse_paren_condition(), Role::Condition);
    expect("{");
    while (!check("}")) {
      if (at_end()) fail("unterminated switch");
      if (check("case") || check("default")) {
        auto c = node(Kind::SwitchCase, std::string(peek().text), peek().begin);
        bool is_default = check("default");
        advance();
        if (!is_default) {
          do {
            add(*c, parse_conditional(), Role::Value);
          } while (accept(","));
        }
        if (accept("->")) {
          add(*n, finish(std::move(c)));
          if (check("{")) {
            add(*n, parse_block());
          } else if (check("throw")) {
            add(*n, parse_statement());
          } else {
            auto es = node(Kind::ExpressionStatement, "", peek().begin);
            add(*es, parse_expression());
            expect(";");
            add(*n, finish(std::move(es)));
          }
        } else {
          expect(":");
          add(*n, finish(std::move(c)));
        }
        continue;
      }
      add(*n, parse_block_statement());
    }
    expect("}");
    return finish(std::move(n));
  }

  Ptr parse_try() {
    std::size_t begin = peek().begin;
    expect("try");
    auto n = node(Kind::TryStatement, "", begin);
    if (accept("(")) {
      while (!check(")")) {
        std::size_t rbegin = peek().begin;
        if (check("final") || check("@") || looks_like_local_variable()) {
          auto mods = parse_modifiers(false);
          add(*n, parse_local_variable(std::move(mods), rbegin), Role::Resource);
        } else {
          add(*n, parse_expression(), Role::Resource);
        }
        if (!accept(";")) break;
      }
      expect(")");
    }
    add(*n, parse_block(), Role::Body);
    while (check("catch")) {
      auto c = node(Kind::CatchClause, "", peek().begin);
      advance();
      expect("(");
      auto param = node(Kind::Parameter, "", peek().begin);
      for (auto &m : parse_modifiers(false)) add(*param, std::move(m));
      auto type = parse_type_leaf(false);
      while (accept("|")) {
        auto alt = parse_type_leaf(false);
        type->label += "|" + alt->label;
        type->span.end = alt->span.end;
      }
      add(*param, std::move(type));
      add(*param, leaf(Kind::SimpleName, expect_ident()), Role::Name);
      add(*c, finish(std::move(param)));
      expect(")");
      add(*c, parse_block(), Role::Body);
      add(*n, finish(std::move(c)));
    }
    if (accept("finally")) add(*n, parse_block(), Role::Finally);
    return finish(std::move(n));
  }

  // ---- expressions -----------------------------------------------------------

  Ptr parse_expression() {
    if (lambda_ahead()) return parse_lambda();
    auto lhs = parse_conditional();
    std::string op = peek_assignment_op();
    if (!op.empty()) {
      consume_operator(op);
      auto n = node(Kind::Assignment, op, lhs->span.begin);
      add(*n, std::move(lhs), Role::Target);
      add(*n, parse_expression(), Role::Value);
      return finish(std::move(n));
    }
    return lhs;
  }

  // Reassembles '>'-prefixed operators from adjacent tokens.
  std::string peek_operator() const {
    const Token &t = peek();
    if (t.kind != TokenKind::Operator && !(t.kind == TokenKind::Keyword && t.text == "instanceof"))
      return {};
    if (t.is(">")) {
      std::string op = ">";
      std::size_t i = pos_;
      while (op.size() < 3 && at(i + 1).is(">") && adjacent(i, i + 1)) {
        op += ">";
        ++i;
      }
      if (at(i + 1).is(">=") && adjacent(i, i + 1)) return op + ">=";
      if (at(i + 1).is("=") && adjacent(i, i + 1)) return op + "=";
      return op;
    }
    return std::string(t.text);
  }

  std::string peek_assignment_op() const {
    std::string op = peek_operator();
    return is_assignment_op(op) ? op : std::string{};
  }

  void consume_operator(const std::string &op) {
    if (op[0] != '>') {
      advance();
      return;
    }
    std::size_t consumed = 0;
    while (consumed < op.size()) consumed += advance().text.size();
  }

  Ptr parse_conditional() {
    auto cond = parse_binary(1);
    if (!check("?")) return cond;
    advance();
    auto n = node(Kind::ConditionalExpression, "?:", cond->span.begin);
    add(*n, std::move(cond), Role::Condition);
    add(*n, lambda_ahead() ? parse_lambda() : parse_conditional(), Role::Then);
    expect(":");
    add(*n, lambda_ahead() ? parse_lambda() : parse_conditional(), Role::Else);
    return finish(std::move(n));
  }

  Ptr parse_binary(int min_prec) {
    auto lhs = parse_unary();
    for (;;) {
      std::string op = peek_operator();
      auto it = binary_precedence().find(op);
      if (it == binary_precedence().end() || it->second < min_prec) break;
      int prec = it->second;
      if (op == "instanceof") {
        advance();
        auto n = node(Kind::InstanceofExpression, "instanceof", lhs->span.begin);
        add(*n, std::move(lhs));
        accept("final");
        add(*n, parse_type_leaf(true), Role::Target);
        if (check_ident()) add(*n, leaf(Kind::SimpleName, advance()), Role::Name);
        lhs = finish(std::move(n));
        continue;
      }
      consume_operator(op);
      auto rhs = parse_binary(prec + 1);
      auto n = node(Kind::InfixExpression, op, lhs->span.begin);
      add(*n, std::move(lhs));
      add(*n, std::move(rhs));
      lhs = finish(std::move(n));
    }
    return lhs;
  }

  bool cast_ahead() const {
    if (!check("(")) return false;
    std::size_t i = pos_ + 1;
    const Token &first = at(i);
    bool primitive = first.kind == TokenKind::Keyword && java::is_primitive_type(first.text);
    if (!scan_type(i, true)) return false;
    while (at(i).is("&")) {
      ++i;
      if (!scan_type(i, true)) return false;
    }
    if (!at(i).is(")")) return false;
    if (primitive) return true;
    const Token &next = at(i + 1);
    switch (next.kind) {
      case TokenKind::Identifier:
      case TokenKind::Number:
      case TokenKind::String:
      case TokenKind::Char:
      case TokenKind::TextBlock:
        return true;
      case TokenKind::Keyword:
        return next.text == "this" || next.text == "super" || next.text == "new" ||
               next.text == "null" || next.text == "true" || next.text == "false" ||
               next.text == "switch";
      case TokenKind::Operator:
        return next.text == "(" || next.text == "!" || next.text == "~";
      default:
        return false;
    }
  }

  Ptr parse_unary() {
    const Token &t = peek();
    if (t.is("+") || t.is("-") || t.is("++") || t.is("--") || t.is("!") || t.is("~")) {
      auto n = node(Kind::PrefixExpression, std::string(advance().text), t.begin);
      add(*n, parse_unary());
      return finish(std::move(n));
    }
    if (cast_ahead()) {
      auto n = node(Kind::CastExpression, "", t.begin);
      advance();
      auto type = parse_type_leaf(true);
      while (accept("&")) {
        auto extra = parse_type_leaf(true);
        type->label += "&" + extra->label;
        type->span.end = extra->span.end;
      }
      add(*n, std::move(type), Role::Target);
      expect(")");
      add(*n, lambda_ahead() ? parse_lambda() : parse_unary());
      return finish(std::move(n));
    }
    auto expr = parse_postfix(parse_primary());
    while (check("++") || check("--")) {
      auto n = node(Kind::PostfixExpression, std::string(advance().text), expr->span.begin);
      add(*n, std::move(expr));
      expr = finish(std::move(n));
    }
    return expr;
  }

  bool lambda_ahead() const {
    if (check_ident() && check("->", 1)) return true;
    if (!check("(")) return false;
    int depth = 0;
    for (std::size_t i = pos_;; ++i) {
      const Token &t = at(i);
      if (t.kind == TokenKind::End) return false;
      if (t.is("(")) ++depth;
      if (t.is(")") && --depth == 0) return at(i + 1).is("->");
    }
  }

  Ptr parse_lambda() {
    auto n = node(Kind::LambdaExpression, "", peek().begin);
    if (check_ident()) {
      add(*n, leaf(Kind::SimpleName, advance()), Role::Name);
    } else {
      expect("(");
      if (!check(")")) {
        do {
          if (check_ident() && (check(",", 1) || check(")", 1))) {
            add(*n, leaf(Kind::SimpleName, advance()), Role::Name);
          } else {
            add(*n, parse_parameter());
          }
        } while (accept(","));
      }
      expect(")");
    }
    expect("->");
    add(*n, check("{") ? parse_block() : parse_expression(), Role::Body);
    return finish(std::move(n));
  }

  void parse_arguments(TreeBuilderNode &owner) {
    expect("(");
    if (!check(")")) {
      do {
        add(owner, parse_expression(), Role::Argument);
      } while (accept(","));
    }
    expect(")");
  }

  Ptr parse_array_initializer() {
    auto n = node(Kind::ArrayInitializer, "", peek().begin);
    expect("{");
    while (!check("}")) {
      add(*n, check("{") ? parse_array_initializer() : parse_expression());
      if (!accept(",")) break;
    }
    expect("}");
    return finish(std::move(n));
  }

  Ptr parse_creator(std::size_t begin) {
    expect("new");
    if (check("<")) {
      std::size_t i = pos_;
      if (!skip_type_arguments(i)) fail("malformed type arguments");
      while (pos_ < i) advance();
    }
    auto type = parse_type_leaf(false);
    if (check("[")) {
      auto n = node(Kind::ArrayCreation, "", begin);
      add(*n, std::move(type), Role::Target);
      while (check("[")) {
        advance();
        if (check("]")) {
          advance();
          n->label += "[]";
          continue;
        }
        add(*n, parse_expression(), Role::Argument);
        expect("]");
      }
      if (check("{")) add(*n, parse_array_initializer(), Role::Value);
      return finish(std::move(n));
    }
    auto n = node(Kind::ClassInstanceCreation, "new", begin);
    add(*n, std::move(type), Role::Target);
    parse_arguments(*n);
    if (check("{")) {
      auto body = node(Kind::AnonymousClass, "", peek().begin);
      parse_class_body(*body, "");
      add(*n, finish(std::move(body)), Role::Body);
    }
    return finish(std::move(n));
  }

  Ptr parse_primary() {
    const Token &t = peek();
    std::size_t begin = t.begin;
    switch (t.kind) {
      case TokenKind::Number:
        return leaf(Kind::NumberLiteral, advance());
      case TokenKind::String:
      case TokenKind::TextBlock:
        return leaf(Kind::StringLiteral, advance());
      case TokenKind::Char:
        return leaf(Kind::CharacterLiteral, advance());
      default:
        break;
    }
    if (t.is("true") || t.is("false")) return leaf(Kind::BooleanLiteral, advance());
    if (t.is("null")) return leaf(Kind::NullLiteral, advance());
    if (t.is("this")) {
      auto n = leaf(Kind::ThisExpression, advance());
      if (check("(")) {
        auto call = node(Kind::ConstructorCall, "this", begin);
        parse_arguments(*call);
        return finish(std::move(call));
      }
      return n;
    }
    if (t.is("super")) return leaf(Kind::SuperExpression, advance());
    if (t.is("new")) return parse_creator(begin);
    if (t.is("switch")) return parse_switch(Kind::SwitchExpression);
    if (t.is("(")) {
      if (lambda_ahead()) return parse_lambda();
      advance();
      auto n = node(Kind::ParenthesizedExpression, "()", begin);
      add(*n, parse_expression());
      expect(")");
      return finish(std::move(n));
    }
    if (t.kind == TokenKind::Keyword && java::is_primitive_type(t.text)) {
      // int.class, int[].class, int[]::new
      auto type = parse_type_leaf(true);
      if (accept("::")) {
        auto n = node(Kind::MethodReference, std::string(advance().text), begin);
        add(*n, std::move(type), Role::Receiver);
        return finish(std::move(n));
      }
      expect(".");
      expect("class");
      auto n = node(Kind::TypeLiteral, type->label + ".class", begin);
      return finish(std::move(n));
    }
    if (t.kind == TokenKind::Identifier) {
      if (check_ident() && check("->", 1)) return parse_lambda();
      // Generic or array type used as a method reference target.
      {
        std::size_t i = pos_;
        if (scan_type(i, true) && at(i).is("::") && i > pos_ + 1 &&
            (at(i - 1).is(">") || at(i - 1).is("]"))) {
          auto type = parse_type_leaf(true);
          expect("::");
          auto n = node(Kind::MethodReference, std::string(advance().text), begin);
          add(*n, std::move(type), Role::Receiver);
          return finish(std::move(n));
        }
        i = pos_;
        if (scan_type(i, true) && at(i).is(".") && at(i + 1).is("class") && i > pos_ + 1 &&
            at(i - 1).is("]")) {
          auto type = parse_type_leaf(true);
          expect(".");
          expect("class");
          auto n = node(Kind::TypeLiteral, type->label + ".class", begin);
          return finish(std::move(n));
        }
      }
      auto name = leaf(Kind::SimpleName, advance());
      if (check("(")) {
        auto call = node(Kind::MethodInvocation, "", begin);
        add(*call, std::move(name), Role::Name);
        parse_arguments(*call);
        return finish(std::move(call));
      }
      return name;
    }
    if (t.is("@")) {
      // Annotated expression types are not supported; skip the annotation.
      parse_annotation();
      return parse_primary();
    }
    fail("expected expression");
  }

  Ptr parse_postfix(Ptr expr) {
    for (;;) {
      if (check(".")) {
        advance();
        if (check("<")) {
          std::size_t i = pos_;
          if (!skip_type_arguments(i)) fail("malformed type arguments");
          while (pos_ < i) advance();
        }
        if (check("new")) {
          auto creation = parse_creator(peek().begin);
          creation->span.begin = expr->span.begin;
          creation->children.insert(creation->children.begin(), std::move(expr));
          creation->children.front()->role = Role::Receiver;
          expr = std::move(creation);
          continue;
        }
        if (check("class")) {
          advance();
          auto n = node(Kind::TypeLiteral, std::string(source_.substr(expr->span.begin, last_end_ - expr->span.begin)),
                        expr->span.begin);
          n->label.erase(std::remove_if(n->label.begin(), n->label.end(), ::isspace), n->label.end());
          expr = finish(std::move(n));
          continue;
        }
        if (check("this") || check("super")) {
          Kind k = check("this") ? Kind::ThisExpression : Kind::SuperExpression;
          auto n = node(k, std::string(peek().text), expr->span.begin);
          advance();
          add(*n, std::move(expr), Role::Receiver);
          expr = finish(std::move(n));
          continue;
        }
        auto name = leaf(Kind::SimpleName, expect_ident());
        if (check("(")) {
          auto call = node(Kind::MethodInvocation, "", expr->span.begin);
          add(*call, std::move(expr), Role::Receiver);
          add(*call, std::move(name), Role::Name);
          parse_arguments(*call);
          expr = finish(std::move(call));
        } else {
          auto access = node(Kind::FieldAccess, "", expr->span.begin);
          add(*access, std::move(expr), Role::Receiver);
          add(*access, std::move(name), Role::Name);
          expr = finish(std::move(access));
        }
        continue;
      }
      if (check("[")) {
        advance();
        auto n = node(Kind::ArrayAccess, "", expr->span.begin);
        add(*n, std::move(expr), Role::Receiver);
        add(*n, parse_expression(), Role::Argument);
        expect("]");
        expr = finish(std::move(n));
        continue;
      }
      if (check("::")) {
        advance();
        std::string name = check("new") ? std::string(advance().text) : std::string(expect_ident().text);
        auto n = node(Kind::MethodReference, name, expr->span.begin);
        add(*n, std::move(expr), Role::Receiver);
        expr = finish(std::move(n));
        continue;
      }
      return expr;
    }
  }

  std::string_view source_;
  std::vector<Token> tokens_;
  std::vector<Comment> comments_;
  std::size_t pos_ = 0;
  std::size_t last_end_ = 0;
};

class JavaAdapter final : public LanguageAdapter {
public:
  std::string_view id() const override { return "java"; }
  std::vector<std::string> extensions() const override { return {".java"}; }
  SyntaxTree parse(std::string_view text) const override { return Parser(text).parse(); }
};

}  // namespace

std::shared_ptr<const LanguageAdapter> make_java_adapter() { return std::make_shared<JavaAdapter>(); }

}  // namespace cvalue::syntax
