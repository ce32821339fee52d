#include "java_lexer.hpp"

#include <cctype>
#include <unordered_set>

namespace cvalue::syntax::java {

namespace {

const std::unordered_set<std::string_view> &keywords() {
  static const std::unordered_set<std::string_view> set = {
      "abstract", "assert",     "boolean",   "break",     "byte",         "case",      "catch",
      "char",     "class",      "const",     "continue",  "default",      "do",        "double",
      "else",     "enum",       "extends",   "final",     "finally",      "float",     "for",
      "goto",     "if",         "implements", "import",   "instanceof",   "int",       "interface",
      "long",     "native",     "new",       "package",   "private",      "protected", "public",
      "return",   "short",      "static",    "strictfp",  "super",        "switch",    "synchronized",
      "this",     "throw",      "throws",    "transient", "try",          "void",      "volatile",
      "while",    "true",       "false",     "null"};
  return set;
}

// Longest operators first so greedy matching works.
constexpr std::string_view kOperators[] = {
    "<<=", "...", "->", "::", "++", "--", "&&", "||", "==", "!=", "<=", ">=", "<<",
    "+=",   "-=",  "*=",  "/=", "%=", "&=", "|=", "^=", "(",  ")",  "{",  "}",  "[",  "]",
    ";",    ",",   ".",   "@",  "=",  "<",  ">",  "!",  "~",  "?"};

constexpr std::string_view kSingleOps = ":+-*/&|^%";

bool ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$' ||
         static_cast<unsigned char>(c) >= 0x80;
}
bool ident_part(char c) { return ident_start(c) || std::isdigit(static_cast<unsigned char>(c)); }

}  // namespace

bool is_keyword(std::string_view word) { return keywords().contains(word); }

bool is_primitive_type(std::string_view word) {
  return word == "boolean" || word == "byte" || word == "char" || word == "short" || word == "int" ||
         word == "long" || word == "float" || word == "double" || word == "void";
}

LexResult lex(std::string_view src) {
  LexResult out;
  std::size_t i = 0;
  const std::size_t n = src.size();
  auto push = [&](TokenKind kind, std::size_t begin, std::size_t end) {
    out.tokens.push_back(Token{kind, src.substr(begin, end - begin), begin, end});
  };
  while (i < n) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '/' && i + 1 < n && src[i + 1] == '/') {
      std::size_t begin = i;
      while (i < n && src[i] != '\n') ++i;
      out.comments.push_back(Comment{Span{begin, i}, false});
      continue;
    }
    if (c == '/' && i + 1 < n && src[i + 1] == '*') {
      std::size_t begin = i;
      std::size_t close = src.find("*/", i + 2);
      if (close == std::string_view::npos) throw ParseError(begin, "unterminated block comment");
      i = close + 2;
      out.comments.push_back(Comment{Span{begin, i}, true});
      continue;
    }
    if (ident_start(c)) {
      std::size_t begin = i;
      while (i < n && ident_part(src[i])) ++i;
      auto word = src.substr(begin, i - begin);
      push(is_keyword(word) ? TokenKind::Keyword : TokenKind::Identifier, begin, i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && i + 1 < n && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
      std::size_t begin = i;
      bool hex = c == '0' && i + 1 < n && (src[i + 1] == 'x' || src[i + 1] == 'X');
      if (hex) i += 2;
      while (i < n) {
        char d = src[i];
        if (std::isalnum(static_cast<unsigned char>(d)) || d == '_' || d == '.') {
          // exponent sign
          if (!hex && (d == 'e' || d == 'E') && i + 1 < n && (src[i + 1] == '+' || src[i + 1] == '-')) {
            i += 2;
            continue;
          }
          if (hex && (d == 'p' || d == 'P') && i + 1 < n && (src[i + 1] == '+' || src[i + 1] == '-')) {
            i += 2;
            continue;
          }
          if (d == '.' && i + 1 < n && src[i + 1] == '.') break;  // range-like "1..", not Java
          ++i;
        } else {
          break;
        }
      }
      push(TokenKind::Number, begin, i);
      continue;
    }
    if (c == '"') {
      std::size_t begin = i;
      if (src.substr(i, 3) == "\"\"\"") {
        std::size_t close = src.find("\"\"\"", i + 3);
        if (close == std::string_view::npos) throw ParseError(begin, "unterminated text block");
        i = close + 3;
        push(TokenKind::TextBlock, begin, i);
        continue;
      }
      ++i;
      while (i < n && src[i] != '"') {
        if (src[i] == '\\') ++i;
        if (i < n && src[i] == '\n') throw ParseError(begin, "unterminated string literal");
        ++i;
      }
      if (i >= n) throw ParseError(begin, "unterminated string literal");
      ++i;
      push(TokenKind::String, begin, i);
      continue;
    }
    if (c == '\'') {
      std::size_t begin = i++;
      while (i < n && src[i] != '\'') {
        if (src[i] == '\\') ++i;
        if (i < n && src[i] == '\n') throw ParseError(begin, "unterminated character literal");
        ++i;
      }
      if (i >= n) throw ParseError(begin, "unterminated character literal");
      ++i;
      push(TokenKind::Char, begin, i);
      continue;
    }
    bool matched = false;
    for (auto op : kOperators) {
      if (src.substr(i, op.size()) == op) {
        push(TokenKind::Operator, i, i + op.size());
        i += op.size();
        matched = true;
        break;
      }
    }
    if (matched) continue;
    if (kSingleOps.find(c) != std::string_view::npos) {
      push(TokenKind::Operator, i, i + 1);
      ++i;
      continue;
    }
    throw ParseError(i, std::string("unexpected character '") + c + "'");
  }
  out.tokens.push_back(Token{TokenKind::End, {}, n, n});
  return out;
}

}  // namespace cvalue::syntax::java
