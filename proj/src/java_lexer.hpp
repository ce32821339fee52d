#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "cvalue/syntax.hpp"

namespace cvalue::syntax::java {

enum class TokenKind { Identifier, Keyword, Number, String, Char, TextBlock, Operator, End };

struct Token {
  TokenKind kind = TokenKind::End;
  std::string_view text;
  std::size_t begin = 0;
  std::size_t end = 0;

  bool is(std::string_view op) const {
    return (kind == TokenKind::Operator || kind == TokenKind::Keyword) && text == op;
  }
};

struct LexResult {
  std::vector<Token> tokens;  // terminated by an End token
  std::vector<Comment> comments;
};

/// Splits Java source into tokens. A lone '>' is always its own token so the
/// parser can close nested type arguments; shift operators are reassembled
/// from adjacent '>' tokens during expression parsing.
LexResult lex(std::string_view source);

bool is_keyword(std::string_view word);
bool is_primitive_type(std::string_view word);

}  // namespace cvalue::syntax::java
