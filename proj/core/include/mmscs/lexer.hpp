#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace mmscs {

enum class TokenKind { Identifier, Number, String, Punct, LineComment, BlockComment };

struct Token {
  TokenKind kind;
  std::string text;
  std::size_t begin = 0;  // byte offset of first character
  std::size_t end = 0;    // one past the last character
  std::size_t line = 1;   // 1-based line of `begin`

  bool is(std::string_view s) const { return text == s && kind != TokenKind::String; }
  bool is_comment() const {
    return kind == TokenKind::LineComment || kind == TokenKind::BlockComment;
  }
  bool is_identifier() const { return kind == TokenKind::Identifier; }
};

/// Lexes Solidity source into tokens. Never throws: unterminated strings and
/// comments run to end of input. Comments are kept so that docstrings can be
/// attached to definitions.
std::vector<Token> lex(std::string_view source);

/// Same as lex() but with comments removed.
std::vector<Token> lex_code(std::string_view source);

/// 1-based (line, column) of a byte offset.
std::pair<std::size_t, std::size_t> line_column(std::string_view source, std::size_t offset);

}  // namespace mmscs
