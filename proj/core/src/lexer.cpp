#include "mmscs/lexer.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace mmscs {

namespace {

constexpr std::array<std::string_view, 27> kOperators = {
    ">>>=", "<<=", ">>=", ">>>", "**", "==", "!=", "<=", ">=", "&&", "||", "++", "--", "+=",
    "-=",   "*=",  "/=",  "%=",  "|=", "&=", "^=", "<<", ">>", "=>", "->", ":=", "**="};

bool ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

}  // namespace

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0;
  std::size_t line = 1;
  const std::size_t n = src.size();

  auto push = [&](TokenKind kind, std::size_t begin, std::size_t end, std::size_t at_line) {
    out.push_back(Token{kind, std::string(src.substr(begin, end - begin)), begin, end, at_line});
  };
  auto count_lines = [&](std::size_t begin, std::size_t end) {
    line += static_cast<std::size_t>(std::count(src.begin() + begin, src.begin() + end, '\n'));
  };

  while (i < n) {
    const char c = src[i];
    if (c == '\n') {
      ++line;
      ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    const std::size_t start_line = line;
    if (c == '/' && i + 1 < n && src[i + 1] == '/') {
      while (i < n && src[i] != '\n') ++i;
      push(TokenKind::LineComment, start, i, start_line);
      continue;
    }
    if (c == '/' && i + 1 < n && src[i + 1] == '*') {
      std::size_t close = src.find("*/", i + 2);
      i = close == std::string_view::npos ? n : close + 2;
      count_lines(start, i);
      push(TokenKind::BlockComment, start, i, start_line);
      continue;
    }
    if (c == '"' || c == '\'') {
      ++i;
      while (i < n && src[i] != c) {
        if (src[i] == '\\' && i + 1 < n) ++i;
        ++i;
      }
      i = std::min(n, i + 1);
      count_lines(start, i);
      push(TokenKind::String, start, i, start_line);
      continue;
    }
    if (ident_start(c)) {
      while (i < n && ident_char(src[i])) ++i;
      push(TokenKind::Identifier, start, i, start_line);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && i + 1 < n && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
      while (i < n && (std::isalnum(static_cast<unsigned char>(src[i])) || src[i] == '_' ||
                       src[i] == '.')) {
        // 1.5e10 and 0x1f are single numbers; a trailing member access is not.
        if (src[i] == '.' && !(i + 1 < n && std::isdigit(static_cast<unsigned char>(src[i + 1]))))
          break;
        ++i;
      }
      push(TokenKind::Number, start, i, start_line);
      continue;
    }
    std::size_t len = 1;
    for (std::string_view op : kOperators) {
      if (op.size() > len && src.substr(i, op.size()) == op) len = op.size();
    }
    i += len;
    push(TokenKind::Punct, start, i, start_line);
  }
  return out;
}

std::vector<Token> lex_code(std::string_view source) {
  auto tokens = lex(source);
  std::erase_if(tokens, [](const Token& t) { return t.is_comment(); });
  return tokens;
}

std::pair<std::size_t, std::size_t> line_column(std::string_view source, std::size_t offset) {
  offset = std::min(offset, source.size());
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < offset; ++i) {
    if (source[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace mmscs
