#include "mmscs/frontend.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <unordered_set>

#include "mmscs/error.hpp"
#include "mmscs/lexer.hpp"

namespace mmscs {

std::string_view to_string(UnitKind kind) {
  switch (kind) {
    case UnitKind::Function:
      return "function";
    case UnitKind::Modifier:
      return "modifier";
    case UnitKind::Fallback:
      return "fallback";
  }
  return "function";
}

UnitKind unit_kind_from_string(std::string_view s) {
  if (s == "function") return UnitKind::Function;
  if (s == "modifier") return UnitKind::Modifier;
  if (s == "fallback") return UnitKind::Fallback;
  throw Error("unknown unit kind '" + std::string(s) + "'");
}

namespace {

// Indices into the full token vector (comments included) of matching braces.
std::vector<std::size_t> match_braces(std::string_view source, const std::vector<Token>& tokens) {
  std::vector<std::size_t> match(tokens.size(), tokens.size());
  std::vector<std::size_t> open;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const Token& t = tokens[i];
    if (t.kind != TokenKind::Punct) continue;
    if (t.text == "{") {
      open.push_back(i);
    } else if (t.text == "}") {
      if (open.empty()) {
        auto [line, col] = line_column(source, t.begin);
        throw ParseError("unbalanced '}' at file scope", t.begin, line, col);
      }
      match[open.back()] = i;
      match[i] = open.back();
      open.pop_back();
    }
  }
  if (!open.empty()) {
    const Token& t = tokens[open.back()];
    auto [line, col] = line_column(source, t.begin);
    throw ParseError("unclosed '{' at file scope", t.begin, line, col);
  }
  return match;
}

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string clean_docstring(const std::vector<const Token*>& comments) {
  static const std::vector<std::string_view> kDropTags = {"@param", "@return", "@inheritdoc",
                                                          "@custom"};
  std::string joined;
  for (const Token* c : comments) {
    std::string_view body = c->text;
    if (c->kind == TokenKind::BlockComment) {
      body.remove_prefix(2);
      if (body.size() >= 2 && body.substr(body.size() - 2) == "*/") body.remove_suffix(2);
    }
    std::size_t pos = 0;
    while (pos <= body.size()) {
      std::size_t nl = body.find('\n', pos);
      std::string_view raw = body.substr(pos, nl == std::string_view::npos ? body.npos : nl - pos);
      std::string line = trim(raw);
      while (!line.empty() && (line.front() == '/' || line.front() == '*' || line.front() == '!'))
        line.erase(line.begin());
      line = trim(line);
      bool drop = false;
      if (!line.empty() && line.front() == '@') {
        for (auto tag : kDropTags) {
          if (line.starts_with(tag)) drop = true;
        }
        if (!drop) {
          std::size_t sp = line.find_first_of(" \t");
          line = sp == std::string::npos ? std::string() : trim(line.substr(sp));
        }
      }
      if (!drop && !line.empty()) {
        if (!joined.empty()) joined += ' ';
        joined += line;
      }
      if (nl == std::string_view::npos) break;
      pos = nl + 1;
    }
  }
  std::string collapsed;
  for (char ch : joined) {
    if (std::isspace(static_cast<unsigned char>(ch))) {
      if (!collapsed.empty() && collapsed.back() != ' ') collapsed += ' ';
    } else {
      collapsed += ch;
    }
  }
  return trim(collapsed);
}

std::size_t newlines_between(std::string_view src, std::size_t begin, std::size_t end) {
  if (end <= begin) return 0;
  return static_cast<std::size_t>(std::count(src.begin() + begin, src.begin() + end, '\n'));
}

std::optional<std::string> docstring_for(std::string_view src, const std::vector<Token>& tokens,
                                         std::size_t def_index) {
  std::vector<const Token*> run;
  std::size_t next_begin = tokens[def_index].begin;
  std::size_t k = def_index;
  while (k > 0) {
    const Token& c = tokens[k - 1];
    if (!c.is_comment()) break;
    if (newlines_between(src, c.end, next_begin) > 1) break;
    // A trailing comment on a line of code does not document what follows.
    if (k >= 2 && newlines_between(src, tokens[k - 2].end, c.begin) == 0) break;
    run.push_back(&c);
    next_begin = c.begin;
    --k;
  }
  if (run.empty()) return std::nullopt;
  std::reverse(run.begin(), run.end());
  std::string text = clean_docstring(run);
  if (text.empty()) return std::nullopt;
  return text;
}

}  // namespace

bool is_elementary_type(std::string_view t) {
  static const std::set<std::string_view> kFixed = {"address", "bool", "string", "bytes",
                                                    "byte", "payable", "fixed", "ufixed"};
  if (kFixed.contains(t)) return true;
  auto digits_after = [&](std::string_view prefix) {
    if (!t.starts_with(prefix)) return false;
    return std::all_of(t.begin() + static_cast<std::ptrdiff_t>(prefix.size()), t.end(),
                       [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
  };
  return digits_after("uint") || digits_after("int") || digits_after("bytes");
}

std::string normalize_type_name(const std::vector<std::string>& type_tokens) {
  if (type_tokens.empty()) return "unknown";
  const std::string& head = type_tokens.front();
  std::string base;
  if (head == "mapping") return "mapping";
  if (head.starts_with("uint") && is_elementary_type(head)) {
    base = "uint";
  } else if (head.starts_with("int") && is_elementary_type(head)) {
    base = "int";
  } else if (head.starts_with("bytes") && head != "bytes" && is_elementary_type(head)) {
    base = "bytes";
  } else {
    base = head;
  }
  if (type_tokens.size() > 1 && type_tokens[1] == "[") base += "[]";
  return base;
}

namespace {

// Parses `type ... name [= ...]` at contract scope into (name, type).
std::optional<std::pair<std::string, std::string>> parse_state_variable(
    const std::vector<const Token*>& stmt) {
  static const std::set<std::string_view> kSkip = {"event", "using", "error", "pragma", "import",
                                                   "struct", "enum", "type"};
  if (stmt.empty() || kSkip.contains(stmt.front()->text)) return std::nullopt;
  std::size_t lhs_end = stmt.size();
  int depth = 0;
  for (std::size_t i = 0; i < stmt.size(); ++i) {
    const std::string& s = stmt[i]->text;
    if (s == "(" || s == "[") ++depth;
    if (s == ")" || s == "]") --depth;
    if (depth == 0 && s == "=" && stmt[i]->kind == TokenKind::Punct) {
      lhs_end = i;
      break;
    }
  }
  if (lhs_end < 2 || !stmt[lhs_end - 1]->is_identifier()) return std::nullopt;
  std::vector<std::string> type_tokens;
  for (std::size_t i = 0; i + 1 < lhs_end; ++i) type_tokens.push_back(stmt[i]->text);
  return std::make_pair(stmt[lhs_end - 1]->text, normalize_type_name(type_tokens));
}

}  // namespace

SourceFile parse_source(std::string_view src, const std::string& path) {
  const std::vector<Token> tokens = lex(src);
  const std::vector<std::size_t> match = match_braces(src, tokens);

  SourceFile file;
  enum class Scope { Contract, Other };
  std::vector<Scope> scopes;
  std::optional<std::string> pending_contract;
  std::vector<const Token*> stmt;  // current contract-scope statement

  auto next_code = [&](std::size_t i) {
    for (std::size_t j = i + 1; j < tokens.size(); ++j) {
      if (!tokens[j].is_comment()) return j;
    }
    return tokens.size();
  };
  auto at_definition_scope = [&] { return scopes.empty() || scopes.back() == Scope::Contract; };
  auto current_contract = [&]() -> ContractInfo* {
    if (scopes.empty() || scopes.back() != Scope::Contract || file.contracts.empty())
      return nullptr;
    return &file.contracts.back();
  };

  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const Token& t = tokens[i];
    if (t.is_comment()) continue;

    if (t.kind == TokenKind::Punct && t.text == "{") {
      if (pending_contract && scopes.empty()) {
        file.contracts.push_back(ContractInfo{*pending_contract, {}, false});
        scopes.push_back(Scope::Contract);
        pending_contract.reset();
      } else {
        scopes.push_back(Scope::Other);
      }
      stmt.clear();
      continue;
    }
    if (t.kind == TokenKind::Punct && t.text == "}") {
      if (!scopes.empty()) scopes.pop_back();
      stmt.clear();
      continue;
    }
    if (!at_definition_scope()) continue;

    const std::size_t nx = next_code(i);
    const Token* next = nx < tokens.size() ? &tokens[nx] : nullptr;

    if (scopes.empty() && t.is_identifier() &&
        (t.text == "contract" || t.text == "library" || t.text == "interface") && next &&
        next->is_identifier()) {
      pending_contract = next->text;
      i = nx;
      continue;
    }

    std::optional<UnitKind> kind;
    std::string name;
    if (t.is_identifier()) {
      if (t.text == "function" && next) {
        if (next->is_identifier()) {
          kind = UnitKind::Function;
          name = next->text;
        } else if (next->is("(")) {
          kind = UnitKind::Fallback;
        }
      } else if (t.text == "modifier" && next && next->is_identifier()) {
        kind = UnitKind::Modifier;
        name = next->text;
      } else if (next && next->is("(")) {
        if (t.text == "constructor" || t.text == "receive") {
          kind = UnitKind::Function;
          name = t.text;
        } else if (t.text == "fallback") {
          kind = UnitKind::Fallback;
        }
      }
    }

    if (!kind) {
      if (ContractInfo* contract = current_contract()) {
        if (t.is(";")) {
          std::vector<const Token*> code;
          for (const Token* s : stmt) code.push_back(s);
          if (auto var = parse_state_variable(code)) contract->state_vars[var->first] = var->second;
          stmt.clear();
        } else {
          stmt.push_back(&t);
        }
      }
      continue;
    }

    // Header runs to the first `{` or `;` outside parentheses.
    std::size_t j = i + 1;
    int paren = 0;
    for (; j < tokens.size(); ++j) {
      const Token& h = tokens[j];
      if (h.kind != TokenKind::Punct) continue;
      if (h.text == "(") ++paren;
      if (h.text == ")") --paren;
      if (paren == 0 && (h.text == "{" || h.text == ";")) break;
    }
    stmt.clear();
    if (j >= tokens.size()) break;
    if (tokens[j].text == ";") {  // declaration without a body
      i = j;
      continue;
    }
    const std::size_t close = match[j];
    const Token& last = tokens[close];

    FunctionUnit unit;
    unit.kind = *kind;
    unit.name = name;
    unit.path = path;
    unit.byte_begin = t.begin;
    unit.byte_end = last.end;
    unit.source = std::string(src.substr(t.begin, last.end - t.begin));
    unit.span = LineSpan{t.line, last.line};
    unit.docstring = docstring_for(src, tokens, i);
    if (ContractInfo* contract = current_contract()) {
      unit.contract = contract->name;
      if (unit.kind == UnitKind::Fallback) contract->has_fallback = true;
    }
    unit.id = path + ":" + std::to_string(unit.span.start) + ":" +
              (unit.contract.empty() ? "" : unit.contract + ".") +
              (unit.name.empty() ? std::string("fallback") : unit.name);
    file.units.push_back(std::move(unit));
    i = close;
  }

  // Attach the contract state variables each unit actually mentions.
  for (FunctionUnit& unit : file.units) {
    auto it = std::find_if(file.contracts.begin(), file.contracts.end(),
                           [&](const ContractInfo& c) { return c.name == unit.contract; });
    if (it == file.contracts.end() || unit.contract.empty()) continue;
    std::unordered_set<std::string> mentioned;
    for (const Token& tok : lex_code(unit.source)) {
      if (tok.is_identifier()) mentioned.insert(tok.text);
    }
    for (const auto& [var, type] : it->state_vars) {
      if (mentioned.contains(var)) unit.state_vars[var] = type;
    }
  }
  return file;
}

std::vector<FunctionUnit> extract_functions(std::string_view source, const std::string& path) {
  return parse_source(source, path).units;
}

std::vector<std::string> split_identifier(std::string_view id) {
  std::vector<std::string> words;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) words.push_back(std::move(cur));
    cur.clear();
  };
  auto lower = [](char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); };
  for (std::size_t i = 0; i < id.size(); ++i) {
    const unsigned char c = static_cast<unsigned char>(id[i]);
    if (c >= 0x80 || !std::isalnum(c)) {
      flush();
      continue;
    }
    if (std::isupper(c) && i > 0) {
      const unsigned char p = static_cast<unsigned char>(id[i - 1]);
      const bool prev_lower_or_digit = p < 0x80 && (std::islower(p) || std::isdigit(p));
      const bool acronym_end = p < 0x80 && std::isupper(p) && i + 1 < id.size() &&
                               static_cast<unsigned char>(id[i + 1]) < 0x80 &&
                               std::islower(static_cast<unsigned char>(id[i + 1]));
      if (prev_lower_or_digit || acronym_end) flush();
    }
    cur += lower(static_cast<char>(c));
  }
  flush();
  return words;
}

std::vector<std::string> normalize_words(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && !std::isalnum(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t b = i;
    while (i < text.size() && std::isalnum(static_cast<unsigned char>(text[i]))) ++i;
    if (i > b) {
      for (auto& w : split_identifier(text.substr(b, i - b))) out.push_back(std::move(w));
    }
  }
  return out;
}

namespace {

bool is_call_keyword(std::string_view s) {
  static const std::set<std::string_view> kNotCalls = {
      "if",       "for",      "while",   "return", "returns", "function", "modifier",
      "catch",    "try",      "mapping", "type",   "emit",    "new",      "constructor",
      "fallback", "receive",  "do",      "else",   "assembly", "unchecked", "event"};
  return kNotCalls.contains(s) || is_elementary_type(s);
}

}  // namespace

TokenBundle tokenize_code(const FunctionUnit& unit, const Caps& caps) {
  TokenBundle bundle;
  const auto code = lex_code(unit.source);

  for (const Token& t : code) {
    if (!t.is_identifier()) continue;
    for (auto& w : split_identifier(t.text)) {
      if (bundle.tokens.size() >= caps.tokens) break;
      bundle.tokens.push_back(std::move(w));
    }
    if (bundle.tokens.size() >= caps.tokens) break;
  }

  for (auto& w : split_identifier(unit.name)) {
    if (bundle.name.size() >= caps.name) break;
    bundle.name.push_back(std::move(w));
  }

  // Calls inside the body only; modifier invocations in the header are not APIs.
  std::size_t body = 0;
  int paren = 0;
  for (; body < code.size(); ++body) {
    if (code[body].is("(")) ++paren;
    if (code[body].is(")")) --paren;
    if (paren == 0 && code[body].is("{")) break;
  }
  for (std::size_t i = body + 1; i + 1 < code.size() && bundle.api.size() < caps.api; ++i) {
    const Token& t = code[i];
    if (!t.is_identifier() || is_call_keyword(t.text)) continue;
    std::size_t k = i + 1;
    if (code[k].is("{")) {  // call options: addr.call{value: x}(...)
      int depth = 0;
      for (; k < code.size(); ++k) {
        if (code[k].is("{")) ++depth;
        if (code[k].is("}") && --depth == 0) break;
      }
      ++k;
    }
    if (k < code.size() && code[k].is("(")) {
      for (auto& w : split_identifier(t.text)) {
        if (bundle.api.size() >= caps.api) break;
        bundle.api.push_back(std::move(w));
      }
    }
  }
  return bundle;
}

std::string normalized_source(std::string_view source) {
  std::string key;
  for (const Token& t : lex_code(source)) {
    if (!key.empty()) key += ' ';
    key += t.text;
  }
  return key;
}

std::vector<FunctionUnit> deduplicate(const std::vector<FunctionUnit>& units) {
  std::unordered_set<std::string> seen;
  std::vector<FunctionUnit> out;
  for (const FunctionUnit& u : units) {
    if (seen.insert(normalized_source(u.source)).second) out.push_back(u);
  }
  return out;
}

}  // namespace mmscs
