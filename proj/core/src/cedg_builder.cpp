// Pattern-matching construction of the dependency graph over the unit's tokens.
//
// Elements are the variable and invocation mentions of a statement. Index
// expressions and call receivers are absorbed into the element they belong to,
// so `deposits[msg.sender]` is one Variable element and
// `msg.sender.transfer(x)` is one Invocation element with `x` as its argument.
#include <map>
#include <optional>
#include <set>

#include "mmscs/cedg.hpp"
#include "mmscs/lexer.hpp"

namespace mmscs {

namespace {

struct Range {
  std::size_t begin = 0;
  std::size_t end = 0;
  bool empty() const { return end <= begin; }
};

struct Element {
  bool invocation = false;
  std::size_t node = 0;
  std::vector<Element> args;
};

struct Stmt {
  enum class Kind { Simple, If, While, DoWhile, For, Try, Block, Skip };
  Kind kind = Kind::Skip;
  Range simple;
  Range cond;
  Range init;
  Range post;
  std::vector<Stmt> body;
  std::vector<Stmt> else_body;
  bool has_else = false;
  std::vector<std::vector<Stmt>> catches;
};

const std::set<std::string_view> kSkipWords = {
    "true",     "false",    "memory",    "storage", "calldata",  "return",    "returns",
    "emit",     "delete",   "public",    "private", "internal",  "external",  "constant",
    "immutable", "indexed", "anonymous", "virtual", "override",  "pure",      "view",
    "wei",      "gwei",     "ether",     "finney",  "szabo",     "seconds",   "minutes",
    "hours",    "days",     "weeks",     "years",   "let",       "break",     "continue",
    "else",     "throw",    "unchecked", "assembly", "var"};

const std::set<std::string_view> kVisibility = {"public", "private", "internal", "external"};

const std::map<std::string, std::string, std::less<>> kSystemVariables = {
    {"msg.sender", "address"},     {"msg.value", "uint"},        {"msg.data", "bytes"},
    {"msg.sig", "bytes"},          {"tx.origin", "address"},     {"tx.gasprice", "uint"},
    {"block.timestamp", "uint"},   {"block.number", "uint"},     {"block.difficulty", "uint"},
    {"block.gaslimit", "uint"},    {"block.coinbase", "address"}, {"block.chainid", "uint"},
    {"block.basefee", "uint"},     {"now", "uint"},              {"this", "address"},
    {"this.balance", "uint"}};

const std::set<std::string_view> kAssignOps = {"=",  "+=", "-=", "*=",  "/=",  "%=",
                                               "|=", "&=", "^=", "<<=", ">>=", ">>>="};

class Builder {
 public:
  Builder(const FunctionUnit& unit, const std::vector<FunctionUnit>& context)
      : unit_(unit), toks_(lex_code(unit.source)) {
    match_brackets();
    for (const FunctionUnit& u : context) {
      if (u.kind == UnitKind::Fallback) has_fallback_ = true;
      if (!u.name.empty() && u.name != unit.name) {
        auto code = lex_code(u.source);
        visibility_of_[u.name] = header_visibility(code, u.kind);
      }
    }
    if (unit.kind == UnitKind::Fallback) has_fallback_ = true;
  }

  Cedg build() {
    const std::size_t body_open = find_body_open();
    if (unit_.kind == UnitKind::Fallback) {
      fallback_node_ = add_node(NodeCategory::Fallback, "fallback", "0");
      def_node_ = *fallback_node_;
    } else {
      def_node_ = add_node(NodeCategory::Invocation, header_visibility(toks_, unit_.kind),
                           unit_.name);
      invocations_[unit_.name] = def_node_;
    }
    parse_header(body_open);

    if (body_open < toks_.size()) {
      const std::size_t body_close = match_[body_open];
      std::vector<Stmt> body = parse_block(Range{body_open + 1, body_close});
      prev_ = def_node_;
      process_block(body, EdgeType::BS);
    }

    if (has_fallback_) {
      if (!fallback_node_) fallback_node_ = add_node(NodeCategory::Fallback, "fallback", "0");
      for (const CedgNode& n : g_.nodes) {
        if (n.category == NodeCategory::Invocation) emit(EdgeType::FB, *fallback_node_, n.id);
      }
    }
    return std::move(g_);
  }

 private:
  // ---- token helpers -------------------------------------------------------

  bool is(std::size_t i, std::string_view s) const { return i < toks_.size() && toks_[i].is(s); }
  bool ident(std::size_t i) const { return i < toks_.size() && toks_[i].is_identifier(); }

  void match_brackets() {
    match_.assign(toks_.size(), toks_.size());
    std::vector<std::size_t> stack;
    for (std::size_t i = 0; i < toks_.size(); ++i) {
      if (toks_[i].kind != TokenKind::Punct) continue;
      const std::string& s = toks_[i].text;
      if (s == "(" || s == "[" || s == "{") {
        stack.push_back(i);
      } else if (s == ")" || s == "]" || s == "}") {
        if (!stack.empty()) {
          match_[stack.back()] = i;
          match_[i] = stack.back();
          stack.pop_back();
        }
      }
    }
  }

  // Closing bracket of the group opened at i, clamped to `limit`.
  std::size_t close_of(std::size_t i, std::size_t limit) const {
    return std::min(match_[i], limit);
  }

  std::size_t find_body_open() const {
    int paren = 0;
    for (std::size_t i = 0; i < toks_.size(); ++i) {
      if (is(i, "(")) ++paren;
      if (is(i, ")")) --paren;
      if (paren == 0 && is(i, "{")) return i;
    }
    return toks_.size();
  }

  static std::string header_visibility(const std::vector<Token>& code, UnitKind kind) {
    int paren = 0;
    for (const Token& t : code) {
      if (t.is("(")) ++paren;
      if (t.is(")")) --paren;
      if (paren == 0 && t.is("{")) break;
      if (paren == 0 && t.is_identifier() && kVisibility.contains(t.text)) return t.text;
    }
    if (kind == UnitKind::Fallback) return "external";
    return kind == UnitKind::Modifier ? "internal" : "public";
  }

  // Registers parameter and named-return types, and creates one Invocation node
  // per modifier mentioned in the header.
  void parse_header(std::size_t body_open) {
    static const std::set<std::string_view> kHeaderWords = {
        "function", "modifier", "constructor", "fallback", "receive", "payable", "view",
        "pure",     "constant", "virtual",     "override", "returns", "public",  "private",
        "internal", "external"};
    std::size_t i = 0;
    // Skip the keyword and name up to the parameter list.
    while (i < body_open && !is(i, "(")) ++i;
    if (i < body_open) {
      const std::size_t close = close_of(i, body_open);
      register_declarations(Range{i + 1, close});
      i = close + 1;
    }
    while (i < body_open) {
      if (is(i, "returns") && is(i + 1, "(")) {
        const std::size_t close = close_of(i + 1, body_open);
        register_declarations(Range{i + 2, close});
        i = close + 1;
        continue;
      }
      if (ident(i) && !kHeaderWords.contains(toks_[i].text)) {
        const std::string& name = toks_[i].text;
        const auto vis = visibility_of_.find(name);
        invocation_node(name, vis == visibility_of_.end() ? "internal" : vis->second);
      }
      if (is(i + 1, "(")) {
        i = close_of(i + 1, body_open) + 1;
        continue;
      }
      ++i;
    }
  }

  // Comma-separated `type [location] name` declarations.
  void register_declarations(Range r) {
    std::size_t part = r.begin;
    int depth = 0;
    for (std::size_t i = r.begin; i <= r.end; ++i) {
      if (i < r.end && (is(i, "(") || is(i, "["))) ++depth;
      if (i < r.end && (is(i, ")") || is(i, "]"))) --depth;
      if (i == r.end || (depth == 0 && is(i, ","))) {
        declaration(Range{part, i});
        part = i + 1;
      }
    }
  }

  // If `r` is a declaration, records its type and returns the name index.
  std::optional<std::size_t> declaration(Range r) {
    if (r.end < r.begin + 2) return std::nullopt;
    const std::size_t last = r.end - 1;
    if (!ident(last) || kSkipWords.contains(toks_[last].text)) return std::nullopt;
    const Token& before = toks_[last - 1];
    if (!(before.is_identifier() || before.is("]") || before.is(")"))) return std::nullopt;
    if (!ident(r.begin)) return std::nullopt;
    std::vector<std::string> type;
    for (std::size_t i = r.begin; i < last; ++i) {
      const std::string& s = toks_[i].text;
      if (s == "memory" || s == "storage" || s == "calldata") continue;
      type.push_back(s);
    }
    local_types_[toks_[last].text] = normalize_type_name(type);
    return last;
  }

  // ---- statements ----------------------------------------------------------

  std::vector<Stmt> parse_block(Range r) {
    std::vector<Stmt> out;
    std::size_t i = r.begin;
    while (i < r.end) {
      Stmt s;
      i = parse_statement(i, r.end, s);
      out.push_back(std::move(s));
    }
    return out;
  }

  std::vector<Stmt> as_body(Stmt s) {
    if (s.kind == Stmt::Kind::Block) return std::move(s.body);
    std::vector<Stmt> v;
    v.push_back(std::move(s));
    return v;
  }

  std::size_t parse_statement(std::size_t i, std::size_t end, Stmt& s) {
    if (is(i, "{")) {
      const std::size_t close = close_of(i, end);
      s.kind = Stmt::Kind::Block;
      s.body = parse_block(Range{i + 1, close});
      return close + 1;
    }
    if (is(i, "unchecked") && is(i + 1, "{")) return parse_statement(i + 1, end, s);
    if (is(i, "assembly")) {
      std::size_t j = i + 1;
      while (j < end && !is(j, "{")) ++j;
      s.kind = Stmt::Kind::Skip;
      return j < end ? close_of(j, end) + 1 : end;
    }
    if ((is(i, "if") || is(i, "while")) && is(i + 1, "(")) {
      const bool is_if = is(i, "if");
      const std::size_t close = close_of(i + 1, end);
      s.kind = is_if ? Stmt::Kind::If : Stmt::Kind::While;
      s.cond = Range{i + 2, close};
      Stmt then;
      std::size_t j = parse_statement(close + 1, end, then);
      s.body = as_body(std::move(then));
      if (is_if && j < end && is(j, "else")) {
        Stmt other;
        j = parse_statement(j + 1, end, other);
        s.has_else = true;
        s.else_body = as_body(std::move(other));
      }
      return j;
    }
    if (is(i, "do")) {
      Stmt body;
      std::size_t j = parse_statement(i + 1, end, body);
      s.kind = Stmt::Kind::DoWhile;
      s.body = as_body(std::move(body));
      if (is(j, "while") && is(j + 1, "(")) {
        const std::size_t close = close_of(j + 1, end);
        s.cond = Range{j + 2, close};
        j = close + 1;
      }
      if (is(j, ";")) ++j;
      return j;
    }
    if (is(i, "for") && is(i + 1, "(")) {
      const std::size_t close = close_of(i + 1, end);
      std::vector<std::size_t> semis;
      int depth = 0;
      for (std::size_t k = i + 2; k < close; ++k) {
        if (is(k, "(") || is(k, "[") || is(k, "{")) ++depth;
        if (is(k, ")") || is(k, "]") || is(k, "}")) --depth;
        if (depth == 0 && is(k, ";")) semis.push_back(k);
      }
      s.kind = Stmt::Kind::For;
      if (semis.size() >= 2) {
        s.init = Range{i + 2, semis[0]};
        s.cond = Range{semis[0] + 1, semis[1]};
        s.post = Range{semis[1] + 1, close};
      } else {
        s.cond = Range{i + 2, close};
      }
      Stmt body;
      std::size_t j = parse_statement(close + 1, end, body);
      s.body = as_body(std::move(body));
      return j;
    }
    if (is(i, "try")) {
      std::size_t j = i + 1;
      while (j < end && !is(j, "{") && !is(j, "returns")) {
        j = (is(j, "(") || is(j, "[")) ? close_of(j, end) + 1 : j + 1;
      }
      s.kind = Stmt::Kind::Try;
      s.cond = Range{i + 1, j};
      if (is(j, "returns") && is(j + 1, "(")) {
        const std::size_t close = close_of(j + 1, end);
        register_declarations(Range{j + 2, close});
        j = close + 1;
      }
      if (is(j, "{")) {
        const std::size_t close = close_of(j, end);
        s.body = parse_block(Range{j + 1, close});
        j = close + 1;
      }
      while (is(j, "catch")) {
        ++j;
        while (j < end && !is(j, "{")) {
          if (is(j, "(")) {
            const std::size_t close = close_of(j, end);
            register_declarations(Range{j + 1, close});
            j = close + 1;
          } else {
            ++j;
          }
        }
        if (j < end) {
          const std::size_t close = close_of(j, end);
          s.catches.push_back(parse_block(Range{j + 1, close}));
          j = close + 1;
        }
      }
      return j;
    }
    if (is(i, ";") || is(i, "else")) {
      s.kind = Stmt::Kind::Skip;
      return i + 1;
    }
    // Simple statement up to `;` at bracket depth zero.
    std::size_t j = i;
    while (j < end && !is(j, ";")) {
      j = (is(j, "(") || is(j, "[") || is(j, "{")) ? close_of(j, end) + 1 : j + 1;
    }
    s.kind = Stmt::Kind::Simple;
    s.simple = Range{i, std::min(j, end)};
    return std::min(j + 1, std::max(end, i + 1));
  }

  // ---- elements ------------------------------------------------------------

  std::size_t add_node(NodeCategory c, std::string type, std::string name) {
    const std::size_t id = g_.nodes.size();
    g_.nodes.push_back(CedgNode{id, c, std::move(type), std::move(name)});
    return id;
  }

  std::size_t invocation_node(const std::string& name, const std::string& type) {
    auto it = invocations_.find(name);
    if (it != invocations_.end()) return it->second;
    const std::size_t id = add_node(NodeCategory::Invocation, type, name);
    invocations_[name] = id;
    return id;
  }

  std::size_t variable_node(const std::string& name) {
    auto it = variables_.find(name);
    if (it != variables_.end()) return it->second;
    std::string type = "unknown";
    if (auto sys = kSystemVariables.find(name); sys != kSystemVariables.end()) {
      type = sys->second;
    } else if (auto local = local_types_.find(name); local != local_types_.end()) {
      type = local->second;
    } else if (auto state = unit_.state_vars.find(name); state != unit_.state_vars.end()) {
      type = state->second;
    }
    const std::size_t id = add_node(NodeCategory::Variable, type, name);
    variables_[name] = id;
    return id;
  }

  Element make_call(const std::string& callee, bool member, Range args, Range options) {
    std::string type;
    if (auto vis = visibility_of_.find(callee); vis != visibility_of_.end()) {
      type = vis->second;
    } else {
      type = member ? "external" : "internal";
    }
    Element e;
    e.invocation = true;
    e.node = callee == unit_.name && unit_.kind != UnitKind::Fallback
                 ? def_node_
                 : invocation_node(callee, type);
    if (!options.empty()) {
      auto opts = elements(options);
      e.args.insert(e.args.end(), opts.begin(), opts.end());
    }
    auto a = elements(args);
    e.args.insert(e.args.end(), a.begin(), a.end());
    return e;
  }

  // Postfix chain starting at identifier i (or a cast whose operand is a plain
  // chain). Appends the resulting element and returns the index after it.
  std::size_t postfix(std::size_t i, std::size_t end, std::vector<std::string> base,
                      std::vector<Element>& out) {
    std::vector<std::string> parts = std::move(base);
    bool absorbed = false;  // passed an index or call: later members don't extend the name
    std::string last_ident = parts.empty() ? std::string() : parts.back();
    std::optional<Element> call;
    std::size_t j = i;
    Range options;
    while (j < end) {
      if (is(j, ".") && ident(j + 1)) {
        last_ident = toks_[j + 1].text;
        if (!absorbed) parts.push_back(last_ident);
        j += 2;
      } else if (is(j, "[")) {
        absorbed = true;
        j = close_of(j, end) + 1;
      } else if (is(j, "{") && is(close_of(j, end) + 1, "(")) {
        options = Range{j + 1, close_of(j, end)};
        j = close_of(j, end) + 1;
      } else if (is(j, "(")) {
        const std::size_t close = close_of(j, end);
        const bool member = parts.size() > 1 || absorbed || call.has_value();
        call = make_call(last_ident, member, Range{j + 1, close}, options);
        options = Range{};
        absorbed = true;
        j = close + 1;
      } else {
        break;
      }
    }
    if (call) {
      out.push_back(std::move(*call));
    } else if (!parts.empty()) {
      std::string name;
      for (const auto& p : parts) name += (name.empty() ? "" : ".") + p;
      out.push_back(Element{false, variable_node(name), {}});
    }
    return j;
  }

  bool plain_chain(Range r) const {
    if (r.empty() || !ident(r.begin)) return false;
    for (std::size_t i = r.begin; i < r.end; ++i) {
      if ((i - r.begin) % 2 == 0 ? !ident(i) : !is(i, ".")) return false;
    }
    return (r.end - r.begin) % 2 == 1;
  }

  std::vector<Element> elements(Range r) {
    std::vector<Element> out;
    std::size_t i = r.begin;
    while (i < r.end) {
      const Token& t = toks_[i];
      if (t.kind == TokenKind::Punct) {
        if (t.text == "(" || t.text == "[" || t.text == "{") {
          const std::size_t close = close_of(i, r.end);
          auto inner = elements(Range{i + 1, close});
          out.insert(out.end(), inner.begin(), inner.end());
          i = close + 1;
        } else {
          ++i;
        }
        continue;
      }
      if (t.kind != TokenKind::Identifier) {
        ++i;
        continue;
      }
      // named argument or call option key: `{value: x}`, `f({to: a, amount: b})`
      if (is(i + 1, ":") && i > 0 && (is(i - 1, "{") || is(i - 1, ","))) {
        i += 2;
        continue;
      }
      if (kSkipWords.contains(t.text)) {
        ++i;
        continue;
      }
      if (t.text == "type" && is(i + 1, "(")) {
        i = close_of(i + 1, r.end) + 1;
        while (is(i, ".") && ident(i + 1)) i += 2;
        continue;
      }
      if (t.text == "new") {
        std::size_t j = i + 1;
        std::string type_name = ident(j) ? toks_[j].text : std::string();
        while (j < r.end && !is(j, "(")) ++j;
        if (j >= r.end) {
          i = j;
          continue;
        }
        const std::size_t close = close_of(j, r.end);
        if (type_name.empty() || is_elementary_type(type_name)) {
          auto inner = elements(Range{j + 1, close});
          out.insert(out.end(), inner.begin(), inner.end());
        } else {
          out.push_back(make_call(type_name, false, Range{j + 1, close}, Range{}));
        }
        i = close + 1;
        continue;
      }
      if (is_elementary_type(t.text)) {
        if (!is(i + 1, "(")) {  // a type inside a declaration
          ++i;
          continue;
        }
        const std::size_t close = close_of(i + 1, r.end);
        const Range inner{i + 2, close};
        const bool has_postfix = is(close + 1, ".") || is(close + 1, "[");
        if (has_postfix && plain_chain(inner)) {
          std::vector<std::string> base;
          for (std::size_t k = inner.begin; k < inner.end; k += 2) base.push_back(toks_[k].text);
          i = postfix(close + 1, r.end, std::move(base), out);
        } else if (has_postfix) {
          // Receiver expression of a member access: absorbed into the member.
          std::vector<std::string> base = {t.text};
          i = postfix(close + 1, r.end, std::move(base), out);
          if (!out.empty() && !out.back().invocation) {
            // `address(expr).balance` on a complex expression: keep the operands.
            out.pop_back();
            auto ops = elements(inner);
            out.insert(out.end(), ops.begin(), ops.end());
          }
        } else {
          auto ops = elements(inner);
          out.insert(out.end(), ops.begin(), ops.end());
          i = close + 1;
        }
        continue;
      }
      i = postfix(i + 1, r.end, {t.text}, out);
    }
    return out;
  }

  // ---- edges ---------------------------------------------------------------

  void emit(EdgeType type, std::size_t vs, std::size_t ve) {
    g_.edges.push_back(CedgEdge{vs, ve, type, g_.edges.size() + 1});
  }

  struct Pending {
    EdgeType type;
    std::size_t from;
  };

  // Transition into a statement whose first element is `first`.
  void enter(std::size_t first, std::optional<EdgeType> ctrl) {
    const std::size_t from = prev_;
    if (!pending_.empty()) {
      for (const Pending& p : pending_) emit(p.type, p.from, first);
      pending_.clear();
      if (ctrl) emit(*ctrl, from, first);
    } else {
      emit(ctrl.value_or(EdgeType::NS), from, first);
    }
  }

  void access_edges(const std::vector<Element>& elems) {
    for (const Element& e : elems) {
      if (e.invocation) {
        call_edges(e);
      } else {
        emit(EdgeType::AC, e.node, e.node);
      }
    }
  }

  void call_edges(const Element& call) {
    for (const Element& arg : call.args) {
      emit(EdgeType::AC, call.node, arg.node);
      if (arg.invocation) call_edges(arg);
    }
  }

  void assign_edges(const std::vector<Element>& lhs, const std::vector<Element>& rhs) {
    if (rhs.empty()) {
      for (const Element& l : lhs) emit(EdgeType::AS, l.node, l.node);
      return;
    }
    for (const Element& r : rhs) {
      for (const Element& l : lhs) emit(EdgeType::AS, l.node, r.node);
      if (r.invocation) call_edges(r);
    }
  }

  struct Analysis {
    std::optional<EdgeType> ctrl;
    std::vector<Element> lhs;  // assigned elements
    std::vector<Element> rhs;  // read elements
    enum class Mode { Access, Assign } mode = Mode::Access;

    std::vector<Element> all() const {
      std::vector<Element> v = lhs;
      v.insert(v.end(), rhs.begin(), rhs.end());
      return v;
    }
  };

  Analysis analyze(Range r) {
    Analysis a;
    if (r.empty()) return a;
    const std::string& head = toks_[r.begin].text;
    if ((head == "require" || head == "assert" || head == "revert") && is(r.begin + 1, "(")) {
      a.ctrl = head == "require" ? EdgeType::RQ : head == "assert" ? EdgeType::AT : EdgeType::RT;
      a.rhs = elements(Range{r.begin + 2, close_of(r.begin + 1, r.end)});
      return a;
    }
    if (head == "revert" || head == "throw") {
      a.ctrl = EdgeType::RT;
      a.rhs = elements(Range{r.begin + 1, r.end});
      return a;
    }
    if (head == "delete") {
      a.mode = Analysis::Mode::Assign;
      a.lhs = elements(Range{r.begin + 1, r.end});
      return a;
    }
    if (head == "return" || head == "emit") {
      a.rhs = elements(Range{r.begin + 1, r.end});
      return a;
    }
    // Top-level assignment operator.
    std::optional<std::size_t> op;
    bool step = false;
    for (std::size_t i = r.begin; i < r.end;) {
      if (is(i, "(") || is(i, "[") || is(i, "{")) {
        i = close_of(i, r.end) + 1;
        continue;
      }
      if (toks_[i].kind == TokenKind::Punct && kAssignOps.contains(toks_[i].text)) {
        op = i;
        break;
      }
      if (is(i, "++") || is(i, "--")) step = true;
      ++i;
    }
    if (op) {
      a.mode = Analysis::Mode::Assign;
      a.lhs = assign_targets(Range{r.begin, *op});
      a.rhs = elements(Range{*op + 1, r.end});
      return a;
    }
    if (declaration(r)) return a;  // `uint x;` declares without touching anything
    if (step) {
      a.mode = Analysis::Mode::Assign;
      a.lhs = elements(r);
      return a;
    }
    a.rhs = elements(r);
    return a;
  }

  std::vector<Element> assign_targets(Range lhs) {
    if (is(lhs.begin, "(") && close_of(lhs.begin, lhs.end) + 1 == lhs.end) {
      std::vector<Element> out;
      const std::size_t close = lhs.end - 1;
      std::size_t part = lhs.begin + 1;
      int depth = 0;
      for (std::size_t i = lhs.begin + 1; i <= close; ++i) {
        if (i < close && (is(i, "(") || is(i, "["))) ++depth;
        if (i < close && (is(i, ")") || is(i, "]"))) --depth;
        if (i == close || (depth == 0 && is(i, ","))) {
          auto sub = assign_targets(Range{part, i});
          out.insert(out.end(), sub.begin(), sub.end());
          part = i + 1;
        }
      }
      return out;
    }
    if (auto name = declaration(lhs)) {
      return {Element{false, variable_node(toks_[*name].text), {}}};
    }
    return elements(lhs);
  }

  void emit_dataflow(const Analysis& a) {
    if (a.mode == Analysis::Mode::Assign) {
      assign_edges(a.lhs, a.rhs);
    } else {
      access_edges(a.rhs);
    }
  }

  // Runs the statements of a block. Returns whether any element was visited.
  bool process_block(const std::vector<Stmt>& stmts, EdgeType entry) {
    const std::size_t depth = pending_.size();
    pending_.push_back(Pending{entry, prev_});
    for (const Stmt& s : stmts) process(s);
    if (pending_.size() > depth) {
      pending_.resize(depth);
      return false;
    }
    emit(EdgeType::BE, prev_, prev_);
    return true;
  }

  // Header elements of a control statement: transition, data flow, prev update.
  void control_header(EdgeType ctrl, const std::vector<Analysis>& parts) {
    std::vector<Element> all;
    for (const Analysis& p : parts) {
      auto v = p.all();
      all.insert(all.end(), v.begin(), v.end());
    }
    if (all.empty()) {
      emit(ctrl, prev_, prev_);
      return;
    }
    enter(all.front().node, ctrl);
    for (const Analysis& p : parts) emit_dataflow(p);
    prev_ = all.back().node;
  }

  void process(const Stmt& s) {
    switch (s.kind) {
      case Stmt::Kind::Skip:
        return;
      case Stmt::Kind::Block:
        process_block(s.body, EdgeType::BS);
        return;
      case Stmt::Kind::Simple: {
        Analysis a = analyze(s.simple);
        auto all = a.all();
        if (all.empty()) {
          if (a.ctrl) emit(*a.ctrl, prev_, prev_);
          return;
        }
        enter(all.front().node, a.ctrl);
        emit_dataflow(a);
        prev_ = all.back().node;
        return;
      }
      case Stmt::Kind::If:
      case Stmt::Kind::While: {
        const bool is_if = s.kind == Stmt::Kind::If;
        Analysis cond;
        cond.rhs = elements(s.cond);
        control_header(is_if ? EdgeType::IF : EdgeType::WH, {cond});
        const std::size_t cond_last = prev_;
        process_block(s.body, EdgeType::BS);
        if (s.has_else) {
          const std::size_t after_then = prev_;
          prev_ = cond_last;
          if (!process_block(s.else_body, EdgeType::IE)) prev_ = after_then;
        }
        return;
      }
      case Stmt::Kind::DoWhile: {
        process_block(s.body, EdgeType::WH);
        Analysis cond;
        cond.rhs = elements(s.cond);
        auto all = cond.all();
        if (!all.empty()) {
          enter(all.front().node, std::nullopt);
          emit_dataflow(cond);
          prev_ = all.back().node;
        }
        return;
      }
      case Stmt::Kind::For: {
        std::vector<Analysis> parts;
        parts.push_back(analyze(s.init));
        Analysis cond;
        cond.rhs = elements(s.cond);
        parts.push_back(std::move(cond));
        parts.push_back(analyze(s.post));
        control_header(EdgeType::FR, parts);
        process_block(s.body, EdgeType::BS);
        return;
      }
      case Stmt::Kind::Try: {
        Analysis expr;
        expr.rhs = elements(s.cond);
        control_header(EdgeType::TC, {expr});
        const std::size_t try_last = prev_;
        process_block(s.body, EdgeType::BS);
        for (const auto& c : s.catches) {
          const std::size_t after = prev_;
          prev_ = try_last;
          if (!process_block(c, EdgeType::TC)) prev_ = after;
        }
        return;
      }
    }
  }

  const FunctionUnit& unit_;
  std::vector<Token> toks_;
  std::vector<std::size_t> match_;
  std::map<std::string, std::string> visibility_of_;
  std::map<std::string, std::string> local_types_;
  std::map<std::string, std::size_t> invocations_;
  std::map<std::string, std::size_t> variables_;
  std::vector<Pending> pending_;
  std::optional<std::size_t> fallback_node_;
  bool has_fallback_ = false;
  std::size_t def_node_ = 0;
  std::size_t prev_ = 0;
  Cedg g_;
};

}  // namespace

Cedg build_cedg(const FunctionUnit& unit, const std::vector<FunctionUnit>& context) {
  return Builder(unit, context).build();
}

}  // namespace mmscs
