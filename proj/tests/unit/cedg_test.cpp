#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "mmscs/cedg.hpp"
#include "mmscs/corpus.hpp"
#include "mmscs/error.hpp"
#include "mmscs/frontend.hpp"
#include "mmscs/synth.hpp"

using namespace mmscs;

namespace {

std::vector<FunctionUnit> fixture_units() {
  std::ifstream in(MMSCS_FIXTURES "/withdraw.sol");
  std::stringstream s;
  s << in.rdbuf();
  return extract_functions(s.str(), "withdraw.sol");
}

Cedg single(const std::string& code) {
  auto units = extract_functions("contract C { " + code + " }", "c.sol");
  EXPECT_EQ(units.size(), 1u);
  return build_cedg(units.at(0), units);
}

bool has_edge(const Cedg& g, EdgeType t) {
  return std::any_of(g.edges.begin(), g.edges.end(), [t](const CedgEdge& e) { return e.type == t; });
}

}  // namespace

TEST(Cedg, WithdrawFixtureNodes) {
  auto units = fixture_units();
  const Cedg g = build_cedg(units[0], units);
  ASSERT_EQ(g.nodes.size(), 5u);
  EXPECT_EQ(g.nodes[0], (CedgNode{0, NodeCategory::Invocation, "internal", "withdraw"}));
  EXPECT_EQ(g.nodes[1].name, "amount");
  EXPECT_EQ(g.nodes[1].category, NodeCategory::Variable);
  EXPECT_EQ(g.nodes[2].name, "deposits");
  EXPECT_EQ(g.nodes[3].name, "transfer");
  EXPECT_EQ(g.nodes[3].category, NodeCategory::Invocation);
  EXPECT_EQ(g.nodes[4], (CedgNode{4, NodeCategory::Fallback, "fallback", "0"}));
  EXPECT_TRUE(validate(g).empty());
}

TEST(Cedg, WithdrawFixtureEdges) {
  auto units = fixture_units();
  const Cedg g = build_cedg(units[0], units);
  enum { I1, V1, V2, I2, F };
  using E = EdgeType;
  const std::vector<CedgEdge> expected = {
      {I1, V1, E::BS, 1}, {V1, V2, E::AS, 2}, {V2, V1, E::IF, 3}, {V1, V1, E::AC, 4},
      {V1, V2, E::BS, 5}, {V2, V2, E::AS, 6}, {V2, I2, E::NS, 7}, {I2, V1, E::AC, 8},
      {I2, I2, E::BE, 9}, {I2, I2, E::BE, 10}, {F, I1, E::FB, 11}, {F, I2, E::FB, 12}};
  EXPECT_EQ(g.edges, expected);
}

TEST(Cedg, EmptyBodyWithoutFallback) {
  const Cedg g = single("function f() public { }");
  ASSERT_EQ(g.nodes.size(), 1u);
  EXPECT_EQ(g.nodes[0].category, NodeCategory::Invocation);
  EXPECT_EQ(g.nodes[0].sol_type, "public");
  EXPECT_TRUE(g.edges.empty());
}

TEST(Cedg, RequireGuard) {
  const Cedg g = single("function g() public { require(x > 0); }");
  ASSERT_EQ(g.nodes.size(), 2u);
  EXPECT_EQ(g.nodes[1].name, "x");
  EXPECT_EQ(std::count_if(g.edges.begin(), g.edges.end(), [](auto& e) { return e.type == EdgeType::RQ; }), 1);
  EXPECT_TRUE(has_edge(g, EdgeType::BS));
  EXPECT_TRUE(has_edge(g, EdgeType::BE));
  EXPECT_TRUE(validate(g).empty());
}

TEST(Cedg, ControlEdgeTypes) {
  const Cedg g = single(
      "function h(uint n) public {\n"
      "  x = n; y = x;\n"
      "  for (uint i = 0; i < n; i++) { total += i; }\n"
      "  while (total > 10) { total -= 1; }\n"
      "  if (total == 0) { revert(); } else { assert(total > 0); }\n"
      "  try other.call() { x = 1; } catch { y = 2; }\n"
      "}");
  for (EdgeType t : {EdgeType::FR, EdgeType::WH, EdgeType::IF, EdgeType::IE, EdgeType::RT,
                     EdgeType::AT, EdgeType::TC, EdgeType::AS, EdgeType::NS})
    EXPECT_TRUE(has_edge(g, t)) << to_string(t);
  EXPECT_TRUE(validate(g).empty());
}

TEST(Cedg, TernaryOperandsAreElements) {
  const Cedg g = single("function t() public { r = flag ? left : right; }");
  std::set<std::string> names;
  for (const auto& n : g.nodes) names.insert(n.name);
  EXPECT_TRUE(names.contains("left"));
  EXPECT_TRUE(names.contains("right"));
}

TEST(Cedg, ModifierMentionsBecomeInvocations) {
  auto units = extract_functions(
      "contract C { modifier onlyOwner() { require(msg.sender == owner); _; }\n"
      "function f() public onlyOwner { x = 1; } }",
      "m.sol");
  ASSERT_EQ(units.size(), 2u);
  const Cedg g = build_cedg(units[1], units);
  EXPECT_TRUE(std::any_of(g.nodes.begin(), g.nodes.end(), [](auto& n) {
    return n.name == "onlyOwner" && n.category == NodeCategory::Invocation;
  }));
}

TEST(Cedg, GeneratedGraphsKeepInvariants) {
  auto units = generate_synthetic_corpus(80, 2);
  ContextIndex ctx(units);
  for (const auto& u : units) {
    const Cedg g = build_cedg(u, ctx.context_of(u));
    ASSERT_FALSE(g.nodes.empty());
    EXPECT_TRUE(validate(g).empty()) << u.id;
    std::vector<std::size_t> orders;
    for (const auto& e : g.edges) {
      orders.push_back(e.order);
      if (e.type == EdgeType::FB) EXPECT_EQ(g.nodes[e.vs].category, NodeCategory::Fallback);
    }
    std::sort(orders.begin(), orders.end());
    for (std::size_t i = 0; i < orders.size(); ++i) EXPECT_EQ(orders[i], i + 1);
    EXPECT_EQ(build_cedg(u, ctx.context_of(u)), g);
  }
}

TEST(Cedg, AddingStatementsNeverRemovesStructure) {
  const std::vector<std::string> stmts = {"a = b;", "if (a > 0) { c = a; }", "require(c != d);",
                                          "e.transfer(c);", "while (i < n) { i++; }"};
  std::size_t prev_nodes = 0, prev_edges = 0;
  for (std::size_t k = 0; k <= stmts.size(); ++k) {
    std::string body;
    for (std::size_t i = 0; i < k; ++i) body += stmts[i] + " ";
    const Cedg g = single("function f() public { " + body + "}");
    EXPECT_GE(g.nodes.size(), prev_nodes);
    EXPECT_GE(g.edges.size(), prev_edges);
    prev_nodes = g.nodes.size();
    prev_edges = g.edges.size();
  }
}

TEST(Validate, TwoFallbackNodes) {
  Cedg g;
  g.nodes = {{0, NodeCategory::Fallback, "fallback", "0"}, {1, NodeCategory::Fallback, "fallback", "0"}};
  EXPECT_EQ(validate(g).size(), 1u);
}

TEST(Validate, DuplicateAndGapInOrders) {
  Cedg g;
  g.nodes = {{0, NodeCategory::Invocation, "public", "f"}};
  g.edges = {{0, 0, EdgeType::BS, 1}, {0, 0, EdgeType::NS, 1}, {0, 0, EdgeType::BE, 3}};
  EXPECT_EQ(validate(g).size(), 2u);
}

TEST(Validate, DanglingEndpoint) {
  Cedg g;
  g.nodes = {{0, NodeCategory::Invocation, "public", "f"}};
  g.edges = {{0, 7, EdgeType::NS, 1}};
  EXPECT_FALSE(validate(g).empty());
}

TEST(Serialize, EmptyGraph) {
  EXPECT_EQ(serialize(Cedg{}), R"({"nodes":[],"edges":[]})");
  EXPECT_EQ(deserialize(serialize(Cedg{})), Cedg{});
}

TEST(Serialize, FixtureRoundTripIsByteStable) {
  auto units = fixture_units();
  const Cedg g = build_cedg(units[0], units);
  const std::string text = serialize(g);
  EXPECT_EQ(deserialize(text), g);
  EXPECT_EQ(serialize(deserialize(text)), text);
}

TEST(Serialize, TruncatedInputIsAParseError) {
  auto units = fixture_units();
  const std::string text = serialize(build_cedg(units[0], units));
  try {
    deserialize(text.substr(0, text.size() / 2));
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_GE(e.line(), 1u);
    EXPECT_GE(e.column(), 1u);
  }
}

TEST(Dot, MentionsEveryNode) {
  auto units = fixture_units();
  const std::string dot = to_dot(build_cedg(units[0], units));
  EXPECT_NE(dot.find("digraph"), std::string::npos);
  EXPECT_NE(dot.find("transfer"), std::string::npos);
}
