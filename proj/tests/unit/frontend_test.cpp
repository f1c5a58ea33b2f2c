#include <gtest/gtest.h>

#include <fstream>
#include <regex>
#include <sstream>

#include "mmscs/corpus.hpp"
#include "mmscs/error.hpp"
#include "mmscs/frontend.hpp"
#include "mmscs/synth.hpp"
#include "mmscs/vocabulary.hpp"

using namespace mmscs;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

FunctionUnit unit_from(const std::string& code, const std::string& name = "f") {
  FunctionUnit u;
  u.id = "t";
  u.name = name;
  u.source = code;
  u.span = {1, 1};
  return u;
}

}  // namespace

TEST(Extract, BurnWithLineCommentDocstring) {
  const std::string src =
      "contract T {\n"
      "  // destroy tokens\n"
      "  function burn(uint256 _value) public returns (bool success) {\n"
      "    require(balanceOf[msg.sender] >= _value);\n"
      "    balanceOf[msg.sender] -= _value;\n"
      "    return true;\n"
      "  }\n"
      "}\n";
  auto units = extract_functions(src, "burn.sol");
  ASSERT_EQ(units.size(), 1u);
  EXPECT_EQ(units[0].kind, UnitKind::Function);
  EXPECT_EQ(units[0].name, "burn");
  ASSERT_TRUE(units[0].docstring.has_value());
  EXPECT_EQ(*units[0].docstring, "destroy tokens");
  EXPECT_EQ(units[0].span.start, 3u);
  EXPECT_EQ(units[0].span.end, 7u);
}

TEST(Extract, FallbackHasEmptyName) {
  auto units = extract_functions("contract C { function() public payable { } }", "f.sol");
  ASSERT_EQ(units.size(), 1u);
  EXPECT_EQ(units[0].kind, UnitKind::Fallback);
  EXPECT_EQ(units[0].name, "");
}

TEST(Extract, EmptyFileGivesNoUnits) { EXPECT_TRUE(extract_functions("", "e.sol").empty()); }

TEST(Extract, NatSpecAndBlockComments) {
  const std::string src =
      "contract C {\n"
      "  /// @notice Pay the owner\n"
      "  /// @param amount how much\n"
      "  function pay(uint amount) public { owner.transfer(amount); }\n"
      "  /** Close the\n"
      "   *  sale */\n"
      "  modifier onlyOwner() { require(msg.sender == owner); _; }\n"
      "  // detached\n"
      "\n"
      "  function g() public { }\n"
      "}\n";
  auto units = extract_functions(src, "c.sol");
  ASSERT_EQ(units.size(), 3u);
  EXPECT_EQ(units[0].docstring.value_or("?"), "Pay the owner");
  EXPECT_EQ(units[1].kind, UnitKind::Modifier);
  EXPECT_EQ(units[1].docstring.value_or("?"), "Close the sale");
  EXPECT_FALSE(units[2].docstring.has_value());
}

TEST(Extract, NestedBlocksStayInsideTheirUnit) {
  const std::string src =
      "contract C { function a() public { if (x) { while (y) { z(); } } } function b() public {} }";
  auto units = extract_functions(src, "n.sol");
  ASSERT_EQ(units.size(), 2u);
  EXPECT_NE(units[0].source.find("z();"), std::string::npos);
  EXPECT_LE(units[0].byte_end, units[1].byte_begin);
}

TEST(Extract, UnbalancedBraceReportsOffset) {
  try {
    extract_functions("contract C { function a() public { }", "bad.sol");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.offset(), 11u);
    EXPECT_NE(std::string(e.what()).find("unclosed"), std::string::npos);
  }
  try {
    extract_functions("contract C { } }", "bad.sol");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.offset(), 15u);
  }
}

TEST(Extract, ByteRangesNeverOverlap) {
  auto units = generate_synthetic_corpus(60, 3);
  std::map<std::string, std::vector<std::pair<std::size_t, std::size_t>>> by_file;
  for (const auto& u : units) by_file[u.path].push_back({u.byte_begin, u.byte_end});
  for (auto& [path, ranges] : by_file) {
    std::sort(ranges.begin(), ranges.end());
    for (std::size_t i = 1; i < ranges.size(); ++i) EXPECT_LE(ranges[i - 1].second, ranges[i].first) << path;
  }
}

TEST(Extract, FixtureFile) {
  auto units = extract_functions(read_file(MMSCS_FIXTURES "/withdraw.sol"), "withdraw.sol");
  ASSERT_EQ(units.size(), 2u);
  EXPECT_EQ(units[0].name, "withdraw");
  EXPECT_EQ(units[0].span.start, 7u);
  EXPECT_EQ(units[1].kind, UnitKind::Fallback);
}

TEST(Split, CamelAndSnakeCase) {
  EXPECT_EQ(split_identifier("itemCount"), (std::vector<std::string>{"item", "count"}));
  EXPECT_EQ(split_identifier("item_count"), (std::vector<std::string>{"item", "count"}));
  EXPECT_EQ(split_identifier("_value"), (std::vector<std::string>{"value"}));
  EXPECT_EQ(split_identifier("ERC20Token"), (std::vector<std::string>{"erc20", "token"}));
  EXPECT_EQ(split_identifier("getHTTPResponse"), (std::vector<std::string>{"get", "http", "response"}));
}

TEST(Tokenize, NameApiAndCaps) {
  auto u = unit_from("function itemCount() public { msg.sender.transfer(x); send(y); }", "itemCount");
  auto b = tokenize_code(u);
  EXPECT_EQ(b.name, (std::vector<std::string>{"item", "count"}));
  EXPECT_EQ(b.api, (std::vector<std::string>{"transfer", "send"}));
  auto capped = tokenize_code(unit_from("x = 1;"), Caps{2, 6, 20});
  EXPECT_EQ(capped.tokens.size(), 1u);  // the literal is dropped
  auto three = tokenize_code(unit_from("xVal = yVal;"), Caps{2, 6, 20});
  EXPECT_EQ(three.tokens, (std::vector<std::string>{"x", "val"}));
}

TEST(Tokenize, WordsAreLowercaseAlnum) {
  const std::regex word("[a-z0-9]+");
  for (const auto& u : generate_synthetic_corpus(40, 11)) {
    auto b = tokenize_code(u);
    for (const auto* seq : {&b.tokens, &b.name, &b.api})
      for (const auto& w : *seq) EXPECT_TRUE(std::regex_match(w, word)) << w;
    EXPECT_LE(b.tokens.size(), 100u);
    EXPECT_LE(b.name.size(), 6u);
    EXPECT_LE(b.api.size(), 20u);
    EXPECT_EQ(tokenize_code(u), b);
  }
}

TEST(Tokenize, IdempotentOnLowercaseWords) {
  for (const char* w : {"token", "balance", "x1"}) {
    EXPECT_EQ(split_identifier(w), std::vector<std::string>{w});
  }
}

TEST(Normalize, Text) {
  EXPECT_EQ(normalize_words("Destroy  Tokens!"), (std::vector<std::string>{"destroy", "tokens"}));
}

TEST(Vocabulary, ThresholdAndOrder) {
  auto v = Vocabulary::build({{"a", "a", "a", "b"}}, 2);
  EXPECT_EQ(v.size(), 3u);
  EXPECT_EQ(v.index("a"), 2u);
  EXPECT_EQ(v.index("b"), Vocabulary::kUnk);
  EXPECT_EQ(Vocabulary::build({}, 2).size(), 2u);
  auto tie = Vocabulary::build({{"y", "x", "y", "x"}}, 1);
  EXPECT_EQ(tie.index("x"), 2u);
  EXPECT_EQ(tie.index("y"), 3u);
  EXPECT_EQ(Vocabulary::from_words(tie.words()), tie);
}

TEST(Deduplicate, CollapsesCopiesKeepsOrder) {
  auto u1 = unit_from("function a() { x = 1; }");
  auto copy = unit_from("function a()  {\n  x = 1;   }");
  auto u2 = unit_from("function b() { y = 2; }");
  auto commented = unit_from("function b() { /* note */ y = 2; // other\n}");
  auto out = deduplicate({u1, copy, u2});
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].source, u1.source);
  EXPECT_EQ(out[1].source, u2.source);
  EXPECT_EQ(deduplicate({u1}).size(), 1u);
  EXPECT_EQ(deduplicate({u2, commented}).size(), 1u);
  EXPECT_EQ(deduplicate(deduplicate({u1, copy, u2, commented})), deduplicate({u1, copy, u2, commented}));
}

TEST(Corpus, JsonLinesRoundTrip) {
  auto units = generate_synthetic_corpus(12, 5);
  std::stringstream s;
  write_corpus(s, units);
  EXPECT_EQ(read_corpus(s), units);
}
