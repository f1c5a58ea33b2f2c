#include "mmscs/synth.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <string>

#include "mmscs/cedg.hpp"
#include "mmscs/corpus.hpp"
#include "mmscs/error.hpp"

namespace mmscs {

namespace {

struct Template {
  const char* code;  // {n} = noun, {N} = capitalized noun
  std::vector<const char*> docs;
};

const std::vector<Template>& templates() {
  static const std::vector<Template> kTemplates = {
      {"function transfer{N}(address _to, uint256 _amount) public returns (bool) {\n"
       "    require({n}Balance[msg.sender] >= _amount);\n"
       "    {n}Balance[msg.sender] -= _amount;\n"
       "    {n}Balance[_to] += _amount;\n"
       "    return true;\n"
       "}",
       {"transfer {n} to another address", "send {n} balance to a recipient",
        "move {n} from the caller to an account"}},
      {"function mint{N}(address _to, uint256 _amount) public {\n"
       "    require(msg.sender == owner);\n"
       "    total{N}Supply += _amount;\n"
       "    {n}Balance[_to] += _amount;\n"
       "}",
       {"mint new {n} for an address", "create {n} and add it to the supply",
        "issue fresh {n} to a holder"}},
      {"function burn{N}(uint256 _value) public {\n"
       "    require({n}Balance[msg.sender] >= _value);\n"
       "    {n}Balance[msg.sender] -= _value;\n"
       "    total{N}Supply -= _value;\n"
       "}",
       {"destroy {n} owned by the caller", "burn {n} and reduce the total supply",
        "remove {n} from circulation"}},
      {"function withdraw{N}() public {\n"
       "    uint amount = {n}Deposits[msg.sender];\n"
       "    if (amount > 0) {\n"
       "        {n}Deposits[msg.sender] = 0;\n"
       "        msg.sender.transfer(amount);\n"
       "    }\n"
       "}",
       {"withdraw the {n} deposit of the caller", "pay out {n} funds to the sender",
        "return deposited {n} ether to its owner"}},
      {"function pause{N}() public {\n"
       "    require(msg.sender == owner);\n"
       "    {n}Paused = true;\n"
       "}",
       {"pause {n} operations", "stop all {n} activity, owner only",
        "freeze the {n} contract"}},
      {"function count{N}(address[] _holders) public view returns (uint256 total) {\n"
       "    for (uint i = 0; i < _holders.length; i++) {\n"
       "        total += {n}Balance[_holders[i]];\n"
       "    }\n"
       "}",
       {"sum the {n} balance of many holders", "total {n} held by a list of addresses",
        "count {n} across several accounts"}},
      {"function set{N}Price(uint256 _price) public {\n"
       "    require(_price > 0);\n"
       "    {n}Price = _price;\n"
       "    emit {N}PriceChanged(_price);\n"
       "}",
       {"update the {n} price", "set a new price for {n}", "change what one {n} costs"}},
      {"function approve{N}(address _spender, uint256 _amount) public returns (bool) {\n"
       "    {n}Allowance[msg.sender][_spender] = _amount;\n"
       "    return true;\n"
       "}",
       {"allow a spender to use {n}", "approve a {n} allowance",
        "let another address spend the caller's {n}"}},
      {"function {n}BalanceOf(address _owner) public view returns (uint256) {\n"
       "    return {n}Balance[_owner];\n"
       "}",
       {"get the {n} balance of an owner", "read how many {n} an address holds",
        "query {n} holdings"}},
      {"function buy{N}() public payable {\n"
       "    require(msg.value >= {n}Price);\n"
       "    uint256 amount = msg.value / {n}Price;\n"
       "    {n}Balance[msg.sender] += amount;\n"
       "    owner.transfer(msg.value);\n"
       "}",
       {"buy {n} by paying ether", "purchase {n} with the sent value",
        "exchange ether for {n}"}},
      {"function distribute{N}(address[] _to, uint256 _each) public {\n"
       "    uint i = 0;\n"
       "    while (i < _to.length) {\n"
       "        {n}Balance[_to[i]] += _each;\n"
       "        i++;\n"
       "    }\n"
       "}",
       {"distribute {n} to several recipients", "airdrop equal {n} amounts",
        "give the same {n} amount to every address in a list"}},
      {"function() public payable {\n"
       "    {n}Deposits[msg.sender] += msg.value;\n"
       "}",
       {"accept ether as a {n} deposit", "fallback that records {n} payments",
        "receive plain ether transfers for {n}"}},
  };
  return kTemplates;
}

const std::vector<std::string> kNouns = {
    "token", "reward", "vote",   "ticket", "share",   "bond",  "loan",  "stake", "bid",
    "coupon", "credit", "badge", "item",   "asset",   "card",  "pet",   "land",  "song",
    "game",  "prize",  "order",  "license", "domain", "gem",   "point"};

std::string fill(std::string text, const std::string& noun) {
  std::string cap = noun;
  cap[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(cap[0])));
  for (const auto& [key, value] : {std::pair<std::string, std::string>{"{n}", noun}, {"{N}", cap}}) {
    for (std::size_t at = text.find(key); at != std::string::npos; at = text.find(key, at + value.size()))
      text.replace(at, key.size(), value);
  }
  return text;
}

std::string indent(const std::string& text) {
  std::string out = "    ";
  for (char c : text) {
    out += c;
    if (c == '\n') out += "    ";
  }
  return out;
}

}  // namespace

std::vector<FunctionUnit> generate_synthetic_corpus(std::size_t n, std::uint64_t seed) {
  if (n < 2) throw ConfigError("a synthetic corpus needs at least 2 units");
  std::mt19937_64 rng(seed);
  const auto& tpl = templates();

  // Every (template, noun) pair once; past that, nouns get a numeric suffix.
  std::vector<std::pair<std::size_t, std::string>> combos;
  for (std::size_t round = 0; combos.size() < n; ++round) {
    std::vector<std::pair<std::size_t, std::string>> batch;
    for (const auto& noun : kNouns)
      for (std::size_t t = 0; t < tpl.size(); ++t)
        batch.emplace_back(t, round == 0 ? noun : noun + std::to_string(round + 1));
    std::shuffle(batch.begin(), batch.end(), rng);
    combos.insert(combos.end(), batch.begin(), batch.end());
  }
  combos.resize(n);

  // One contract per noun, functions in template order.
  std::vector<std::string> nouns;
  std::map<std::string, std::vector<std::pair<std::size_t, std::string>>> members;
  for (const auto& [t, noun] : combos) {
    if (!members.contains(noun)) nouns.push_back(noun);
    members[noun].emplace_back(t, tpl[t].docs[std::uniform_int_distribution<std::size_t>(
                                         0, tpl[t].docs.size() - 1)(rng)]);
  }

  std::vector<FunctionUnit> units;
  for (const auto& noun : nouns) {
    auto& list = members[noun];
    std::sort(list.begin(), list.end());
    std::string src = fill(
        "pragma solidity ^0.4.24;\n\n"
        "contract {N}Market {\n"
        "    address owner;\n"
        "    mapping(address => uint256) {n}Balance;\n"
        "    mapping(address => uint256) {n}Deposits;\n"
        "    mapping(address => mapping(address => uint256)) {n}Allowance;\n"
        "    uint256 total{N}Supply;\n"
        "    uint256 {n}Price;\n"
        "    bool {n}Paused;\n\n"
        "    event {N}PriceChanged(uint256 price);\n",
        noun);
    for (const auto& [t, doc] : list) {
      src += "\n    /// " + fill(doc, noun) + "\n" + indent(fill(tpl[t].code, noun)) + "\n";
    }
    src += "}\n";
    const std::string path = fill("synth/{N}Market.sol", noun);
    auto parsed = extract_functions(src, path);
    if (parsed.size() != list.size())
      throw Error("synthetic contract " + path + " yielded " + std::to_string(parsed.size()) +
                  " units instead of " + std::to_string(list.size()));
    for (auto& u : parsed) units.push_back(std::move(u));
  }

  ContextIndex contexts(units);
  for (const auto& u : units) {
    const Cedg g = build_cedg(u, contexts.context_of(u));
    auto problems = validate(g);
    if (g.nodes.empty() || !problems.empty())
      throw Error("synthetic unit " + u.id + " produced an invalid graph: " +
                  (problems.empty() ? std::string("no nodes") : problems.front()));
  }
  return units;
}

}  // namespace mmscs
