#include "mmscs/cedg.hpp"

#include <map>
#include <nlohmann/json.hpp>
#include <sstream>

#include "mmscs/error.hpp"
#include "mmscs/lexer.hpp"

namespace mmscs {

namespace {
constexpr std::array<std::string_view, kEdgeTypeCount> kEdgeNames = {
    "IF", "IE", "WH", "FR", "TC", "AT", "RT", "RQ", "BS", "BE", "NS", "AS", "AC", "FB"};
constexpr std::array<std::string_view, kNodeCategoryCount> kCategoryNames = {
    "Invocation", "Variable", "Fallback"};
}  // namespace

std::string_view to_string(NodeCategory c) { return kCategoryNames[static_cast<std::size_t>(c)]; }
std::string_view to_string(EdgeType t) { return kEdgeNames[static_cast<std::size_t>(t)]; }

NodeCategory node_category_from_string(std::string_view s) {
  for (std::size_t i = 0; i < kCategoryNames.size(); ++i) {
    if (kCategoryNames[i] == s) return static_cast<NodeCategory>(i);
  }
  throw Error("unknown node category '" + std::string(s) + "'");
}

EdgeType edge_type_from_string(std::string_view s) {
  for (std::size_t i = 0; i < kEdgeNames.size(); ++i) {
    if (kEdgeNames[i] == s) return static_cast<EdgeType>(i);
  }
  throw Error("unknown edge type '" + std::string(s) + "'");
}

std::vector<std::string> validate(const Cedg& g) {
  std::vector<std::string> out;
  std::size_t fallbacks = 0;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    const CedgNode& n = g.nodes[i];
    const std::string where = "node " + std::to_string(i);
    if (n.id != i) out.push_back(where + ": id " + std::to_string(n.id) + " is not dense");
    if (n.category == NodeCategory::Fallback) {
      if (++fallbacks > 1) out.push_back(where + ": more than one Fallback node");
      if (n.name != "0" || n.sol_type != "fallback")
        out.push_back(where + ": Fallback node must be [Fallback, fallback, 0]");
    }
  }
  std::map<std::size_t, std::size_t> order_count;
  for (std::size_t k = 0; k < g.edges.size(); ++k) {
    const CedgEdge& e = g.edges[k];
    const std::string where = "edge " + std::to_string(k);
    if (e.vs >= g.nodes.size()) out.push_back(where + ": V_s references missing node");
    if (e.ve >= g.nodes.size()) out.push_back(where + ": V_e references missing node");
    if (e.type == EdgeType::FB &&
        (e.vs >= g.nodes.size() || g.nodes[e.vs].category != NodeCategory::Fallback))
      out.push_back(where + ": FB edge must start at the Fallback node");
    if (e.order < 1 || e.order > g.edges.size())
      out.push_back(where + ": order " + std::to_string(e.order) + " outside 1.." +
                    std::to_string(g.edges.size()));
    ++order_count[e.order];
  }
  for (const auto& [order, count] : order_count) {
    if (count > 1) out.push_back("order " + std::to_string(order) + " is duplicated");
  }
  for (std::size_t o = 1; o <= g.edges.size(); ++o) {
    if (!order_count.contains(o)) out.push_back("order " + std::to_string(o) + " is missing");
  }
  return out;
}

std::string serialize(const Cedg& g) {
  nlohmann::ordered_json j;
  j["nodes"] = nlohmann::ordered_json::array();
  j["edges"] = nlohmann::ordered_json::array();
  for (const auto& n : g.nodes) {
    nlohmann::ordered_json node;
    node["id"] = n.id;
    node["category"] = std::string(to_string(n.category));
    node["type"] = n.sol_type;
    node["name"] = n.name;
    j["nodes"].push_back(std::move(node));
  }
  for (const auto& e : g.edges) {
    nlohmann::ordered_json edge;
    edge["vs"] = e.vs;
    edge["ve"] = e.ve;
    edge["type"] = std::string(to_string(e.type));
    edge["order"] = e.order;
    j["edges"].push_back(std::move(edge));
  }
  return j.dump();
}

Cedg deserialize(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const std::size_t offset = e.byte > 0 ? e.byte - 1 : 0;
    auto [line, col] = line_column(text, offset);
    throw ParseError("malformed CEDG JSON", offset, line, col);
  }
  Cedg g;
  try {
    for (const auto& n : j.at("nodes")) {
      g.nodes.push_back(CedgNode{n.at("id").get<std::size_t>(),
                                 node_category_from_string(n.at("category").get<std::string>()),
                                 n.at("type").get<std::string>(), n.at("name").get<std::string>()});
    }
    for (const auto& e : j.at("edges")) {
      g.edges.push_back(CedgEdge{e.at("vs").get<std::size_t>(), e.at("ve").get<std::size_t>(),
                                 edge_type_from_string(e.at("type").get<std::string>()),
                                 e.at("order").get<std::size_t>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("CEDG JSON schema violation: ") + e.what(), 0, 1, 1);
  } catch (const Error& e) {
    throw ParseError(std::string("CEDG JSON schema violation: ") + e.what(), 0, 1, 1);
  }
  return g;
}

std::string to_dot(const Cedg& g, std::string_view title) {
  std::ostringstream out;
  out << "digraph \"" << title << "\" {\n";
  for (const auto& n : g.nodes) {
    const char* shape = n.category == NodeCategory::Invocation ? "box"
                        : n.category == NodeCategory::Variable ? "ellipse"
                                                               : "diamond";
    out << "  n" << n.id << " [shape=" << shape << ", label=\"" << to_string(n.category) << "\\n"
        << n.sol_type << "\\n" << n.name << "\"];\n";
  }
  for (const auto& e : g.edges) {
    out << "  n" << e.vs << " -> n" << e.ve << " [label=\"" << to_string(e.type) << " " << e.order
        << "\"];\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace mmscs
