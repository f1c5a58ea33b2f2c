#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "mmscs/frontend.hpp"

namespace mmscs {

enum class NodeCategory { Invocation, Variable, Fallback };

/// The fourteen edge types: control flow (IF..NS), data flow (AS, AC) and the
/// fallback relation (FB).
enum class EdgeType { IF, IE, WH, FR, TC, AT, RT, RQ, BS, BE, NS, AS, AC, FB };

inline constexpr std::size_t kEdgeTypeCount = 14;
inline constexpr std::size_t kNodeCategoryCount = 3;

std::string_view to_string(NodeCategory c);
std::string_view to_string(EdgeType t);
NodeCategory node_category_from_string(std::string_view s);
EdgeType edge_type_from_string(std::string_view s);

struct CedgNode {
  std::size_t id = 0;
  NodeCategory category = NodeCategory::Variable;
  std::string sol_type;  // visibility for invocations, declared type for variables
  std::string name;      // "0" for the fallback node

  bool operator==(const CedgNode&) const = default;
};

struct CedgEdge {
  std::size_t vs = 0;
  std::size_t ve = 0;
  EdgeType type = EdgeType::NS;
  std::size_t order = 1;

  bool operator==(const CedgEdge&) const = default;
};

/// Contract Elements Dependency Graph of one function-level unit.
struct Cedg {
  std::vector<CedgNode> nodes;
  std::vector<CedgEdge> edges;

  bool operator==(const Cedg&) const = default;
};

/// Builds the graph of `unit`. `context` holds the units of the same contract and
/// decides whether a fallback node exists; state-variable types come from
/// `unit.state_vars`.
Cedg build_cedg(const FunctionUnit& unit, const std::vector<FunctionUnit>& context);

/// Returns one message per violated invariant; empty means the graph is valid.
std::vector<std::string> validate(const Cedg& g);

/// Compact JSON: {"nodes":[{"id","category","type","name"}],"edges":[{"vs","ve","type","order"}]}
std::string serialize(const Cedg& g);
/// Throws ParseError with line/column on malformed text.
Cedg deserialize(std::string_view text);

std::string to_dot(const Cedg& g, std::string_view title = "cedg");

}  // namespace mmscs
