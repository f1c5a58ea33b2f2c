#include "mmscs/graph_encoder.hpp"

#include <algorithm>
#include <numeric>

#include "mmscs/error.hpp"
#include "mmscs/nn/layers.hpp"

namespace mmscs {

using nn::Var;

const std::vector<std::string>& sol_type_vocabulary() {
  static const std::vector<std::string> kTypes = {
      "<other>", "internal", "external", "public",  "private", "fallback", "unknown",
      "uint",    "int",      "address",  "bool",    "bytes",   "string",   "mapping",
      "uint[]",  "int[]",    "address[]", "bytes[]", "bool[]", "string[]"};
  return kTypes;
}

std::size_t sol_type_index(const std::string& sol_type) {
  const auto& types = sol_type_vocabulary();
  auto it = std::find(types.begin(), types.end(), sol_type);
  return it == types.end() ? 0 : static_cast<std::size_t>(it - types.begin());
}

void init_graph_params(nn::ParameterStore& store, const ModelConfig& config) {
  const auto d = static_cast<Eigen::Index>(config.dim);
  store.add_uniform("graph.category", static_cast<Eigen::Index>(kNodeCategoryCount), d, 1.0);
  store.add_uniform("graph.soltype", static_cast<Eigen::Index>(sol_type_vocabulary().size()), d, 1.0);
  store.add_uniform("graph.fallback_name", 1, d, 1.0);
  nn::init_dense(store, "graph.node", 3 * config.dim, config.dim);
  store.add_uniform("graph.edge_type", static_cast<Eigen::Index>(kEdgeTypeCount), d, 1.0);
  for (std::size_t r = 0; r < config.hops; ++r) {
    for (std::size_t m = 0; m < config.graph_heads; ++m) {
      const std::string p = "graph.hop" + std::to_string(r) + ".head" + std::to_string(m);
      store.add_fan_in(p + ".w1", 3 * d, d);
      store.add_fan_in(p + ".w2", d, 1);
    }
  }
  nn::init_dense(store, "graph.readout", config.max_nodes * config.dim, config.dim);
}

Var init_node_vector(nn::Tape& tape, const CedgNode& node, const Vocabulary& vocab) {
  Var category = nn::gather_rows(tape.param("graph.category"),
                                 {static_cast<std::size_t>(node.category)});
  Var type = nn::gather_rows(tape.param("graph.soltype"), {sol_type_index(node.sol_type)});
  Var name;
  if (node.category == NodeCategory::Fallback || node.name == "0") {
    name = tape.param("graph.fallback_name");
  } else {
    auto words = split_identifier(node.name);
    std::vector<std::size_t> ids = words.empty() ? std::vector<std::size_t>{Vocabulary::kUnk}
                                                 : vocab.indices(words);
    name = nn::mean_rows(nn::gather_rows(tape.param(kWordEmbedding), ids));
  }
  return nn::dense(nn::concat_cols({category, type, name}), "graph.node");
}

Var init_edge_vector(nn::Tape& tape, const CedgEdge& edge, const ModelConfig& config) {
  Var type = nn::gather_rows(tape.param("graph.edge_type"), {static_cast<std::size_t>(edge.type)});
  const std::size_t pos = std::min(edge.order, config.max_order);
  return nn::add(type, tape.constant(nn::positional_row(pos, config.dim)));
}

GraphState init_graph_state(nn::Tape& tape, const Cedg& g, const Vocabulary& vocab,
                            const ModelConfig& config) {
  GraphState s;
  s.nodes.reserve(g.nodes.size());
  for (const auto& n : g.nodes) s.nodes.push_back(init_node_vector(tape, n, vocab));
  s.edges.reserve(g.edges.size());
  for (const auto& e : g.edges) s.edges.push_back(init_edge_vector(tape, e, config));
  return s;
}

TripleOutput triple_forward(nn::Tape& tape, const Cedg& g, const GraphState& state,
                            std::size_t heads, std::size_t round) {
  if (heads == 0) throw ConfigError("graph attention needs at least one head");
  if (state.nodes.size() != g.nodes.size() || state.edges.size() != g.edges.size())
    throw ConfigError("graph state does not match the graph");
  TripleOutput out;
  out.nodes = state.nodes;
  out.alpha.assign(heads, std::vector<std::vector<double>>(g.nodes.size()));
  if (g.edges.empty()) return out;

  // Canonical triple order, so the position of an edge in the list never matters.
  std::vector<std::size_t> order(g.edges.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& x = g.edges[a];
    const auto& y = g.edges[b];
    return std::tie(x.order, x.vs, x.ve, x.type) < std::tie(y.order, y.vs, y.ve, y.type);
  });

  std::vector<std::size_t> vs;
  std::vector<std::size_t> ve;
  std::vector<Var> edge_rows;
  std::vector<std::vector<std::size_t>> outgoing(g.nodes.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto& e = g.edges[order[k]];
    if (e.vs >= g.nodes.size() || e.ve >= g.nodes.size())
      throw ConfigError("edge endpoint out of range");
    vs.push_back(e.vs);
    ve.push_back(e.ve);
    edge_rows.push_back(state.edges[order[k]]);
    outgoing[e.vs].push_back(k);
  }
  Var h = nn::concat_rows(state.nodes);
  Var triples = nn::concat_cols(
      {nn::gather_rows(h, vs), nn::gather_rows(h, ve), nn::concat_rows(edge_rows)});

  std::vector<Var> c(heads);
  std::vector<Var> b(heads);
  for (std::size_t m = 0; m < heads; ++m) {
    const std::string p = "graph.hop" + std::to_string(round) + ".head" + std::to_string(m);
    c[m] = nn::matmul(triples, tape.param(p + ".w1"));
    b[m] = nn::leaky_relu(nn::matmul(c[m], tape.param(p + ".w2")), 0.2);
  }

  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    if (outgoing[i].empty()) continue;
    Var total;
    for (std::size_t m = 0; m < heads; ++m) {
      Var scores = nn::transpose(nn::gather_rows(b[m], outgoing[i]));
      Var alpha = nn::masked_softmax_rows(scores);
      const auto& a = alpha.value();
      out.alpha[m][i].assign(a.data(), a.data() + a.size());
      Var head = nn::matmul(alpha, nn::gather_rows(c[m], outgoing[i]));
      total = m == 0 ? head : nn::add(total, head);
    }
    out.nodes[i] = nn::elu(nn::scale(total, 1.0 / static_cast<double>(heads)));
  }
  return out;
}

Var graph_readout(nn::Tape& tape, const std::vector<Var>& nodes, const ModelConfig& config) {
  const std::size_t used = std::min(nodes.size(), config.max_nodes);
  std::vector<Var> parts(nodes.begin(), nodes.begin() + static_cast<std::ptrdiff_t>(used));
  if (used < config.max_nodes) {
    parts.push_back(tape.constant(
        nn::Matrix::Zero(1, static_cast<Eigen::Index>((config.max_nodes - used) * config.dim))));
  }
  return nn::dense(nn::concat_cols(parts), "graph.readout");
}

Var encode_graph(nn::Tape& tape, const Cedg& g, const Vocabulary& vocab,
                 const ModelConfig& config) {
  GraphState state = init_graph_state(tape, g, vocab, config);
  for (std::size_t r = 0; r < config.hops; ++r) {
    state.nodes = triple_forward(tape, g, state, config.graph_heads, r).nodes;
  }
  return graph_readout(tape, state.nodes, config);
}

}  // namespace mmscs
