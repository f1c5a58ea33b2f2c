#pragma once

#include <string>
#include <vector>

#include "mmscs/cedg.hpp"
#include "mmscs/model_config.hpp"
#include "mmscs/nn/tape.hpp"
#include "mmscs/vocabulary.hpp"

namespace mmscs {

/// Name of the word-embedding table shared by every text input.
inline constexpr const char* kWordEmbedding = "embed.words";

/// Fixed type vocabulary for node solType lookups; index 0 is the catch-all.
const std::vector<std::string>& sol_type_vocabulary();
std::size_t sol_type_index(const std::string& sol_type);

/// Creates the graph-encoder parameters (not the shared word table).
void init_graph_params(nn::ParameterStore& store, const ModelConfig& config);

/// Per-node and per-edge inputs of the graph attention, each 1 x d.
struct GraphState {
  std::vector<nn::Var> nodes;
  std::vector<nn::Var> edges;
};

/// [category || solType || mean name-word embedding] projected to width d.
nn::Var init_node_vector(nn::Tape& tape, const CedgNode& node, const Vocabulary& vocab);
/// Edge-type embedding plus the positional encoding of the edge's order.
nn::Var init_edge_vector(nn::Tape& tape, const CedgEdge& edge, const ModelConfig& config);
GraphState init_graph_state(nn::Tape& tape, const Cedg& g, const Vocabulary& vocab,
                            const ModelConfig& config);

struct TripleOutput {
  std::vector<nn::Var> nodes;  // h'_i
  /// alpha[m][i]: attention of head m over node i's outgoing triples, sorted by
  /// edge order. Empty for nodes without triples.
  std::vector<std::vector<std::vector<double>>> alpha;
};

/// One round of edge-aware graph attention. For each head m and each triple
/// (h_vs, h_ve, e): c = [h_vs || h_ve || e] W1_m, b = LeakyReLU(c w2_m); alpha is
/// the softmax of b over the triples leaving vs, and
/// h'_vs = ELU(mean_m sum alpha c). Nodes with no outgoing triple keep h.
/// `round` selects the parameter set ("graph.hop{round}").
TripleOutput triple_forward(nn::Tape& tape, const Cedg& g, const GraphState& state,
                            std::size_t heads, std::size_t round = 0);

/// Concatenates the first N_max node vectors in id order, zero-pads the rest and
/// projects to width d.
nn::Var graph_readout(nn::Tape& tape, const std::vector<nn::Var>& nodes,
                      const ModelConfig& config);

/// Full pipeline: init state, `hops` rounds of triple_forward, readout.
nn::Var encode_graph(nn::Tape& tape, const Cedg& g, const Vocabulary& vocab,
                     const ModelConfig& config);

}  // namespace mmscs
