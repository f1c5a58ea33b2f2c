#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "mmscs/frontend.hpp"

namespace mmscs {

/// Which inputs feed the fusion LSTM. A disabled modality contributes a zero step.
struct Modalities {
  bool tokens = true;  // T
  bool name = true;    // F
  bool api = true;     // A
  bool graph = true;   // G

  /// Parses a comma list such as "T,F,A,G" or "T". Throws ConfigError.
  static Modalities parse(std::string_view list);
  std::string to_string() const;
  bool operator==(const Modalities&) const = default;
};

struct ModelConfig {
  std::size_t dim = 64;          // d
  std::size_t heads = 8;         // J, text attention
  std::size_t graph_heads = 8;   // D, graph attention
  std::size_t out_dim = 768;     // d_out
  double margin = 0.05;          // beta
  Caps caps;
  std::size_t query_cap = 30;    // max words of a query or docstring
  std::size_t max_nodes = 32;    // N_max
  std::size_t hops = 1;          // graph propagation rounds
  std::size_t ffn_mult = 4;      // feed-forward inner width = ffn_mult * d
  std::size_t max_order = 256;   // edge orders beyond this share the last position
  Modalities modalities;

  std::size_t head_dim() const { return dim / heads; }  // d_k
  /// Throws ConfigError describing the first violated constraint.
  void validate() const;
  bool operator==(const ModelConfig&) const = default;
};

std::string to_json(const ModelConfig& config);
ModelConfig model_config_from_json(std::string_view text);

}  // namespace mmscs
