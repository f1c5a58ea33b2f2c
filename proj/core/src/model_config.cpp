#include "mmscs/model_config.hpp"

#include <nlohmann/json.hpp>

#include "mmscs/error.hpp"

namespace mmscs {

Modalities Modalities::parse(std::string_view list) {
  Modalities m{false, false, false, false};
  std::size_t pos = 0;
  while (pos <= list.size()) {
    const std::size_t comma = std::min(list.find(',', pos), list.size());
    std::string_view item = list.substr(pos, comma - pos);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if (item == "T") m.tokens = true;
    else if (item == "F") m.name = true;
    else if (item == "A") m.api = true;
    else if (item == "G") m.graph = true;
    else throw ConfigError("unknown modality '" + std::string(item) + "' (expected T, F, A or G)");
    pos = comma + 1;
  }
  if (!m.tokens && !m.name && !m.api && !m.graph) throw ConfigError("no modality enabled");
  return m;
}

std::string Modalities::to_string() const {
  std::string out;
  auto push = [&](bool on, const char* s) {
    if (!on) return;
    if (!out.empty()) out += ',';
    out += s;
  };
  push(tokens, "T");
  push(name, "F");
  push(api, "A");
  push(graph, "G");
  return out;
}

void ModelConfig::validate() const {
  auto positive = [](std::size_t v, const char* what) {
    if (v == 0) throw ConfigError(std::string(what) + " must be positive");
  };
  positive(dim, "dim");
  positive(heads, "heads");
  positive(graph_heads, "graph_heads");
  positive(out_dim, "out_dim");
  positive(caps.tokens, "token cap");
  positive(caps.name, "name cap");
  positive(caps.api, "api cap");
  positive(query_cap, "query cap");
  positive(max_nodes, "max_nodes");
  positive(ffn_mult, "ffn_mult");
  positive(max_order, "max_order");
  if (dim % 2 != 0) throw ConfigError("dim must be even for positional encoding");
  if (dim % heads != 0)
    throw ConfigError("dim " + std::to_string(dim) + " is not divisible by " +
                      std::to_string(heads) + " heads");
  if (!(margin >= 0.0)) throw ConfigError("margin must be non-negative");
  if (!modalities.tokens && !modalities.name && !modalities.api && !modalities.graph)
    throw ConfigError("no modality enabled");
}

std::string to_json(const ModelConfig& c) {
  nlohmann::ordered_json j;
  j["dim"] = c.dim;
  j["heads"] = c.heads;
  j["graph_heads"] = c.graph_heads;
  j["out_dim"] = c.out_dim;
  j["margin"] = c.margin;
  j["caps"] = {c.caps.tokens, c.caps.name, c.caps.api};
  j["query_cap"] = c.query_cap;
  j["max_nodes"] = c.max_nodes;
  j["hops"] = c.hops;
  j["ffn_mult"] = c.ffn_mult;
  j["max_order"] = c.max_order;
  j["modalities"] = c.modalities.to_string();
  return j.dump();
}

ModelConfig model_config_from_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    ModelConfig c;
    c.dim = j.at("dim").get<std::size_t>();
    c.heads = j.at("heads").get<std::size_t>();
    c.graph_heads = j.at("graph_heads").get<std::size_t>();
    c.out_dim = j.at("out_dim").get<std::size_t>();
    c.margin = j.at("margin").get<double>();
    const auto& caps = j.at("caps");
    c.caps = Caps{caps.at(0).get<std::size_t>(), caps.at(1).get<std::size_t>(),
                  caps.at(2).get<std::size_t>()};
    c.query_cap = j.at("query_cap").get<std::size_t>();
    c.max_nodes = j.at("max_nodes").get<std::size_t>();
    c.hops = j.at("hops").get<std::size_t>();
    c.ffn_mult = j.at("ffn_mult").get<std::size_t>();
    c.max_order = j.value("max_order", c.max_order);
    c.modalities = Modalities::parse(j.at("modalities").get<std::string>());
    c.validate();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad model config: ") + e.what());
  }
}

}  // namespace mmscs
