#include "mmscs/encoder.hpp"

#include <algorithm>
#include <cmath>

#include "mmscs/error.hpp"
#include "mmscs/graph_encoder.hpp"
#include "mmscs/nn/checkpoint.hpp"
#include "mmscs/nn/layers.hpp"
#include "mmscs/provider.hpp"

namespace mmscs {

using nn::Matrix;
using nn::Var;

void init_model_params(nn::ParameterStore& store, const ModelConfig& config,
                       std::size_t vocab_size) {
  config.validate();
  const auto d = static_cast<Eigen::Index>(config.dim);
  store.add_uniform(kWordEmbedding, static_cast<Eigen::Index>(vocab_size), d, 1.0);
  for (const char* m : {"text.T", "text.F", "text.A", "query"})
    nn::init_transformer(store, m, config.dim, config.heads, config.ffn_mult);
  init_graph_params(store, config);
  nn::init_lstm(store, "fusion.lstm", config.dim, config.out_dim);
  nn::init_dense(store, "fusion.out", config.out_dim, config.out_dim);
  nn::init_dense(store, "query.proj", config.dim, config.out_dim);
}

Model::Model(ModelConfig config, Vocabulary vocab, std::uint64_t seed)
    : config_(config), vocab_(std::move(vocab)), params_(seed) {
  init_model_params(params_, config_, vocab_.size());
}

Model::Model(ModelConfig config, Vocabulary vocab, nn::ParameterStore params)
    : config_(config), vocab_(std::move(vocab)), params_(std::move(params)) {
  nn::ParameterStore expected(0);
  init_model_params(expected, config_, vocab_.size());
  std::string problems;
  for (const auto& [name, m] : expected.entries()) {
    if (!params_.contains(name)) {
      problems += " missing " + name + ";";
    } else if (params_.at(name).rows() != m.rows() || params_.at(name).cols() != m.cols()) {
      problems += " wrong shape for " + name + ";";
    }
  }
  for (const auto& [name, m] : params_.entries())
    if (!expected.contains(name)) problems += " unexpected " + name + ";";
  if (!problems.empty()) throw ConfigError("parameters do not match the config:" + problems);
}

Model Model::load(const std::filesystem::path& path) {
  nn::Checkpoint ckpt = nn::load_checkpoint(path);
  return Model(model_config_from_json(ckpt.config_json), Vocabulary::from_words(ckpt.vocabulary),
               std::move(ckpt.params));
}

void Model::save(const std::filesystem::path& path) const {
  nn::save_checkpoint(path, nn::Checkpoint{to_json(config_), vocab_.words(), params_});
}

Var encode_sequence(nn::Tape& tape, const std::vector<std::string>& words,
                    const std::string& prefix, const Model& model) {
  const auto& cfg = model.config();
  if (words.empty()) return tape.constant(Matrix::Zero(1, static_cast<Eigen::Index>(cfg.dim)));
  Var x = nn::gather_rows(tape.param(kWordEmbedding), model.vocab().indices(words));
  x = nn::scale(x, std::sqrt(static_cast<double>(cfg.dim)));
  x = nn::add(x, tape.constant(nn::positional_encoding(words.size(), cfg.dim)));
  return nn::mean_rows(nn::transformer_block(x, prefix, cfg.heads));
}

Var encode_code(nn::Tape& tape, const TokenBundle& bundle, const Cedg& graph,
                const Model& model) {
  const auto& cfg = model.config();
  const auto& on = cfg.modalities;
  const bool any = (on.tokens && !bundle.tokens.empty()) || (on.name && !bundle.name.empty()) ||
                   (on.api && !bundle.api.empty()) || (on.graph && !graph.nodes.empty());
  if (!any) throw ConfigError("empty code unit");

  const Matrix zero = Matrix::Zero(1, static_cast<Eigen::Index>(cfg.dim));
  auto text = [&](bool enabled, const std::vector<std::string>& words, const char* prefix) {
    return enabled ? encode_sequence(tape, words, prefix, model) : tape.constant(zero);
  };
  Var vt = text(on.tokens, bundle.tokens, "text.T");
  Var vf = text(on.name, bundle.name, "text.F");
  Var va = text(on.api, bundle.api, "text.A");
  Var vg = on.graph && !graph.nodes.empty() ? encode_graph(tape, graph, model.vocab(), cfg)
                                            : tape.constant(zero);
  Var h = nn::lstm_sequence(nn::concat_rows({vt, vf, va, vg}), "fusion.lstm");
  return nn::dense(h, "fusion.out");
}

Var encode_text(nn::Tape& tape, const std::vector<std::string>& words, const Model& model) {
  if (words.empty()) throw ConfigError("empty query text");
  return nn::dense(encode_sequence(tape, words, "query", model), "query.proj");
}

std::vector<std::string> query_words(std::string_view text, const ModelConfig& config) {
  auto words = normalize_words(text);
  if (words.size() > config.query_cap) words.resize(config.query_cap);
  return words;
}

nn::Vector encode_code(const TokenBundle& bundle, const Cedg& graph, const Model& model) {
  nn::Tape tape(&model.params());
  return encode_code(tape, bundle, graph, model).value().row(0);
}

nn::Vector encode_query(std::string_view text, const Model& model, EmbeddingProvider* provider) {
  const auto words = query_words(text, model.config());
  if (words.empty()) throw ConfigError("empty query text");
  if (provider) {
    nn::Vector v = provider->embed(text);
    const auto expected = static_cast<Eigen::Index>(model.config().out_dim);
    if (v.size() != expected)
      throw ConfigError("provider returned width " + std::to_string(v.size()) + ", expected " +
                        std::to_string(expected));
    return v;
  }
  nn::Tape tape(&model.params());
  return encode_text(tape, words, model).value().row(0);
}

}  // namespace mmscs
