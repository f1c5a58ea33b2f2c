#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "mmscs/cedg.hpp"
#include "mmscs/frontend.hpp"
#include "mmscs/model_config.hpp"
#include "mmscs/nn/tape.hpp"
#include "mmscs/nn/tensor.hpp"
#include "mmscs/vocabulary.hpp"

namespace mmscs {

class EmbeddingProvider;

/// Configuration, vocabulary and parameters of the joint code/query model.
class Model {
 public:
  /// Fresh model with parameters drawn from `seed`.
  Model(ModelConfig config, Vocabulary vocab, std::uint64_t seed);
  /// Wraps existing parameters; throws ConfigError if any expected one is absent
  /// or has the wrong shape.
  Model(ModelConfig config, Vocabulary vocab, nn::ParameterStore params);

  static Model load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  const ModelConfig& config() const { return config_; }
  const Vocabulary& vocab() const { return vocab_; }
  const nn::ParameterStore& params() const { return params_; }
  nn::ParameterStore& params() { return params_; }

  bool operator==(const Model& other) const {
    return config_ == other.config_ && vocab_ == other.vocab_ && params_ == other.params_;
  }

 private:
  ModelConfig config_;
  Vocabulary vocab_;
  nn::ParameterStore params_;
};

/// Creates every parameter the model reads.
void init_model_params(nn::ParameterStore& store, const ModelConfig& config,
                       std::size_t vocab_size);

/// Word embeddings plus positional encoding through the transformer block
/// `prefix`, mean-pooled to 1 x d. An empty sequence gives a zero row.
nn::Var encode_sequence(nn::Tape& tape, const std::vector<std::string>& words,
                        const std::string& prefix, const Model& model);

/// v_c: the four modality vectors as a 4-step sequence through the fusion LSTM
/// and a dense layer, 1 x d_out. Disabled modalities are zero steps. Throws
/// ConfigError("empty code unit") when every enabled input is empty.
nn::Var encode_code(nn::Tape& tape, const TokenBundle& bundle, const Cedg& graph,
                    const Model& model);
/// v_d / v_q from already-normalized words, 1 x d_out.
nn::Var encode_text(nn::Tape& tape, const std::vector<std::string>& words, const Model& model);

/// Docstring/query words: normalize_words truncated at the query cap.
std::vector<std::string> query_words(std::string_view text, const ModelConfig& config);

nn::Vector encode_code(const TokenBundle& bundle, const Cedg& graph, const Model& model);
/// Throws ConfigError on empty text. With a provider the vector comes from it and
/// must have width d_out.
nn::Vector encode_query(std::string_view text, const Model& model,
                        EmbeddingProvider* provider = nullptr);

}  // namespace mmscs
