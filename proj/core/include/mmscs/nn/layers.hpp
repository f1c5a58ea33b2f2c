#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "mmscs/nn/tape.hpp"
#include "mmscs/nn/tensor.hpp"

namespace mmscs::nn {

/// Sinusoidal table: PE[pos,2i] = sin(pos / 10000^(2i/d)), PE[pos,2i+1] = cos(...).
/// Throws ConfigError for odd `d` or max_pos == 0.
Matrix positional_encoding(std::size_t max_pos, std::size_t d);
/// One row of the table above, for position `pos`.
Matrix positional_row(std::size_t pos, std::size_t d);

struct Attention {
  Var output;   // len_q x d_v
  Var weights;  // len_q x len_k, rows sum to 1 over unmasked keys
};

/// softmax(Q K^T / sqrt(d_k)) V. Keys with mask[i] == false get zero weight.
Attention scaled_attention(const Var& q, const Var& k, const Var& v,
                           const std::vector<bool>& mask = {});

/// Parameter names used by multi_head_attention for head `j`.
std::string head_param(const std::string& prefix, std::size_t j, const char* which);

/// Concatenation of `heads` attention heads over `input` (len x d). Each head
/// reads {prefix}.head{j}.wq/.wk/.wv of shape d x d_k.
Var multi_head_attention(const Var& input, const std::string& prefix, std::size_t heads,
                         const std::vector<bool>& mask = {});

/// Add&Norm(attention), then Add&Norm(ReLU feed-forward). Returns len x d.
Var transformer_block(const Var& input, const std::string& prefix, std::size_t heads,
                      const std::vector<bool>& mask = {});

/// Mean of the rows where mask is true (all rows when the mask is empty).
Var masked_mean_rows(const Var& x, const std::vector<bool>& mask = {});

/// x * W + b with {prefix}.w and {prefix}.b.
Var dense(const Var& x, const std::string& prefix);

/// Runs an LSTM (gate order i, f, g, o) over the rows of `inputs` and returns the
/// final hidden state, 1 x hidden. Reads {prefix}.wx, {prefix}.wh, {prefix}.b.
Var lstm_sequence(const Var& inputs, const std::string& prefix);

/// max(0, beta + cos(code, neg) - cos(code, pos)) as a 1 x 1 node.
Var ranking_loss(const Var& code, const Var& pos, const Var& neg, double beta);

// ---- parameter creation -----------------------------------------------------

void init_attention(ParameterStore& store, const std::string& prefix, std::size_t d,
                    std::size_t heads);
void init_transformer(ParameterStore& store, const std::string& prefix, std::size_t d,
                      std::size_t heads, std::size_t ffn_mult = 4);
void init_dense(ParameterStore& store, const std::string& prefix, std::size_t in,
                std::size_t out);
void init_lstm(ParameterStore& store, const std::string& prefix, std::size_t in,
               std::size_t hidden);

// ---- plain-value helpers ------------------------------------------------------

/// v1 . v2 / (|v1| |v2|). Throws NumericError on a zero vector or size mismatch.
double cosine(const Vector& a, const Vector& b);
double ranking_loss(const Vector& code, const Vector& pos, const Vector& neg, double beta);

}  // namespace mmscs::nn
