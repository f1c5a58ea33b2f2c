#include "mmscs/nn/layers.hpp"

#include <cmath>

#include "mmscs/error.hpp"

namespace mmscs::nn {

Matrix positional_encoding(std::size_t max_pos, std::size_t d) {
  if (d == 0 || d % 2 != 0)
    throw ConfigError("positional encoding needs an even, positive width (got " +
                      std::to_string(d) + ")");
  if (max_pos == 0) throw ConfigError("positional encoding needs max_pos >= 1");
  Matrix pe(static_cast<Eigen::Index>(max_pos), static_cast<Eigen::Index>(d));
  for (std::size_t pos = 0; pos < max_pos; ++pos) pe.row(static_cast<Eigen::Index>(pos)) = positional_row(pos, d);
  return pe;
}

Matrix positional_row(std::size_t pos, std::size_t d) {
  if (d == 0 || d % 2 != 0)
    throw ConfigError("positional encoding needs an even, positive width (got " +
                      std::to_string(d) + ")");
  Matrix row(1, static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < d / 2; ++i) {
    const double angle =
        static_cast<double>(pos) / std::pow(10000.0, static_cast<double>(2 * i) / static_cast<double>(d));
    row(0, static_cast<Eigen::Index>(2 * i)) = std::sin(angle);
    row(0, static_cast<Eigen::Index>(2 * i + 1)) = std::cos(angle);
  }
  return row;
}

Attention scaled_attention(const Var& q, const Var& k, const Var& v,
                           const std::vector<bool>& mask) {
  if (q.cols() != k.cols()) throw ConfigError("attention: query and key widths differ");
  if (k.rows() != v.rows()) throw ConfigError("attention: key and value counts differ");
  const double scale_by = 1.0 / std::sqrt(static_cast<double>(k.cols()));
  Var scores = scale(matmul(q, transpose(k)), scale_by);
  Var weights = masked_softmax_rows(scores, mask);
  return {matmul(weights, v), weights};
}

std::string head_param(const std::string& prefix, std::size_t j, const char* which) {
  return prefix + ".head" + std::to_string(j) + "." + which;
}

namespace {

void require_params(const Tape& tape, const std::vector<std::string>& names) {
  if (!tape.store()) throw ConfigError("tape has no parameter store");
  std::string missing;
  for (const auto& n : names) {
    if (!tape.store()->contains(n)) missing += (missing.empty() ? "" : ", ") + n;
  }
  if (!missing.empty()) throw ConfigError("missing parameters: " + missing);
}

}  // namespace

Var multi_head_attention(const Var& input, const std::string& prefix, std::size_t heads,
                         const std::vector<bool>& mask) {
  if (heads == 0) throw ConfigError("attention needs at least one head");
  Tape& t = *input.tape();
  std::vector<std::string> names;
  for (std::size_t j = 0; j < heads; ++j)
    for (const char* w : {"wq", "wk", "wv"}) names.push_back(head_param(prefix, j, w));
  require_params(t, names);

  std::vector<Var> outs;
  outs.reserve(heads);
  for (std::size_t j = 0; j < heads; ++j) {
    Var q = matmul(input, t.param(head_param(prefix, j, "wq")));
    Var k = matmul(input, t.param(head_param(prefix, j, "wk")));
    Var v = matmul(input, t.param(head_param(prefix, j, "wv")));
    outs.push_back(scaled_attention(q, k, v, mask).output);
  }
  return heads == 1 ? outs.front() : concat_cols(outs);
}

Var transformer_block(const Var& input, const std::string& prefix, std::size_t heads,
                      const std::vector<bool>& mask) {
  Tape& t = *input.tape();
  require_params(t, {prefix + ".ln1.gain", prefix + ".ln1.bias", prefix + ".ffn1.w",
                     prefix + ".ffn1.b", prefix + ".ffn2.w", prefix + ".ffn2.b",
                     prefix + ".ln2.gain", prefix + ".ln2.bias"});
  Var att = multi_head_attention(input, prefix + ".att", heads, mask);
  if (att.cols() != input.cols())
    throw ConfigError("attention width " + std::to_string(att.cols()) +
                      " does not match model width " + std::to_string(input.cols()));
  Var h = layer_norm_rows(add(input, att), t.param(prefix + ".ln1.gain"),
                          t.param(prefix + ".ln1.bias"));
  Var ff = dense(relu(dense(h, prefix + ".ffn1")), prefix + ".ffn2");
  return layer_norm_rows(add(h, ff), t.param(prefix + ".ln2.gain"),
                         t.param(prefix + ".ln2.bias"));
}

Var masked_mean_rows(const Var& x, const std::vector<bool>& mask) {
  if (mask.empty()) return mean_rows(x);
  if (mask.size() != static_cast<std::size_t>(x.rows()))
    throw ConfigError("mask length does not match row count");
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask[i]) keep.push_back(i);
  if (keep.empty()) throw NumericError("mean over a fully masked sequence");
  if (keep.size() == mask.size()) return mean_rows(x);
  return mean_rows(gather_rows(x, keep));
}

Var dense(const Var& x, const std::string& prefix) {
  Tape& t = *x.tape();
  return add_row(matmul(x, t.param(prefix + ".w")), t.param(prefix + ".b"));
}

Var lstm_sequence(const Var& inputs, const std::string& prefix) {
  Tape& t = *inputs.tape();
  require_params(t, {prefix + ".wx", prefix + ".wh", prefix + ".b"});
  if (inputs.rows() == 0) throw ConfigError("lstm needs at least one step");
  Var wx = t.param(prefix + ".wx");
  Var wh = t.param(prefix + ".wh");
  Var b = t.param(prefix + ".b");
  const Eigen::Index hidden = wh.rows();
  if (wx.cols() != 4 * hidden || wh.cols() != 4 * hidden)
    throw ConfigError("lstm weights must have 4 * hidden columns");

  Var h = t.constant(Matrix::Zero(1, hidden));
  Var c = t.constant(Matrix::Zero(1, hidden));
  for (Eigen::Index s = 0; s < inputs.rows(); ++s) {
    Var z = add(add_row(matmul(slice_rows(inputs, s, 1), wx), b), matmul(h, wh));
    Var i = sigmoid(slice_cols(z, 0, hidden));
    Var f = sigmoid(slice_cols(z, hidden, hidden));
    Var g = tanh(slice_cols(z, 2 * hidden, hidden));
    Var o = sigmoid(slice_cols(z, 3 * hidden, hidden));
    c = add(hadamard(f, c), hadamard(i, g));
    h = hadamard(o, tanh(c));
  }
  return h;
}

Var ranking_loss(const Var& code, const Var& pos, const Var& neg, double beta) {
  return hinge(add_scalar(sub(cosine(code, neg), cosine(code, pos)), beta));
}

void init_attention(ParameterStore& store, const std::string& prefix, std::size_t d,
                    std::size_t heads) {
  if (heads == 0 || d % heads != 0)
    throw ConfigError("width " + std::to_string(d) + " is not divisible by " +
                      std::to_string(heads) + " heads");
  const auto dk = static_cast<Eigen::Index>(d / heads);
  for (std::size_t j = 0; j < heads; ++j)
    for (const char* w : {"wq", "wk", "wv"})
      store.add_fan_in(head_param(prefix, j, w), static_cast<Eigen::Index>(d), dk);
}

void init_transformer(ParameterStore& store, const std::string& prefix, std::size_t d,
                      std::size_t heads, std::size_t ffn_mult) {
  const auto n = static_cast<Eigen::Index>(d);
  init_attention(store, prefix + ".att", d, heads);
  store.add_constant(prefix + ".ln1.gain", 1, n, 1.0);
  store.add_constant(prefix + ".ln1.bias", 1, n, 0.0);
  init_dense(store, prefix + ".ffn1", d, d * ffn_mult);
  init_dense(store, prefix + ".ffn2", d * ffn_mult, d);
  store.add_constant(prefix + ".ln2.gain", 1, n, 1.0);
  store.add_constant(prefix + ".ln2.bias", 1, n, 0.0);
}

void init_dense(ParameterStore& store, const std::string& prefix, std::size_t in,
                std::size_t out) {
  store.add_fan_in(prefix + ".w", static_cast<Eigen::Index>(in), static_cast<Eigen::Index>(out));
  store.add_constant(prefix + ".b", 1, static_cast<Eigen::Index>(out), 0.0);
}

void init_lstm(ParameterStore& store, const std::string& prefix, std::size_t in,
               std::size_t hidden) {
  const auto h = static_cast<Eigen::Index>(hidden);
  store.add_fan_in(prefix + ".wx", static_cast<Eigen::Index>(in), 4 * h);
  store.add_fan_in(prefix + ".wh", h, 4 * h);
  store.add_constant(prefix + ".b", 1, 4 * h, 0.0);
}

double cosine(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw ConfigError("cosine: vector widths differ");
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) throw NumericError("cosine of a zero vector is undefined");
  return a.dot(b) / (na * nb);
}

double ranking_loss(const Vector& code, const Vector& pos, const Vector& neg, double beta) {
  if (beta < 0.0) throw ConfigError("margin must be non-negative");
  return std::max(0.0, beta + cosine(code, neg) - cosine(code, pos));
}

}  // namespace mmscs::nn
