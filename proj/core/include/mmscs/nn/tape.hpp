#pragma once

#include <deque>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "mmscs/nn/tensor.hpp"

namespace mmscs::nn {

class Tape;

/// Handle to a value recorded on a Tape.
class Var {
 public:
  Var() = default;
  const Matrix& value() const;
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }
  std::size_t id() const { return id_; }
  Tape* tape() const { return tape_; }
  bool valid() const { return tape_ != nullptr; }

 private:
  friend class Tape;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}
  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

/// Reverse-mode autodiff over matrix-valued nodes. One tape per forward pass;
/// parameters are read by reference from a ParameterStore that must outlive it.
class Tape {
 public:
  /// Receives the gradient flowing into the node and the tape, and pushes
  /// contributions to its inputs with accumulate().
  using Backward = std::function<void(Tape&, const Matrix& grad)>;

  explicit Tape(const ParameterStore* store = nullptr) : store_(store) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Matrix value);
  /// Parameter node; repeated calls with one name return the same node.
  Var param(const std::string& name);

  /// Records an op. `inputs` decide whether the node needs a gradient.
  Var record(Matrix value, const std::vector<Var>& inputs, Backward backward);

  const Matrix& value(const Var& v) const;
  bool requires_grad(const Var& v) const { return nodes_[v.id()].requires_grad; }

  /// Seeds d(output)/d(output) = 1 on a 1x1 node and propagates.
  void backward(const Var& output);
  /// Gradient of the last backward() output w.r.t. `v` (zeros if unreached).
  Matrix grad(const Var& v) const;
  void accumulate(const Var& v, const Matrix& g);

  /// Gradients of every parameter touched by this tape.
  Gradients parameter_gradients() const;

  const ParameterStore* store() const { return store_; }
  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Matrix value;
    const Matrix* ref = nullptr;  // parameter value held by the store
    Matrix grad;
    bool has_grad = false;
    bool requires_grad = false;
    Backward backward;
    std::string param;
  };
  const ParameterStore* store_;
  std::deque<Node> nodes_;
  std::unordered_map<std::string, std::size_t> param_ids_;
};

// ---- differentiable primitives ----------------------------------------------

Var matmul(const Var& a, const Var& b);
Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var hadamard(const Var& a, const Var& b);
Var scale(const Var& a, double s);
Var add_scalar(const Var& a, double s);
/// Adds the 1 x c row `b` to every row of `a`.
Var add_row(const Var& a, const Var& b);
Var transpose(const Var& a);

Var relu(const Var& a);
Var leaky_relu(const Var& a, double slope = 0.2);
Var elu(const Var& a, double alpha = 1.0);
Var tanh(const Var& a);
Var sigmoid(const Var& a);

Var concat_cols(const std::vector<Var>& parts);
Var concat_rows(const std::vector<Var>& parts);
Var slice_cols(const Var& a, Eigen::Index start, Eigen::Index count);
Var slice_rows(const Var& a, Eigen::Index start, Eigen::Index count);
/// Rows of `table` selected by `indices` (embedding lookup).
Var gather_rows(const Var& table, const std::vector<std::size_t>& indices);
Var mean_rows(const Var& a);
Var sum(const Var& a);

/// Row-wise softmax. Columns with mask[c] == false receive exactly zero weight
/// (additive -inf before the exponential). Throws NumericError if every column
/// is masked. An empty mask means no masking.
Var masked_softmax_rows(const Var& scores, const std::vector<bool>& mask = {});

/// Row-wise (x - mean) / sqrt(var + eps) * gain + bias with 1 x c gain/bias.
Var layer_norm_rows(const Var& x, const Var& gain, const Var& bias, double eps = 1e-10);

/// Cosine similarity of two 1 x n rows, as a 1 x 1 node. Throws on a zero vector.
Var cosine(const Var& a, const Var& b);
/// max(0, x) on a 1 x 1 node.
Var hinge(const Var& a);

}  // namespace mmscs::nn
