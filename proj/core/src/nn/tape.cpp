#include "mmscs/nn/tape.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mmscs/error.hpp"

namespace mmscs::nn {

const Matrix& Var::value() const { return tape_->value(*this); }

Var Tape::constant(Matrix value) {
  Node n;
  n.value = std::move(value);
  nodes_.push_back(std::move(n));
  return Var(this, nodes_.size() - 1);
}

Var Tape::param(const std::string& name) {
  if (auto it = param_ids_.find(name); it != param_ids_.end()) return Var(this, it->second);
  if (!store_) throw ConfigError("tape has no parameter store");
  Node n;
  n.ref = &store_->at(name);
  n.requires_grad = true;
  n.param = name;
  nodes_.push_back(std::move(n));
  param_ids_.emplace(name, nodes_.size() - 1);
  return Var(this, nodes_.size() - 1);
}

Var Tape::record(Matrix value, const std::vector<Var>& inputs, Backward backward) {
  Node n;
  n.value = std::move(value);
  for (const Var& v : inputs) {
    if (v.tape() != this) throw ConfigError("mixing variables from different tapes");
    n.requires_grad = n.requires_grad || nodes_[v.id()].requires_grad;
  }
  if (n.requires_grad) n.backward = std::move(backward);
  nodes_.push_back(std::move(n));
  return Var(this, nodes_.size() - 1);
}

const Matrix& Tape::value(const Var& v) const {
  const Node& n = nodes_[v.id()];
  return n.ref ? *n.ref : n.value;
}

void Tape::accumulate(const Var& v, const Matrix& g) {
  Node& n = nodes_[v.id()];
  if (!n.requires_grad) return;
  if (n.has_grad) {
    n.grad += g;
  } else {
    n.grad = g;
    n.has_grad = true;
  }
}

void Tape::backward(const Var& output) {
  if (output.rows() != 1 || output.cols() != 1)
    throw ConfigError("backward() needs a scalar (1 x 1) output");
  for (Node& n : nodes_) {
    n.has_grad = false;
    n.grad.resize(0, 0);
  }
  accumulate(output, Matrix::Ones(1, 1));
  for (std::size_t i = nodes_.size(); i-- > 0;) {
    Node& n = nodes_[i];
    if (n.has_grad && n.backward) n.backward(*this, n.grad);
  }
}

Matrix Tape::grad(const Var& v) const {
  const Node& n = nodes_[v.id()];
  if (n.has_grad) return n.grad;
  const Matrix& val = value(v);
  return Matrix::Zero(val.rows(), val.cols());
}

Gradients Tape::parameter_gradients() const {
  Gradients out;
  for (const auto& [name, id] : param_ids_) {
    const Node& n = nodes_[id];
    out.emplace(name, n.has_grad ? n.grad : Matrix::Zero(n.ref->rows(), n.ref->cols()));
  }
  return out;
}

namespace {

void require_same_shape(const Var& a, const Var& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ConfigError(std::string(op) + ": shape mismatch " + std::to_string(a.rows()) + "x" +
                      std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                      std::to_string(b.cols()));
  }
}

template <typename F, typename D>
Var elementwise(const Var& a, F f, D dfdx) {
  Tape& t = *a.tape();
  Matrix out = a.value().unaryExpr(f);
  return t.record(std::move(out), {a}, [a, dfdx](Tape& tape, const Matrix& g) {
    tape.accumulate(a, g.cwiseProduct(a.value().unaryExpr(dfdx)));
  });
}

}  // namespace

Var matmul(const Var& a, const Var& b) {
  if (a.cols() != b.rows()) {
    throw ConfigError("matmul: inner dimensions " + std::to_string(a.cols()) + " and " +
                      std::to_string(b.rows()) + " differ");
  }
  Tape& t = *a.tape();
  Matrix out = a.value() * b.value();
  return t.record(std::move(out), {a, b}, [a, b](Tape& tape, const Matrix& g) {
    if (tape.requires_grad(a)) tape.accumulate(a, g * b.value().transpose());
    if (tape.requires_grad(b)) tape.accumulate(b, a.value().transpose() * g);
  });
}

Var add(const Var& a, const Var& b) {
  require_same_shape(a, b, "add");
  Tape& t = *a.tape();
  return t.record(a.value() + b.value(), {a, b}, [a, b](Tape& tape, const Matrix& g) {
    tape.accumulate(a, g);
    tape.accumulate(b, g);
  });
}

Var sub(const Var& a, const Var& b) {
  require_same_shape(a, b, "sub");
  Tape& t = *a.tape();
  return t.record(a.value() - b.value(), {a, b}, [a, b](Tape& tape, const Matrix& g) {
    tape.accumulate(a, g);
    if (tape.requires_grad(b)) tape.accumulate(b, -g);
  });
}

Var hadamard(const Var& a, const Var& b) {
  require_same_shape(a, b, "hadamard");
  Tape& t = *a.tape();
  return t.record(a.value().cwiseProduct(b.value()), {a, b},
                  [a, b](Tape& tape, const Matrix& g) {
                    if (tape.requires_grad(a)) tape.accumulate(a, g.cwiseProduct(b.value()));
                    if (tape.requires_grad(b)) tape.accumulate(b, g.cwiseProduct(a.value()));
                  });
}

Var scale(const Var& a, double s) {
  Tape& t = *a.tape();
  return t.record(a.value() * s, {a},
                  [a, s](Tape& tape, const Matrix& g) { tape.accumulate(a, g * s); });
}

Var add_scalar(const Var& a, double s) {
  Tape& t = *a.tape();
  Matrix out = a.value().array() + s;
  return t.record(std::move(out), {a}, [a](Tape& tape, const Matrix& g) { tape.accumulate(a, g); });
}

Var add_row(const Var& a, const Var& b) {
  if (b.rows() != 1 || b.cols() != a.cols()) throw ConfigError("add_row: bias must be 1 x cols");
  Tape& t = *a.tape();
  Matrix out = a.value();
  out.rowwise() += b.value().row(0);
  return t.record(std::move(out), {a, b}, [a, b](Tape& tape, const Matrix& g) {
    tape.accumulate(a, g);
    if (tape.requires_grad(b)) tape.accumulate(b, g.colwise().sum());
  });
}

Var transpose(const Var& a) {
  Tape& t = *a.tape();
  Matrix out = a.value().transpose();
  return t.record(std::move(out), {a},
                  [a](Tape& tape, const Matrix& g) { tape.accumulate(a, g.transpose()); });
}

Var relu(const Var& a) {
  return elementwise(
      a, [](double x) { return x > 0.0 ? x : 0.0; }, [](double x) { return x > 0.0 ? 1.0 : 0.0; });
}

Var leaky_relu(const Var& a, double slope) {
  return elementwise(
      a, [slope](double x) { return x > 0.0 ? x : slope * x; },
      [slope](double x) { return x > 0.0 ? 1.0 : slope; });
}

Var elu(const Var& a, double alpha) {
  return elementwise(
      a, [alpha](double x) { return x > 0.0 ? x : alpha * std::expm1(x); },
      [alpha](double x) { return x > 0.0 ? 1.0 : alpha * std::exp(x); });
}

Var tanh(const Var& a) {
  Tape& t = *a.tape();
  Matrix out = a.value().array().tanh();
  Matrix d = 1.0 - out.array().square();
  return t.record(std::move(out), {a}, [a, d](Tape& tape, const Matrix& g) {
    tape.accumulate(a, g.cwiseProduct(d));
  });
}

Var sigmoid(const Var& a) {
  Tape& t = *a.tape();
  Matrix out = (1.0 + (-a.value().array()).exp()).inverse();
  Matrix d = out.array() * (1.0 - out.array());
  return t.record(std::move(out), {a}, [a, d](Tape& tape, const Matrix& g) {
    tape.accumulate(a, g.cwiseProduct(d));
  });
}

Var concat_cols(const std::vector<Var>& parts) {
  if (parts.empty()) throw ConfigError("concat_cols: no inputs");
  Tape& t = *parts.front().tape();
  const Eigen::Index rows = parts.front().rows();
  Eigen::Index cols = 0;
  for (const Var& p : parts) {
    if (p.rows() != rows) throw ConfigError("concat_cols: row counts differ");
    cols += p.cols();
  }
  Matrix out(rows, cols);
  Eigen::Index at = 0;
  for (const Var& p : parts) {
    out.middleCols(at, p.cols()) = p.value();
    at += p.cols();
  }
  return t.record(std::move(out), parts, [parts](Tape& tape, const Matrix& g) {
    Eigen::Index offset = 0;
    for (const Var& p : parts) {
      if (tape.requires_grad(p)) tape.accumulate(p, g.middleCols(offset, p.cols()));
      offset += p.cols();
    }
  });
}

Var concat_rows(const std::vector<Var>& parts) {
  if (parts.empty()) throw ConfigError("concat_rows: no inputs");
  Tape& t = *parts.front().tape();
  const Eigen::Index cols = parts.front().cols();
  Eigen::Index rows = 0;
  for (const Var& p : parts) {
    if (p.cols() != cols) throw ConfigError("concat_rows: column counts differ");
    rows += p.rows();
  }
  Matrix out(rows, cols);
  Eigen::Index at = 0;
  for (const Var& p : parts) {
    out.middleRows(at, p.rows()) = p.value();
    at += p.rows();
  }
  return t.record(std::move(out), parts, [parts](Tape& tape, const Matrix& g) {
    Eigen::Index offset = 0;
    for (const Var& p : parts) {
      if (tape.requires_grad(p)) tape.accumulate(p, g.middleRows(offset, p.rows()));
      offset += p.rows();
    }
  });
}

Var slice_cols(const Var& a, Eigen::Index start, Eigen::Index count) {
  if (start < 0 || count < 0 || start + count > a.cols()) throw ConfigError("slice_cols: out of range");
  Tape& t = *a.tape();
  Matrix out = a.value().middleCols(start, count);
  return t.record(std::move(out), {a}, [a, start, count](Tape& tape, const Matrix& g) {
    Matrix full = Matrix::Zero(a.rows(), a.cols());
    full.middleCols(start, count) = g;
    tape.accumulate(a, full);
  });
}

Var slice_rows(const Var& a, Eigen::Index start, Eigen::Index count) {
  if (start < 0 || count < 0 || start + count > a.rows()) throw ConfigError("slice_rows: out of range");
  Tape& t = *a.tape();
  Matrix out = a.value().middleRows(start, count);
  return t.record(std::move(out), {a}, [a, start, count](Tape& tape, const Matrix& g) {
    Matrix full = Matrix::Zero(a.rows(), a.cols());
    full.middleRows(start, count) = g;
    tape.accumulate(a, full);
  });
}

Var gather_rows(const Var& table, const std::vector<std::size_t>& indices) {
  Tape& t = *table.tape();
  const Matrix& src = table.value();
  Matrix out(static_cast<Eigen::Index>(indices.size()), src.cols());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] >= static_cast<std::size_t>(src.rows()))
      throw ConfigError("gather_rows: index " + std::to_string(indices[i]) + " out of range");
    out.row(static_cast<Eigen::Index>(i)) = src.row(static_cast<Eigen::Index>(indices[i]));
  }
  return t.record(std::move(out), {table}, [table, indices](Tape& tape, const Matrix& g) {
    Matrix full = Matrix::Zero(table.rows(), table.cols());
    for (std::size_t i = 0; i < indices.size(); ++i)
      full.row(static_cast<Eigen::Index>(indices[i])) += g.row(static_cast<Eigen::Index>(i));
    tape.accumulate(table, full);
  });
}

Var mean_rows(const Var& a) {
  if (a.rows() == 0) throw ConfigError("mean_rows: empty input");
  Tape& t = *a.tape();
  const double n = static_cast<double>(a.rows());
  Matrix out = a.value().colwise().sum() / n;
  return t.record(std::move(out), {a}, [a, n](Tape& tape, const Matrix& g) {
    Matrix full = g.replicate(a.rows(), 1) / n;
    tape.accumulate(a, full);
  });
}

Var sum(const Var& a) {
  Tape& t = *a.tape();
  Matrix out(1, 1);
  out(0, 0) = a.value().sum();
  return t.record(std::move(out), {a}, [a](Tape& tape, const Matrix& g) {
    tape.accumulate(a, Matrix::Constant(a.rows(), a.cols(), g(0, 0)));
  });
}

Var masked_softmax_rows(const Var& scores, const std::vector<bool>& mask) {
  const Matrix& s = scores.value();
  if (!mask.empty() && mask.size() != static_cast<std::size_t>(s.cols()))
    throw ConfigError("softmax mask length " + std::to_string(mask.size()) +
                      " does not match key count " + std::to_string(s.cols()));
  if (!mask.empty() && std::none_of(mask.begin(), mask.end(), [](bool b) { return b; }))
    throw NumericError("softmax over a fully masked row is undefined");
  Matrix out(s.rows(), s.cols());
  for (Eigen::Index r = 0; r < s.rows(); ++r) {
    double max = -std::numeric_limits<double>::infinity();
    for (Eigen::Index c = 0; c < s.cols(); ++c) {
      if (mask.empty() || mask[static_cast<std::size_t>(c)]) max = std::max(max, s(r, c));
    }
    double total = 0.0;
    for (Eigen::Index c = 0; c < s.cols(); ++c) {
      const bool keep = mask.empty() || mask[static_cast<std::size_t>(c)];
      out(r, c) = keep ? std::exp(s(r, c) - max) : 0.0;
      total += out(r, c);
    }
    out.row(r) /= total;
  }
  Tape& t = *scores.tape();
  Matrix y = out;
  return t.record(std::move(out), {scores}, [scores, y](Tape& tape, const Matrix& g) {
    Matrix dot = (g.cwiseProduct(y)).rowwise().sum();
    Matrix ds = y.cwiseProduct(g - dot.replicate(1, y.cols()));
    tape.accumulate(scores, ds);
  });
}

Var layer_norm_rows(const Var& x, const Var& gain, const Var& bias, double eps) {
  const Matrix& v = x.value();
  const Eigen::Index n = v.cols();
  if (gain.rows() != 1 || gain.cols() != n || bias.rows() != 1 || bias.cols() != n)
    throw ConfigError("layer_norm_rows: gain/bias must be 1 x cols");
  Matrix xhat(v.rows(), n);
  Matrix inv_std(v.rows(), 1);
  for (Eigen::Index r = 0; r < v.rows(); ++r) {
    const double mean = v.row(r).mean();
    const double var = (v.row(r).array() - mean).square().mean();
    inv_std(r, 0) = 1.0 / std::sqrt(var + eps);
    xhat.row(r) = (v.row(r).array() - mean) * inv_std(r, 0);
  }
  Matrix out = xhat.array().rowwise() * gain.value().row(0).array();
  out.rowwise() += bias.value().row(0);
  Tape& t = *x.tape();
  return t.record(std::move(out), {x, gain, bias},
                  [x, gain, bias, xhat, inv_std, n](Tape& tape, const Matrix& g) {
                    if (tape.requires_grad(gain))
                      tape.accumulate(gain, g.cwiseProduct(xhat).colwise().sum());
                    if (tape.requires_grad(bias)) tape.accumulate(bias, g.colwise().sum());
                    if (!tape.requires_grad(x)) return;
                    Matrix dxhat = g.array().rowwise() * gain.value().row(0).array();
                    Matrix dx(dxhat.rows(), n);
                    const double dn = static_cast<double>(n);
                    for (Eigen::Index r = 0; r < dxhat.rows(); ++r) {
                      const double mean_d = dxhat.row(r).mean();
                      const double mean_dx = dxhat.row(r).cwiseProduct(xhat.row(r)).sum() / dn;
                      dx.row(r) = inv_std(r, 0) * (dxhat.row(r).array() - mean_d -
                                                   xhat.row(r).array() * mean_dx);
                    }
                    tape.accumulate(x, dx);
                  });
}

Var cosine(const Var& a, const Var& b) {
  require_same_shape(a, b, "cosine");
  if (a.rows() != 1) throw ConfigError("cosine: expects 1 x n rows");
  const double na = a.value().norm();
  const double nb = b.value().norm();
  if (na == 0.0 || nb == 0.0) throw NumericError("cosine of a zero vector is undefined");
  const double dot = a.value().row(0).dot(b.value().row(0));
  const double c = dot / (na * nb);
  Matrix out(1, 1);
  out(0, 0) = c;
  Tape& t = *a.tape();
  return t.record(std::move(out), {a, b}, [a, b, na, nb, c](Tape& tape, const Matrix& g) {
    const double gv = g(0, 0);
    if (tape.requires_grad(a))
      tape.accumulate(a, gv * (b.value() / (na * nb) - c * a.value() / (na * na)));
    if (tape.requires_grad(b))
      tape.accumulate(b, gv * (a.value() / (na * nb) - c * b.value() / (nb * nb)));
  });
}

Var hinge(const Var& a) {
  if (a.rows() != 1 || a.cols() != 1) throw ConfigError("hinge: expects a 1 x 1 input");
  return relu(a);
}

}  // namespace mmscs::nn
