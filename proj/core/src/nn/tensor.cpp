#include "mmscs/nn/tensor.hpp"

#include <cmath>
#include <cstring>

#include "mmscs/error.hpp"

namespace mmscs::nn {

Tensor Tensor::from_matrix(const Matrix& m) {
  Tensor t;
  t.shape = {static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols())};
  t.data.assign(m.data(), m.data() + m.size());
  return t;
}

Matrix Tensor::to_matrix() const {
  if (data.size() != element_count()) throw FormatError("tensor payload does not match shape", 0);
  Eigen::Index rows = 1;
  Eigen::Index cols = 1;
  if (shape.size() == 1) {
    cols = static_cast<Eigen::Index>(shape[0]);
  } else if (shape.size() == 2) {
    rows = static_cast<Eigen::Index>(shape[0]);
    cols = static_cast<Eigen::Index>(shape[1]);
  } else if (!shape.empty()) {
    throw FormatError("only rank <= 2 tensors map to matrices", 0);
  }
  Matrix m(rows, cols);
  std::copy(data.begin(), data.end(), m.data());
  return m;
}

std::size_t Tensor::element_count() const {
  std::size_t n = 1;
  for (auto s : shape) n *= s;
  return n;
}

ParameterStore::ParameterStore(std::uint64_t seed) : seed_(seed), rng_(seed) {}

Matrix& ParameterStore::add(const std::string& name, Matrix value) {
  auto [it, inserted] = params_.emplace(name, std::move(value));
  if (!inserted) throw ConfigError("duplicate parameter '" + name + "'");
  return it->second;
}

Matrix& ParameterStore::add_uniform(const std::string& name, Eigen::Index rows, Eigen::Index cols,
                                    double bound) {
  std::uniform_real_distribution<double> dist(-bound, bound);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = dist(rng_);
  return add(name, std::move(m));
}

Matrix& ParameterStore::add_fan_in(const std::string& name, Eigen::Index rows,
                                   Eigen::Index cols) {
  return add_uniform(name, rows, cols, 1.0 / std::sqrt(static_cast<double>(rows)));
}

Matrix& ParameterStore::add_constant(const std::string& name, Eigen::Index rows,
                                     Eigen::Index cols, double value) {
  return add(name, Matrix::Constant(rows, cols, value));
}

const Matrix& ParameterStore::at(const std::string& name) const {
  auto it = params_.find(name);
  if (it == params_.end()) throw ConfigError("missing parameter '" + name + "'");
  return it->second;
}

Matrix& ParameterStore::at(const std::string& name) {
  auto it = params_.find(name);
  if (it == params_.end()) throw ConfigError("missing parameter '" + name + "'");
  return it->second;
}

std::size_t ParameterStore::scalar_count() const {
  std::size_t n = 0;
  for (const auto& [_, m] : params_) n += static_cast<std::size_t>(m.size());
  return n;
}

bool ParameterStore::operator==(const ParameterStore& other) const {
  if (params_.size() != other.params_.size()) return false;
  for (const auto& [name, m] : params_) {
    auto it = other.params_.find(name);
    if (it == other.params_.end()) return false;
    if (m.rows() != it->second.rows() || m.cols() != it->second.cols()) return false;
    if (std::memcmp(m.data(), it->second.data(), sizeof(double) * m.size()) != 0) return false;
  }
  return true;
}

Gradients zero_gradients(const ParameterStore& store) {
  Gradients g;
  for (const auto& [name, m] : store.entries()) g.emplace(name, Matrix::Zero(m.rows(), m.cols()));
  return g;
}

bool has_non_finite(const Matrix& m) { return !m.allFinite(); }

}  // namespace mmscs::nn
