#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace mmscs::nn {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::Matrix<double, 1, Eigen::Dynamic>;

/// Shape plus row-major float64 payload; the on-disk form of a parameter.
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<double> data;

  static Tensor from_matrix(const Matrix& m);
  Matrix to_matrix() const;  // rank-1 tensors become 1 x n
  std::size_t element_count() const;
  bool operator==(const Tensor&) const = default;
};

using Gradients = std::map<std::string, Matrix>;

/// Named learnable parameters of a model, created from a seeded generator.
class ParameterStore {
 public:
  explicit ParameterStore(std::uint64_t seed = 0);

  /// Inserts a parameter; throws ConfigError on a duplicate name.
  Matrix& add(const std::string& name, Matrix value);
  /// uniform(-bound, +bound) entries drawn from the store's generator.
  Matrix& add_uniform(const std::string& name, Eigen::Index rows, Eigen::Index cols,
                      double bound);
  /// uniform(-1/sqrt(rows), +1/sqrt(rows)); rows is the fan-in for `x * W`.
  Matrix& add_fan_in(const std::string& name, Eigen::Index rows, Eigen::Index cols);
  Matrix& add_constant(const std::string& name, Eigen::Index rows, Eigen::Index cols,
                       double value);

  bool contains(const std::string& name) const { return params_.contains(name); }
  const Matrix& at(const std::string& name) const;
  Matrix& at(const std::string& name);
  const std::map<std::string, Matrix>& entries() const { return params_; }
  std::size_t size() const { return params_.size(); }
  std::size_t scalar_count() const;
  std::uint64_t seed() const { return seed_; }

  bool operator==(const ParameterStore& other) const;

 private:
  std::map<std::string, Matrix> params_;
  std::uint64_t seed_;
  std::mt19937_64 rng_;
};

/// Zero gradients for every parameter of `store`.
Gradients zero_gradients(const ParameterStore& store);

/// True if any entry is NaN or infinite.
bool has_non_finite(const Matrix& m);

}  // namespace mmscs::nn
