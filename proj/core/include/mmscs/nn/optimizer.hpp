#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "mmscs/nn/tensor.hpp"

namespace mmscs::nn {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Adam with bias correction. Moment buffers are created on first use.
class Adam {
 public:
  explicit Adam(AdamConfig config = {}) : config_(config) {}

  /// Applies one update. `grads` must name exactly the parameters of `store`;
  /// a non-finite gradient raises NumericError naming the parameter before
  /// anything is modified.
  void step(ParameterStore& store, const Gradients& grads);

  const AdamConfig& config() const { return config_; }
  std::uint64_t steps() const { return t_; }

 private:
  AdamConfig config_;
  std::uint64_t t_ = 0;
  std::map<std::string, Matrix> m_;
  std::map<std::string, Matrix> v_;
};

}  // namespace mmscs::nn
