#include "mmscs/nn/optimizer.hpp"

#include <cmath>

#include "mmscs/error.hpp"

namespace mmscs::nn {

void Adam::step(ParameterStore& store, const Gradients& grads) {
  std::string missing;
  for (const auto& [name, value] : store.entries()) {
    auto it = grads.find(name);
    if (it == grads.end()) {
      missing += (missing.empty() ? "" : ", ") + name;
      continue;
    }
    if (it->second.rows() != value.rows() || it->second.cols() != value.cols())
      throw ConfigError("gradient shape mismatch for parameter " + name);
    if (has_non_finite(it->second)) throw NumericError("non-finite gradient for parameter " + name);
  }
  if (!missing.empty()) throw ConfigError("no gradient for parameters: " + missing);
  for (const auto& [name, g] : grads) {
    if (!store.contains(name)) throw ConfigError("gradient for unknown parameter " + name);
  }

  ++t_;
  const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
  for (const auto& [name, g] : grads) {
    Matrix& p = store.at(name);
    auto [mit, m_new] = m_.try_emplace(name, Matrix::Zero(p.rows(), p.cols()));
    auto [vit, v_new] = v_.try_emplace(name, Matrix::Zero(p.rows(), p.cols()));
    Matrix& m = mit->second;
    Matrix& v = vit->second;
    m = config_.beta1 * m + (1.0 - config_.beta1) * g;
    v = config_.beta2 * v + (1.0 - config_.beta2) * g.cwiseProduct(g);
    p.array() -= config_.lr * (m.array() / c1) / ((v.array() / c2).sqrt() + config_.eps);
  }
}

}  // namespace mmscs::nn
