#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "mmscs/nn/tape.hpp"

namespace testing_support {

struct GradReport {
  double max_rel_error = 0.0;
  std::string worst;  // parameter[index] with the largest error
  std::size_t checked = 0;
};

/// Compares tape gradients of a scalar objective with central differences,
/// perturbing every entry of every parameter in `store`.
/// rel = |a - n| / max(|a|, |n|, 1e-6).
inline GradReport check_gradients(
    mmscs::nn::ParameterStore& store,
    const std::function<mmscs::nn::Var(mmscs::nn::Tape&)>& objective, double h = 1e-5) {
  mmscs::nn::Gradients analytic;
  {
    mmscs::nn::Tape tape(&store);
    auto out = objective(tape);
    tape.backward(out);
    analytic = tape.parameter_gradients();
  }
  auto eval = [&] {
    mmscs::nn::Tape tape(&store);
    return objective(tape).value()(0, 0);
  };
  GradReport report;
  for (const auto& [name, value] : store.entries()) {
    auto& param = store.at(name);
    const auto it = analytic.find(name);
    for (Eigen::Index i = 0; i < param.size(); ++i) {
      const double saved = param.data()[i];
      param.data()[i] = saved + h;
      const double up = eval();
      param.data()[i] = saved - h;
      const double down = eval();
      param.data()[i] = saved;
      const double numeric = (up - down) / (2.0 * h);
      const double a = it == analytic.end() ? 0.0 : it->second.data()[i];
      const double rel = std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-6});
      ++report.checked;
      if (rel > report.max_rel_error) {
        report.max_rel_error = rel;
        report.worst = name + "[" + std::to_string(i) + "] analytic=" + std::to_string(a) +
                       " numeric=" + std::to_string(numeric);
      }
    }
  }
  return report;
}

}  // namespace testing_support
