#pragma once

#include "dcrl/nn/tensor.hpp"

#include <cmath>
#include <cstdint>

namespace dcrl::nn {

struct AdamOptions {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-6;
};

/// Moment accumulators, one per parameter slot of the model they were created for.
template <typename Scalar>
struct AdamState {
  AdamOptions options;
  std::int64_t step = 0;
  std::vector<Matrix<Scalar>> first_moment;
  std::vector<Matrix<Scalar>> second_moment;

  AdamState() = default;

  template <typename Model>
  AdamState(Model& model, AdamOptions opts) : options(opts) {
    model.for_each_parameter([&](const std::string&, auto& array) {
      first_moment.push_back(Matrix<Scalar>::Zero(array.rows(), array.cols()));
      second_moment.push_back(Matrix<Scalar>::Zero(array.rows(), array.cols()));
    });
  }
};

/// One bias-corrected Adam update of `params` with `grads` (same model type).
template <typename Scalar, typename Model>
void adam_step(AdamState<Scalar>& state, Model& params, Model& grads) {
  auto p = parameter_slots<Scalar>(params);
  auto g = parameter_slots<Scalar>(grads);
  require_shape(p.size() == g.size() && p.size() == state.first_moment.size(), "adam_step: slot count mismatch");
  ++state.step;
  const auto& o = state.options;
  const double c1 = 1.0 - std::pow(o.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(o.beta2, static_cast<double>(state.step));
  for (std::size_t k = 0; k < p.size(); ++k) {
    require_shape(p[k].values.rows() == g[k].values.rows() && p[k].values.cols() == g[k].values.cols() &&
                      p[k].values.rows() == state.first_moment[k].rows() &&
                      p[k].values.cols() == state.first_moment[k].cols(),
                  "adam_step: shape mismatch at " + p[k].name);
    auto& m = state.first_moment[k];
    auto& v = state.second_moment[k];
    m = Scalar(o.beta1) * m + Scalar(1.0 - o.beta1) * g[k].values;
    v = Scalar(o.beta2) * v + Scalar(1.0 - o.beta2) * g[k].values.cwiseAbs2();
    p[k].values.array() -= Scalar(o.learning_rate) * (m.array() / Scalar(c1)) /
                           ((v.array() / Scalar(c2)).sqrt() + Scalar(o.epsilon));
  }
}

}  // namespace dcrl::nn
