#pragma once

#include "dcrl/core/random.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace dcrl::nn {

using Index = Eigen::Index;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using MatrixXr = Matrix<double>;
using VectorXr = Vector<double>;

/// Raised when operand widths disagree with a layer's declared shape.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline void require_shape(bool ok, const std::string& what) {
  if (!ok) throw ShapeError(what);
}

/// A named, mutable view of one parameter array (column-major).
template <typename Scalar>
struct ParamSlot {
  std::string name;
  Eigen::Map<Matrix<Scalar>> values;
};

/// Collects every parameter of `model` in its canonical traversal order.
/// Models expose `for_each_parameter(f)` calling `f(name, Matrix-or-Vector&)`.
template <typename Scalar, typename Model>
std::vector<ParamSlot<Scalar>> parameter_slots(Model& model) {
  std::vector<ParamSlot<Scalar>> slots;
  model.for_each_parameter([&](const std::string& name, auto& array) {
    slots.push_back({name, Eigen::Map<Matrix<Scalar>>(array.data(), array.rows(), array.cols())});
  });
  return slots;
}

template <typename Scalar, typename Model>
Index parameter_count(Model& model) {
  Index n = 0;
  model.for_each_parameter([&](const std::string&, auto& array) { n += array.size(); });
  return n;
}

template <typename Scalar, typename Model>
void set_zero(Model& model) {
  model.for_each_parameter([](const std::string&, auto& array) { array.setZero(); });
}

template <typename Scalar, typename Model>
bool all_finite(Model& model) {
  bool ok = true;
  model.for_each_parameter([&](const std::string&, auto& array) { ok = ok && array.allFinite(); });
  return ok;
}

/// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) fill.
template <typename Derived>
void fill_uniform(Eigen::MatrixBase<Derived>& m, double bound, std::mt19937_64& rng) {
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i) m(i, j) = static_cast<typename Derived::Scalar>(dcrl::uniform(rng, -bound, bound));
}

template <typename Scalar>
Scalar sigmoid(Scalar x) {
  return Scalar(1) / (Scalar(1) + std::exp(-x));
}

}  // namespace dcrl::nn
