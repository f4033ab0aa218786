#pragma once

#include "dcrl/nn/tensor.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace dcrl::nn {

enum class Activation { ReLU, Tanh, Identity };

inline const char* to_string(Activation a) {
  switch (a) {
    case Activation::ReLU: return "relu";
    case Activation::Tanh: return "tanh";
    case Activation::Identity: return "identity";
  }
  return "identity";
}

inline Activation activation_from_string(const std::string& s) {
  if (s == "relu") return Activation::ReLU;
  if (s == "tanh") return Activation::Tanh;
  if (s == "identity") return Activation::Identity;
  throw std::invalid_argument("unknown activation: " + s);
}

template <typename Scalar>
struct DenseLayer {
  Matrix<Scalar> weight;  // out x in
  Vector<Scalar> bias;    // out
  Activation activation = Activation::Identity;
};

/// Feed-forward stack of affine layers, each followed by its activation.
template <typename Scalar>
class DenseStack {
 public:
  DenseStack() = default;

  /// Zero-initialized stack: `widths` lists every layer's output width.
  DenseStack(Index input_width, const std::vector<Index>& widths, const std::vector<Activation>& activations)
      : input_width_(input_width) {
    require_shape(widths.size() == activations.size() && !widths.empty(), "DenseStack: widths/activations mismatch");
    Index fan_in = input_width;
    for (std::size_t l = 0; l < widths.size(); ++l) {
      layers_.push_back({Matrix<Scalar>::Zero(widths[l], fan_in), Vector<Scalar>::Zero(widths[l]), activations[l]});
      fan_in = widths[l];
    }
  }

  static DenseStack random(Index input_width, const std::vector<Index>& widths,
                           const std::vector<Activation>& activations, std::mt19937_64& rng) {
    DenseStack net(input_width, widths, activations);
    for (auto& layer : net.layers_) {
      const double bound = 1.0 / std::sqrt(static_cast<double>(layer.weight.cols()));
      fill_uniform(layer.weight, bound, rng);
      fill_uniform(layer.bias, bound, rng);
    }
    return net;
  }

  /// `hidden` ReLU layers of width `width`, then a linear scalar head.
  static DenseStack mlp(Index input_width, Index hidden, Index width, std::mt19937_64& rng) {
    std::vector<Index> widths(static_cast<std::size_t>(hidden), width);
    std::vector<Activation> acts(static_cast<std::size_t>(hidden), Activation::ReLU);
    widths.push_back(1);
    acts.push_back(Activation::Identity);
    return random(input_width, widths, acts, rng);
  }

  Index input_width() const { return input_width_; }
  Index output_width() const { return layers_.empty() ? input_width_ : layers_.back().weight.rows(); }
  std::vector<DenseLayer<Scalar>>& layers() { return layers_; }
  const std::vector<DenseLayer<Scalar>>& layers() const { return layers_; }

  template <typename F>
  void for_each_parameter(F&& f) {
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      f("layer" + std::to_string(l) + ".weight", layers_[l].weight);
      f("layer" + std::to_string(l) + ".bias", layers_[l].bias);
    }
  }

  DenseStack zeros_like() const {
    DenseStack out = *this;
    for (auto& layer : out.layers_) {
      layer.weight.setZero();
      layer.bias.setZero();
    }
    return out;
  }

  template <typename Other>
  DenseStack<Other> cast() const {
    DenseStack<Other> out;
    out.input_width_ = input_width_;
    for (const auto& layer : layers_)
      out.layers_.push_back({layer.weight.template cast<Other>(), layer.bias.template cast<Other>(), layer.activation});
    return out;
  }

  bool operator==(const DenseStack& o) const {
    if (input_width_ != o.input_width_ || layers_.size() != o.layers_.size()) return false;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      const auto& a = layers_[l];
      const auto& b = o.layers_[l];
      if (a.activation != b.activation || a.weight.rows() != b.weight.rows() || a.weight.cols() != b.weight.cols() ||
          a.weight != b.weight || a.bias != b.bias)
        return false;
    }
    return true;
  }

 private:
  template <typename>
  friend class DenseStack;

  Index input_width_ = 0;
  std::vector<DenseLayer<Scalar>> layers_;
};

/// Activations recorded by a forward pass, consumed by `dense_backward`.
template <typename Scalar>
struct DenseTape {
  std::vector<Matrix<Scalar>> inputs;   // per layer, in x batch
  std::vector<Matrix<Scalar>> outputs;  // per layer, post-activation
};

namespace detail {

template <typename Scalar>
void activate(Matrix<Scalar>& m, Activation a) {
  switch (a) {
    case Activation::ReLU: m = m.cwiseMax(Scalar(0)); break;
    case Activation::Tanh: m = m.array().tanh().matrix(); break;
    case Activation::Identity: break;
  }
}

// d(activation)/d(pre) expressed through the post-activation output.
template <typename Scalar>
void activation_backward(Matrix<Scalar>& grad, const Matrix<Scalar>& out, Activation a) {
  switch (a) {
    case Activation::ReLU: grad = (out.array() > Scalar(0)).select(grad, Scalar(0)); break;
    case Activation::Tanh: grad = (grad.array() * (Scalar(1) - out.array().square())).matrix(); break;
    case Activation::Identity: break;
  }
}

}  // namespace detail

/// Batched forward pass; columns of `x` are samples.
template <typename Scalar, typename Derived>
Matrix<Scalar> dense_forward(const DenseStack<Scalar>& net, const Eigen::MatrixBase<Derived>& x,
                             DenseTape<Scalar>* tape = nullptr) {
  require_shape(x.rows() == net.input_width(), "dense_forward: input width " + std::to_string(x.rows()) +
                                                   " != " + std::to_string(net.input_width()));
  Matrix<Scalar> h = x;
  if (tape) {
    tape->inputs.clear();
    tape->outputs.clear();
  }
  for (const auto& layer : net.layers()) {
    if (tape) tape->inputs.push_back(h);
    Matrix<Scalar> pre = layer.weight * h;
    pre.colwise() += layer.bias;
    detail::activate(pre, layer.activation);
    h = std::move(pre);
    if (tape) tape->outputs.push_back(h);
  }
  return h;
}

template <typename Scalar>
Vector<Scalar> dense_forward(const DenseStack<Scalar>& net, const Vector<Scalar>& x) {
  return dense_forward(net, x.matrix(), static_cast<DenseTape<Scalar>*>(nullptr)).col(0);
}

/// Reverse pass: accumulates parameter gradients into `grad` and returns dL/dx.
template <typename Scalar>
Matrix<Scalar> dense_backward(const DenseStack<Scalar>& net, const DenseTape<Scalar>& tape,
                              const Matrix<Scalar>& d_out, DenseStack<Scalar>& grad) {
  const auto& layers = net.layers();
  require_shape(tape.inputs.size() == layers.size(), "dense_backward: tape does not match network");
  Matrix<Scalar> delta = d_out;
  for (std::size_t k = layers.size(); k-- > 0;) {
    detail::activation_backward(delta, tape.outputs[k], layers[k].activation);
    grad.layers()[k].weight.noalias() += delta * tape.inputs[k].transpose();
    grad.layers()[k].bias += delta.rowwise().sum();
    delta = layers[k].weight.transpose() * delta;
  }
  return delta;
}

}  // namespace dcrl::nn
