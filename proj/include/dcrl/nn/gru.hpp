#pragma once

#include "dcrl/nn/tensor.hpp"

#include <cmath>
#include <string>

namespace dcrl::nn {

/// Gated recurrent unit with the convention
///   z  = sigmoid(W_z [x, h] + b_z)
///   r  = sigmoid(W_r [x, h] + b_r)
///   h~ = tanh(W_h [x, r*h] + b_h)
///   h' = (1 - z) * h + z * h~
template <typename Scalar>
struct GruCell {
  Index input_width = 0;
  Index hidden_width = 0;
  Matrix<Scalar> w_z, w_r, w_h;  // hidden x (input + hidden)
  Vector<Scalar> b_z, b_r, b_h;

  GruCell() = default;

  GruCell(Index input, Index hidden)
      : input_width(input),
        hidden_width(hidden),
        w_z(Matrix<Scalar>::Zero(hidden, input + hidden)),
        w_r(Matrix<Scalar>::Zero(hidden, input + hidden)),
        w_h(Matrix<Scalar>::Zero(hidden, input + hidden)),
        b_z(Vector<Scalar>::Zero(hidden)),
        b_r(Vector<Scalar>::Zero(hidden)),
        b_h(Vector<Scalar>::Zero(hidden)) {}

  static GruCell random(Index input, Index hidden, std::mt19937_64& rng) {
    GruCell cell(input, hidden);
    const double bound = 1.0 / std::sqrt(static_cast<double>(input + hidden));
    fill_uniform(cell.w_z, bound, rng);
    fill_uniform(cell.w_r, bound, rng);
    fill_uniform(cell.w_h, bound, rng);
    fill_uniform(cell.b_z, bound, rng);
    fill_uniform(cell.b_r, bound, rng);
    fill_uniform(cell.b_h, bound, rng);
    return cell;
  }

  template <typename F>
  void for_each_parameter(F&& f) {
    f("w_z", w_z);
    f("w_r", w_r);
    f("w_h", w_h);
    f("b_z", b_z);
    f("b_r", b_r);
    f("b_h", b_h);
  }

  GruCell zeros_like() const { return GruCell(input_width, hidden_width); }

  bool operator==(const GruCell& o) const {
    return input_width == o.input_width && hidden_width == o.hidden_width && w_z == o.w_z && w_r == o.w_r &&
           w_h == o.w_h && b_z == o.b_z && b_r == o.b_r && b_h == o.b_h;
  }
};

template <typename Scalar>
Vector<Scalar> gru_step(const GruCell<Scalar>& cell, const Vector<Scalar>& h, const Vector<Scalar>& x) {
  require_shape(h.size() == cell.hidden_width, "gru_step: hidden width mismatch");
  require_shape(x.size() == cell.input_width, "gru_step: input width mismatch");
  const Index in = cell.input_width;
  Vector<Scalar> a(in + cell.hidden_width);
  a << x, h;
  const Vector<Scalar> z = (cell.w_z * a + cell.b_z).unaryExpr([](Scalar v) { return sigmoid(v); });
  const Vector<Scalar> r = (cell.w_r * a + cell.b_r).unaryExpr([](Scalar v) { return sigmoid(v); });
  Vector<Scalar> ah(in + cell.hidden_width);
  ah << x, r.cwiseProduct(h);
  const Vector<Scalar> cand = (cell.w_h * ah + cell.b_h).array().tanh().matrix();
  return (Vector<Scalar>::Ones(h.size()) - z).cwiseProduct(h) + z.cwiseProduct(cand);
}

/// Per-step intermediates of a sequence pass.
template <typename Scalar>
struct GruTape {
  Matrix<Scalar> inputs;   // input x T
  Matrix<Scalar> hidden;   // hidden x (T + 1); column 0 is the initial state
  Matrix<Scalar> update;   // z, hidden x T
  Matrix<Scalar> reset;    // r
  Matrix<Scalar> candidate;
};

/// Runs the cell over the columns of `inputs` from `h0`; returns all states (h0 first).
template <typename Scalar>
Matrix<Scalar> gru_sequence(const GruCell<Scalar>& cell, const Matrix<Scalar>& inputs, const Vector<Scalar>& h0,
                            GruTape<Scalar>* tape = nullptr) {
  require_shape(inputs.rows() == cell.input_width, "gru_sequence: input width mismatch");
  require_shape(h0.size() == cell.hidden_width, "gru_sequence: hidden width mismatch");
  const Index steps = inputs.cols();
  const Index in = cell.input_width;
  const Index hid = cell.hidden_width;
  Matrix<Scalar> states(hid, steps + 1);
  states.col(0) = h0;
  if (tape) {
    tape->inputs = inputs;
    tape->update.resize(hid, steps);
    tape->reset.resize(hid, steps);
    tape->candidate.resize(hid, steps);
  }
  // Input projections for all steps at once; the recurrent part is added per step.
  const Matrix<Scalar> xz = cell.w_z.leftCols(in) * inputs;
  const Matrix<Scalar> xr = cell.w_r.leftCols(in) * inputs;
  const Matrix<Scalar> xh = cell.w_h.leftCols(in) * inputs;
  for (Index t = 0; t < steps; ++t) {
    const Vector<Scalar> h = states.col(t);
    const Vector<Scalar> z =
        (xz.col(t) + cell.w_z.rightCols(hid) * h + cell.b_z).unaryExpr([](Scalar v) { return sigmoid(v); });
    const Vector<Scalar> r =
        (xr.col(t) + cell.w_r.rightCols(hid) * h + cell.b_r).unaryExpr([](Scalar v) { return sigmoid(v); });
    const Vector<Scalar> cand =
        (xh.col(t) + cell.w_h.rightCols(hid) * r.cwiseProduct(h) + cell.b_h).array().tanh().matrix();
    states.col(t + 1) = h + z.cwiseProduct(cand - h);
    if (tape) {
      tape->update.col(t) = z;
      tape->reset.col(t) = r;
      tape->candidate.col(t) = cand;
    }
  }
  if (tape) tape->hidden = states;
  return states;
}

/// Backpropagation through time. `d_states` holds dL/dh_t for every column of the
/// state matrix returned by `gru_sequence` (column 0 = initial state). Parameter
/// gradients accumulate into `grad`; returns dL/dinputs. `d_h0` receives dL/dh0.
template <typename Scalar>
Matrix<Scalar> gru_backward(const GruCell<Scalar>& cell, const GruTape<Scalar>& tape, const Matrix<Scalar>& d_states,
                            GruCell<Scalar>& grad, Vector<Scalar>* d_h0 = nullptr) {
  const Index steps = tape.inputs.cols();
  const Index in = cell.input_width;
  const Index hid = cell.hidden_width;
  require_shape(d_states.rows() == hid && d_states.cols() == steps + 1, "gru_backward: gradient shape mismatch");
  Matrix<Scalar> d_inputs = Matrix<Scalar>::Zero(in, steps);
  Vector<Scalar> carry = d_states.col(steps);
  Vector<Scalar> a(in + hid), ah(in + hid);
  for (Index t = steps; t-- > 0;) {
    const Vector<Scalar> h = tape.hidden.col(t);
    const auto z = tape.update.col(t);
    const auto r = tape.reset.col(t);
    const auto cand = tape.candidate.col(t);
    const Vector<Scalar>& dh = carry;

    const Vector<Scalar> d_cand_pre = dh.cwiseProduct(z).cwiseProduct((Vector<Scalar>::Ones(hid) - cand.cwiseProduct(cand)));
    const Vector<Scalar> d_z_pre =
        dh.cwiseProduct(cand - h).cwiseProduct(z.cwiseProduct(Vector<Scalar>::Ones(hid) - z));

    a << tape.inputs.col(t), h;
    ah << tape.inputs.col(t), r.cwiseProduct(h);

    grad.w_h.noalias() += d_cand_pre * ah.transpose();
    grad.b_h += d_cand_pre;
    const Vector<Scalar> d_ah = cell.w_h.transpose() * d_cand_pre;
    const Vector<Scalar> d_rh = d_ah.tail(hid);
    const Vector<Scalar> d_r_pre = d_rh.cwiseProduct(h).cwiseProduct(r.cwiseProduct(Vector<Scalar>::Ones(hid) - r));

    grad.w_z.noalias() += d_z_pre * a.transpose();
    grad.b_z += d_z_pre;
    grad.w_r.noalias() += d_r_pre * a.transpose();
    grad.b_r += d_r_pre;
    const Vector<Scalar> d_a = cell.w_z.transpose() * d_z_pre + cell.w_r.transpose() * d_r_pre;

    d_inputs.col(t) = d_ah.head(in) + d_a.head(in);
    Vector<Scalar> d_prev = dh.cwiseProduct(Vector<Scalar>::Ones(hid) - z) + d_rh.cwiseProduct(r) + d_a.tail(hid);
    carry = d_prev + d_states.col(t);
  }
  if (d_h0) *d_h0 = carry;
  return d_inputs;
}

}  // namespace dcrl::nn
