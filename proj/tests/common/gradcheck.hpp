#pragma once

// Central-difference gradient checks shared by the unit and acceptance suites.

#include "dcrl/core/random.hpp"
#include "dcrl/nn/dense.hpp"
#include "dcrl/nn/gru.hpp"
#include "dcrl/rl/train.hpp"
#include "dcrl/sim/sim.hpp"

#include <cmath>
#include <functional>
#include <vector>

namespace gradcheck {

using dcrl::nn::Index;
using dcrl::nn::MatrixXr;
using dcrl::nn::VectorXr;

/// ||g - fd|| / (||g|| + ||fd||) over every parameter coordinate of `model`.
template <typename Model>
double relative_error(Model model, Model analytic, const std::function<double(const Model&)>& loss,
                      double h = 1e-6) {
  std::vector<double*> params, grads;
  model.for_each_parameter([&](const std::string&, auto& a) {
    for (Index k = 0; k < a.size(); ++k) params.push_back(a.data() + k);
  });
  analytic.for_each_parameter([&](const std::string&, auto& a) {
    for (Index k = 0; k < a.size(); ++k) grads.push_back(a.data() + k);
  });
  double diff = 0, na = 0, nf = 0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double orig = *params[i];
    *params[i] = orig + h;
    const double up = loss(model);
    *params[i] = orig - h;
    const double down = loss(model);
    *params[i] = orig;
    const double fd = (up - down) / (2 * h);
    diff += (fd - *grads[i]) * (fd - *grads[i]);
    na += *grads[i] * *grads[i];
    nf += fd * fd;
  }
  const double denom = std::sqrt(na) + std::sqrt(nf);
  return denom == 0 ? 0 : std::sqrt(diff) / denom;
}

inline double relative_error(const MatrixXr& analytic, MatrixXr x, const std::function<double(const MatrixXr&)>& loss,
                             double h = 1e-6) {
  MatrixXr fd(x.rows(), x.cols());
  for (Index k = 0; k < x.size(); ++k) {
    const double orig = x.data()[k];
    x.data()[k] = orig + h;
    const double up = loss(x);
    x.data()[k] = orig - h;
    const double down = loss(x);
    x.data()[k] = orig;
    fd.data()[k] = (up - down) / (2 * h);
  }
  const double denom = analytic.norm() + fd.norm();
  return denom == 0 ? 0 : (analytic - fd).norm() / denom;
}

/// Dense stack with mixed activations under a weighted quadratic loss. Returns the worse
/// of the parameter and input errors.
inline double dense_check(std::uint64_t seed) {
  dcrl::Rng rng(seed);
  using Net = dcrl::nn::DenseStack<double>;
  const Net net = Net::random(5, {7, 6, 3}, {dcrl::nn::Activation::Tanh, dcrl::nn::Activation::ReLU,
                                            dcrl::nn::Activation::Identity}, rng);
  MatrixXr x(5, 4), w(3, 4);
  for (Index k = 0; k < x.size(); ++k) x.data()[k] = dcrl::standard_normal(rng);
  for (Index k = 0; k < w.size(); ++k) w.data()[k] = dcrl::standard_normal(rng);
  auto loss_of = [&](const Net& n, const MatrixXr& in) {
    const MatrixXr y = dcrl::nn::dense_forward(n, in);
    return (w.array() * y.array()).sum() + 0.5 * y.squaredNorm();
  };
  dcrl::nn::DenseTape<double> tape;
  const MatrixXr y = dcrl::nn::dense_forward(net, x, &tape);
  Net grad = net.zeros_like();
  const MatrixXr dx = dcrl::nn::dense_backward(net, tape, MatrixXr(w + y), grad);
  const double ep = relative_error<Net>(net, grad, [&](const Net& n) { return loss_of(n, x); });
  const double ex = relative_error(dx, x, [&](const MatrixXr& in) { return loss_of(net, in); });
  return std::max(ep, ex);
}

/// GRU over a short sequence with a loss on every hidden state (full BPTT).
inline double gru_check(std::uint64_t seed) {
  dcrl::Rng rng(seed);
  using Cell = dcrl::nn::GruCell<double>;
  const Cell cell = Cell::random(3, 4, rng);
  MatrixXr x(3, 6), c(4, 7);
  for (Index k = 0; k < x.size(); ++k) x.data()[k] = dcrl::standard_normal(rng);
  for (Index k = 0; k < c.size(); ++k) c.data()[k] = dcrl::standard_normal(rng);
  VectorXr h0(4);
  for (Index k = 0; k < 4; ++k) h0[k] = 0.5 * dcrl::standard_normal(rng);
  auto loss_of = [&](const Cell& g, const MatrixXr& in) {
    const MatrixXr s = dcrl::nn::gru_sequence(g, in, h0);
    return (c.array() * s.array()).sum() + 0.25 * s.squaredNorm();
  };
  dcrl::nn::GruTape<double> tape;
  const MatrixXr s = dcrl::nn::gru_sequence(cell, x, h0, &tape);
  Cell grad = cell.zeros_like();
  const MatrixXr dx = dcrl::nn::gru_backward(cell, tape, MatrixXr(c + 0.5 * s), grad);
  const double ep = relative_error<Cell>(cell, grad, [&](const Cell& g) { return loss_of(g, x); });
  const double ex = relative_error(dx, x, [&](const MatrixXr& in) { return loss_of(cell, in); });
  return std::max(ep, ex);
}

/// A few simulated conversations hashed with a small embedder, for the joint check.
inline const dcrl::rl::Corpus& tiny_corpus() {
  static const dcrl::rl::Corpus corpus = [] {
    const auto world = dcrl::sim::World::load(std::filesystem::path(DCRL_SOURCE_DIR) / "data");
    dcrl::sim::MyopicOracleDm dm;
    const auto d = dcrl::sim::generate_dataset(dm, world, 3, 17, 0.3);
    dcrl::encoder::SentenceEmbedder e;
    e.dim = 8;
    return dcrl::rl::Corpus::build(d.conversations, d.steps, e);
  }();
  return corpus;
}

/// Joint encoder + Q-head objective (Bellman + CQL surrogate) against finite differences.
inline double e2e_check(std::uint64_t seed) {
  using dcrl::rl::E2eModel;
  const auto& corpus = tiny_corpus();
  dcrl::Rng rng(seed);
  const Index in = corpus.embedder.dim + static_cast<Index>(dcrl::kCandidateFeatureWidth);
  const Index hidden = 5;
  const Index head_in = dcrl::encoder::StateLayout{hidden, corpus.embedder.dim}.width() + in;
  auto make = [&] {
    return E2eModel{dcrl::nn::GruCell<double>::random(in, hidden, rng),
                    dcrl::rl::Net::random(head_in, {6, 1}, {dcrl::nn::Activation::Tanh, dcrl::nn::Activation::Identity},
                                          rng)};
  };
  const E2eModel model = make();
  const E2eModel target = make();
  std::vector<std::size_t> ids;
  for (std::size_t k = 0; k < 10; ++k) ids.push_back(dcrl::uniform_index(rng, corpus.transitions.size()));
  E2eModel grad = model.zeros_like();
  dcrl::rl::e2e_loss(model, target, corpus, ids, 0.8, 0.5, &grad);
  return relative_error<E2eModel>(model, grad, [&](const E2eModel& m) {
    return dcrl::rl::e2e_loss(m, target, corpus, ids, 0.8, 0.5).objective();
  });
}

}  // namespace gradcheck
