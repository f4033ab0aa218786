#include "dcrl/rl/qlearning.hpp"

#include <cmath>
#include <limits>

namespace dcrl::rl {

void update_target(QNetwork& q) { q.target = q.online; }

MatrixXr pair_inputs(const VectorXr& state, const MatrixXr& actions) {
  MatrixXr x(state.size() + actions.rows(), actions.cols());
  x.topRows(state.size()) = state.replicate(1, actions.cols());
  x.bottomRows(actions.rows()) = actions;
  return x;
}

VectorXr q_values(const Net& net, const VectorXr& state, const MatrixXr& actions) {
  return nn::dense_forward(net, pair_inputs(state, actions)).row(0).transpose();
}

namespace {

MatrixXr batch_inputs(const Batch& batch) {
  const Index d = batch.front().state.size();
  const Index a = batch.front().action.size();
  MatrixXr x(d + a, static_cast<Index>(batch.size()));
  for (std::size_t i = 0; i < batch.size(); ++i) {
    x.col(static_cast<Index>(i)) << batch[i].state, batch[i].action;
  }
  return x;
}

}  // namespace

VectorXr saql_targets(const QNetwork& q, const Batch& batch, double gamma) {
  VectorXr y(static_cast<Index>(batch.size()));
  // All next-candidate evaluations go through the target net in one pass.
  Index total = 0;
  for (const auto& t : batch) {
    if (t.terminal) continue;
    if (t.next_candidates.cols() == 0) throw MissingCandidates("non-terminal transition without next candidates");
    total += t.next_candidates.cols();
  }
  MatrixXr x;
  if (total > 0) {
    const Index d = batch.front().state.size();
    const Index a = batch.front().action.size();
    x.resize(d + a, total);
    Index col = 0;
    for (const auto& t : batch) {
      if (t.terminal) continue;
      x.block(0, col, d, t.next_candidates.cols()) = t.next_state.replicate(1, t.next_candidates.cols());
      x.block(d, col, a, t.next_candidates.cols()) = t.next_candidates;
      col += t.next_candidates.cols();
    }
  }
  const MatrixXr qn = total > 0 ? nn::dense_forward(q.target, x) : MatrixXr();
  Index col = 0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto& t = batch[i];
    double target = t.reward;
    if (!t.terminal) {
      target += gamma * qn.row(0).segment(col, t.next_candidates.cols()).maxCoeff();
      col += t.next_candidates.cols();
    }
    y[static_cast<Index>(i)] = target;
  }
  return y;
}

double bellman_loss(const Net& online, const Batch& batch, const VectorXr& targets, Net* grad, MatrixXr* d_states) {
  nn::DenseTape<double> tape;
  const MatrixXr q = nn::dense_forward(online, batch_inputs(batch), grad ? &tape : nullptr);
  const VectorXr err = q.row(0).transpose() - targets;
  if (grad) {
    const MatrixXr d_out = (2.0 * err).transpose();
    const MatrixXr dx = nn::dense_backward(online, tape, d_out, *grad);
    if (d_states) *d_states = dx.topRows(batch.front().state.size());
  }
  return err.squaredNorm();
}

double saql_loss(const QNetwork& q, const Batch& batch, double gamma, Net* grad) {
  return bellman_loss(q.online, batch, saql_targets(q, batch, gamma), grad);
}

CqlTerm cql_term(const Net& online, const Batch& batch, double alpha, Net* grad, MatrixXr* d_states) {
  Index total = 0;
  for (const auto& t : batch) {
    if (t.candidates.cols() == 0) throw MissingCandidates("CQL needs the realized candidate set");
    if (t.behavior_slot < 0 || t.behavior_slot >= t.candidates.cols())
      throw std::invalid_argument("CQL needs the behavior action's slot in the candidate set");
    total += t.candidates.cols();
  }
  const Index d = batch.front().state.size();
  const Index a = batch.front().action.size();
  MatrixXr x(d + a, total);
  Index col = 0;
  for (const auto& t : batch) {
    x.block(0, col, d, t.candidates.cols()) = t.state.replicate(1, t.candidates.cols());
    x.block(d, col, a, t.candidates.cols()) = t.candidates;
    col += t.candidates.cols();
  }
  nn::DenseTape<double> tape;
  const MatrixXr q = nn::dense_forward(online, x, grad ? &tape : nullptr);
  MatrixXr d_out = MatrixXr::Zero(1, total);
  CqlTerm out;
  col = 0;
  for (const auto& t : batch) {
    const Index n = t.candidates.cols();
    const VectorXr qi = q.row(0).segment(col, n).transpose();
    const double m = qi.maxCoeff();
    const VectorXr e = (qi.array() - m).exp().matrix();
    const double z = e.sum();
    const VectorXr mu = e / z;
    const double qb = qi[t.behavior_slot];
    out.value += alpha * (mu.dot(qi) - qb);
    out.surrogate += alpha * (m + std::log(z) - qb);
    d_out.block(0, col, 1, n) = alpha * mu.transpose();
    d_out(0, col + t.behavior_slot) -= alpha;
    col += n;
  }
  if (grad) {
    const MatrixXr dx = nn::dense_backward(online, tape, d_out, *grad);
    if (d_states) {
      d_states->setZero(d, static_cast<Index>(batch.size()));
      col = 0;
      for (std::size_t i = 0; i < batch.size(); ++i) {
        const Index n = batch[i].candidates.cols();
        d_states->col(static_cast<Index>(i)) = dx.block(0, col, d, n).rowwise().sum();
        col += n;
      }
    }
  }
  return out;
}

Box Box::of_columns(const MatrixXr& samples) {
  return {samples.rowwise().minCoeff(), samples.rowwise().maxCoeff()};
}

GaResult gradient_ascent(const ValueAndGradient& f, const VectorXr& init, const GaConfig& cfg, const Box* box) {
  VectorXr psi = box ? box->clamp(init) : init;
  VectorXr g(psi.size());
  double value = f(psi, g);
  GaResult best{psi, value, 0};
  for (int k = 1; k <= cfg.max_steps; ++k) {
    if (!g.allFinite() || !std::isfinite(value))
      throw NonFiniteGradient("gradient ascent: non-finite value or gradient at step " + std::to_string(k - 1) +
                              " (|psi|=" + std::to_string(psi.norm()) + ")");
    psi += cfg.step_size * g;
    if (box) psi = box->clamp(psi);
    value = f(psi, g);
    if (value > best.value) best = {psi, value, k};
  }
  if (!std::isfinite(value)) throw NonFiniteGradient("gradient ascent: non-finite value after final step");
  return best;
}

GaResult caql_inner_max(const Net& online, const VectorXr& state, const VectorXr& init, const GaConfig& cfg,
                        const Box* box) {
  Net scratch = online.zeros_like();
  const Index d = state.size();
  auto f = [&](const VectorXr& psi, VectorXr& g) {
    MatrixXr x(d + psi.size(), 1);
    x << state, psi;
    nn::DenseTape<double> tape;
    const MatrixXr q = nn::dense_forward(online, x, &tape);
    const MatrixXr dx = nn::dense_backward(online, tape, MatrixXr(MatrixXr::Ones(1, 1)), scratch);
    g = dx.col(0).tail(psi.size());
    return q(0, 0);
  };
  return gradient_ascent(f, init, cfg, box);
}

VectorXr caql_targets(const QNetwork& q, const Batch& batch, double gamma, const GaConfig& cfg, const Box* box) {
  VectorXr y(static_cast<Index>(batch.size()));
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto& t = batch[i];
    double target = t.reward;
    if (!t.terminal) {
      const VectorXr init =
          t.next_behavior_action.size() == t.action.size() ? t.next_behavior_action : VectorXr::Zero(t.action.size());
      const auto ga = caql_inner_max(q.online, t.next_state, init, cfg, box);
      target += gamma * q_values(q.target, t.next_state, ga.argmax)[0];
    }
    y[static_cast<Index>(i)] = target;
  }
  return y;
}

double caql_loss(const QNetwork& q, const Batch& batch, double gamma, const GaConfig& cfg, const Box* box, Net* grad) {
  return bellman_loss(q.online, batch, caql_targets(q, batch, gamma, cfg, box), grad);
}

std::size_t argmax_stable(const VectorXr& scores) {
  if (scores.size() == 0) throw std::invalid_argument("argmax over an empty set");
  std::size_t best = 0;
  for (Index i = 1; i < scores.size(); ++i)
    if (scores[i] > scores[static_cast<Index>(best)]) best = static_cast<std::size_t>(i);
  return best;
}

StepStats q_update(QNetwork& q, nn::AdamState<double>& adam, const Batch& batch, const QUpdateOptions& opts) {
  Net grad = q.online.zeros_like();
  StepStats s;
  const VectorXr y = opts.continuous ? caql_targets(q, batch, opts.gamma, opts.ga, opts.box ? &*opts.box : nullptr)
                                     : saql_targets(q, batch, opts.gamma);
  s.bellman = bellman_loss(q.online, batch, y, &grad);
  if (opts.alpha != 0) s.cql = cql_term(q.online, batch, opts.alpha, &grad).value;
  nn::adam_step(adam, q.online, grad);
  if (++q.updates % q.target_period == 0) update_target(q);
  return s;
}

}  // namespace dcrl::rl
