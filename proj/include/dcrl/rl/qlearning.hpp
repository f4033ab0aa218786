#pragma once

#include "dcrl/nn/adam.hpp"
#include "dcrl/nn/dense.hpp"

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dcrl::rl {

using nn::Index;
using nn::MatrixXr;
using nn::VectorXr;
using Net = nn::DenseStack<double>;

/// One element of a Q-learning batch. `candidates`/`behavior_slot` describe the realized
/// set A_x the behavior policy chose from; only the CQL term reads them.
struct Transition {
  VectorXr state;
  VectorXr action;
  double reward = 0;
  VectorXr next_state;
  MatrixXr next_candidates;  // action width x |A_x'|
  bool terminal = false;
  MatrixXr candidates;
  Index behavior_slot = -1;
  VectorXr next_behavior_action;  // what the behavior policy did at x', when logged
};

using Batch = std::vector<Transition>;

struct QNetwork {
  Net online;
  Net target;
  std::size_t target_period = 1000;
  std::size_t updates = 0;

  QNetwork() = default;
  explicit QNetwork(Net net, std::size_t period = 1000) : online(net), target(std::move(net)), target_period(period) {}
};

/// Hard copy theta_target <- theta.
void update_target(QNetwork& q);

/// [state; action] columns for one state against many actions.
MatrixXr pair_inputs(const VectorXr& state, const MatrixXr& actions);

VectorXr q_values(const Net& net, const VectorXr& state, const MatrixXr& actions);

class MissingCandidates : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// y_i = r_i + gamma * max_{a' in A_x'} Q_target(x', a'); y_i = r_i when terminal.
VectorXr saql_targets(const QNetwork& q, const Batch& batch, double gamma);

/// Sum of squared Bellman errors against `targets`; gradients w.r.t. the online net go to
/// `grad`, and w.r.t. each transition's state (one column per transition) to `d_states`.
double bellman_loss(const Net& online, const Batch& batch, const VectorXr& targets, Net* grad,
                    MatrixXr* d_states = nullptr);

double saql_loss(const QNetwork& q, const Batch& batch, double gamma, Net* grad = nullptr);

struct CqlTerm {
  double value = 0;      // alpha * sum_i (E_mu[Q] - Q(behavior))
  double surrogate = 0;  // alpha * sum_i (logsumexp Q - Q(behavior)); `grad` is its gradient
};

/// mu_i = softmax of online Q over A_x_i, held fixed in the gradient.
CqlTerm cql_term(const Net& online, const Batch& batch, double alpha, Net* grad = nullptr,
                 MatrixXr* d_states = nullptr);

struct GaConfig {
  double step_size = 1e-6;
  int max_steps = 25;
};

/// Axis-aligned bounds for the action embedding.
struct Box {
  VectorXr lower;
  VectorXr upper;
  static Box of_columns(const MatrixXr& samples);
  VectorXr clamp(const VectorXr& v) const { return v.cwiseMax(lower).cwiseMin(upper); }
};

struct GaResult {
  VectorXr argmax;
  double value = 0;
  int steps = 0;
};

class NonFiniteGradient : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// f(psi, grad) returns the objective and writes its gradient.
using ValueAndGradient = std::function<double(const VectorXr&, VectorXr&)>;

/// psi <- psi + step * grad, projected onto `box` when given; returns the best iterate seen.
GaResult gradient_ascent(const ValueAndGradient& f, const VectorXr& init, const GaConfig& cfg,
                         const Box* box = nullptr);

/// Inner maximization of Q_online(state, .) over the action embedding.
GaResult caql_inner_max(const Net& online, const VectorXr& state, const VectorXr& init, const GaConfig& cfg,
                        const Box* box = nullptr);

/// y_i = r_i + gamma * Q_target(x', argmax_GA Q_online(x', .)). The ascent starts from the
/// logged behavior action at x' when present, otherwise from zero.
VectorXr caql_targets(const QNetwork& q, const Batch& batch, double gamma, const GaConfig& cfg, const Box* box);

double caql_loss(const QNetwork& q, const Batch& batch, double gamma, const GaConfig& cfg, const Box* box,
                 Net* grad = nullptr);

/// Index of the highest score; ties go to the lowest index.
std::size_t argmax_stable(const VectorXr& scores);

struct QUpdateOptions {
  double gamma = 0.95;
  double alpha = 0;  // CQL weight; 0 skips the term entirely
  bool continuous = false;
  GaConfig ga;
  std::optional<Box> box;
};

struct StepStats {
  double bellman = 0;
  double cql = 0;
};

/// One optimizer step on `batch`; copies the target every `target_period` updates.
StepStats q_update(QNetwork& q, nn::AdamState<double>& adam, const Batch& batch, const QUpdateOptions& opts);

}  // namespace dcrl::rl
