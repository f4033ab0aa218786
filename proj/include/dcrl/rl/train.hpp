#pragma once

#include "dcrl/nn/adam.hpp"
#include "dcrl/rl/corpus.hpp"
#include "dcrl/rl/policy.hpp"
#include "dcrl/rl/qlearning.hpp"

#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace dcrl::rl {

/// One row per logged step: named scalar columns.
struct TrainingCurve {
  std::vector<std::string> columns;
  std::vector<std::pair<std::size_t, std::vector<double>>> rows;

  void add(std::size_t step, std::vector<double> values) { rows.emplace_back(step, std::move(values)); }
  void write_csv(std::ostream& out) const;
};

struct HeadShape {
  std::size_t layers = 3;
  Index width = 128;
};

Net make_head(Index input_width, const HeadShape& shape, Rng& rng);

struct SupervisedConfig {
  Index hidden = 200;
  HeadShape head;
  double learning_rate = 1e-3;
  std::size_t steps = 2000;
  std::size_t conversations_per_step = 8;
  std::size_t log_every = 100;
  double threshold = 1.5;
  std::uint64_t seed = 1;
};

/// Mean squared error of the scorer against every rated candidate of conversation `c`,
/// with gradients through the head and (by BPTT) the GRU. Returns {sum of squares, labels}.
std::pair<double, std::size_t> supervised_loss(const Corpus& corpus, std::size_t c, const nn::GruCell<double>& cell,
                                               const Net& head, nn::GruCell<double>* cell_grad, Net* head_grad);

/// Joint training of the GRU encoder and a rating-regression head.
Policy train_supervised(const Corpus& corpus, const SupervisedConfig& cfg, TrainingCurve* curve = nullptr);

struct QTrainConfig {
  PolicyKind kind = PolicyKind::Saql;
  double gamma = 0.95;
  double alpha = 0;
  HeadShape head;
  double learning_rate = 1e-4;
  std::size_t steps = 5000;
  std::size_t batch_size = 32;
  std::size_t target_period = 1000;
  GaConfig ga{0.01, 25};
  std::size_t log_every = 250;
  std::uint64_t seed = 1;

  /// Appendix-style defaults: discount and CQL weight per kind.
  static QTrainConfig defaults_for(PolicyKind kind);
};

/// Q-learning on a frozen-encoder dataset (SAQL over the realized sets, or CAQL by
/// gradient ascent over the action box); alpha > 0 adds the CQL term.
QNetwork train_q(const TransitionDataset& data, const QTrainConfig& cfg, TrainingCurve* curve = nullptr);

/// Encoder and Q-head trained jointly.
struct E2eModel {
  nn::GruCell<double> cell;
  Net head;

  template <typename F>
  void for_each_parameter(F&& f) {
    cell.for_each_parameter([&](const std::string& name, auto& a) { f("gru." + name, a); });
    head.for_each_parameter([&](const std::string& name, auto& a) { f("head." + name, a); });
  }
  E2eModel zeros_like() const { return {cell.zeros_like(), head.zeros_like()}; }
};

struct E2eLoss {
  double bellman = 0;
  double cql_value = 0;
  double cql_surrogate = 0;
  double objective() const { return bellman + cql_surrogate; }
};

/// Bellman + CQL loss on corpus transitions `ids`; targets come from `target` (a frozen
/// copy of encoder and head). `grad` receives the gradient of objective().
E2eLoss e2e_loss(const E2eModel& model, const E2eModel& target, const Corpus& corpus,
                 const std::vector<std::size_t>& ids, double gamma, double alpha, E2eModel* grad = nullptr);

struct E2eConfig {
  double gamma = 0.8;
  double alpha = 0.1;
  double learning_rate = 1e-4;
  std::size_t steps = 500;
  std::size_t batch_size = 32;
  std::size_t target_period = 100;
  std::size_t log_every = 50;
  std::uint64_t seed = 1;
};

/// Starts from `init` (typically the supervised encoder and a fresh head).
E2eModel train_e2e(const Corpus& corpus, E2eModel init, const E2eConfig& cfg, TrainingCurve* curve = nullptr);

}  // namespace dcrl::rl
