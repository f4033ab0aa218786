#pragma once

#include "dcrl/core/random.hpp"
#include "dcrl/rl/corpus.hpp"
#include "dcrl/rl/policy.hpp"
#include "dcrl/rl/qlearning.hpp"
#include "dcrl/sim/metrics.hpp"
#include "dcrl/sim/sim.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dcrl::ope {

using nn::Index;
using nn::MatrixXr;
using nn::VectorXr;
using rl::Net;

/// Proto-value function nu over [phi_x; psi_a].
struct NuNetwork {
  Net net;
  double value(const VectorXr& sa) const { return nn::dense_forward(net, sa)[0]; }
};

/// One logged transition with the target policy's distribution over the next candidate set.
/// Columns are [phi; psi] pairs.
struct DiceSample {
  VectorXr sa;
  double reward = 0;
  bool terminal = false;
  MatrixXr next_sa;
  VectorXr next_pi;
};

/// Initial-state sample: the candidate pairs at x0 with pi's probabilities.
struct DiceInitial {
  MatrixXr sa;
  VectorXr pi;
};

struct DiceDataset {
  std::vector<DiceSample> samples;
  std::vector<DiceInitial> initial;
};

class Divergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DualDiceConfig {
  std::vector<Index> hidden{64, 64};  // empty gives a linear nu
  double learning_rate = 1e-3;
  std::size_t steps = 3000;
  std::size_t batch_size = 256;  // 0 = full batch
  std::uint64_t seed = 1;
};

/// The behavior-agnostic objective 1/2 E_D[(nu - gamma E_pi nu')^2] - (1-gamma) E_beta E_pi[nu],
/// evaluated on sample and initial index sets; `grad` receives its gradient.
double dualdice_objective(const NuNetwork& nu, const DiceDataset& data, const std::vector<std::size_t>& samples,
                          const std::vector<std::size_t>& initial, double gamma, Net* grad = nullptr);

NuNetwork dualdice_train(const DiceDataset& data, double gamma, const DualDiceConfig& cfg);
/// Trains from a given starting network (tests use a zero-initialized linear nu).
NuNetwork dualdice_train(const DiceDataset& data, double gamma, const DualDiceConfig& cfg, NuNetwork init);

/// Correction ratios w_i = nu(x_i, a_i) - gamma E_pi[nu(x'_i, .)] (0 for terminal next states).
VectorXr dualdice_ratios(const NuNetwork& nu, const DiceDataset& data, double gamma);

/// mean_i w_i r_i: the per-step value under pi's normalized discounted occupancy.
/// Divide by (1 - gamma) for the discounted return.
double dualdice_estimate(const NuNetwork& nu, const DiceDataset& data, double gamma);

/// Greedy pi over a frozen-encoder dataset: pi puts all mass on argmax Q over each next set.
/// Initial states are the first composition step of every logged conversation.
DiceDataset dice_dataset(const rl::Corpus& corpus, const rl::TransitionDataset& data, const Net& q_head);

struct MeanStd {
  double mean = 0;
  double stddev = 0;
};

/// Population mean and standard deviation.
MeanStd mean_std(const std::vector<double>& xs);

struct OnPolicyReport {
  std::vector<int> ratings;
  MeanStd summary;
  sim::Interval ci;
};

/// n seeded simulated conversations, one conversation-level rating each.
OnPolicyReport onpolicy_eval(sim::DialogueManager& dm, const sim::World& world, std::size_t n, std::uint64_t seed);

struct EvalRow {
  std::string model_type;
  std::string model;
  std::optional<MeanStd> on_policy;
  std::optional<MeanStd> off_policy;
};

/// Model type | Model | On-policy | Off-policy, each cell "mean ± std".
std::string eval_table_text(const std::vector<EvalRow>& rows);
nlohmann::json eval_table_json(const std::vector<EvalRow>& rows);

/// Bootstrap standard deviation of dualdice_estimate over resampled samples (nu fixed).
double dualdice_bootstrap_std(const NuNetwork& nu, const DiceDataset& data, double gamma, std::uint64_t seed,
                              std::size_t resamples = 200);

}  // namespace dcrl::ope
