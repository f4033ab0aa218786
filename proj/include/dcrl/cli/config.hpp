#pragma once

#include "dcrl/core/types.hpp"
#include "dcrl/rl/train.hpp"
#include "dcrl/ope/ope.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

namespace dcrl::cli {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Every experiment knob. Kind-dependent fields left unset resolve to the kind's defaults.
///
/// File format: one JSON object with any subset of these keys; keys starting with "_" are
/// comments, any other unknown key is an error.
struct ExperimentConfig {
  std::string kind = "saql";
  std::optional<double> gamma;
  std::optional<double> alpha;
  std::optional<double> learning_rate;
  std::size_t hidden = 200;
  std::size_t head_layers = 3;
  std::size_t head_width = 128;
  std::size_t steps = 5000;
  std::size_t batch_size = 32;
  std::size_t target_period = 1000;
  double ga_step = 0.01;
  int ga_max_steps = 25;
  std::size_t conversations_per_step = 8;
  std::size_t log_every = 250;
  std::uint64_t seed = 1;

  std::size_t conversations = 2000;
  std::size_t bootstrap_conversations = 2000;
  std::size_t bootstrap_steps = 2000;
  double behavior_epsilon = 0.3;

  std::size_t eval_conversations = 500;
  std::size_t dice_steps = 3000;
  double dice_learning_rate = 1e-3;
  std::size_t dice_batch_size = 256;
  std::size_t dice_hidden = 64;

  PolicyKind policy_kind() const;

  nlohmann::json to_json() const;
  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig load(const std::filesystem::path& path);
  /// Applies the keys of `overrides` on top of this config.
  ExperimentConfig merged(const nlohmann::json& overrides) const;

  /// Kind defaults applied; the JSON of this is what `hash()` digests.
  ExperimentConfig resolved() const;
  std::string hash() const;

  rl::SupervisedConfig supervised() const;
  rl::QTrainConfig q_training() const;
  rl::E2eConfig e2e() const;
  ope::DualDiceConfig dualdice() const;
};

}  // namespace dcrl::cli
