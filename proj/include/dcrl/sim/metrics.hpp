#pragma once

#include "dcrl/core/types.hpp"
#include "dcrl/nlu/nlu.hpp"
#include "dcrl/sim/sim.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace dcrl::sim {

/// Raw counts for one conversation.
struct ConversationCounts {
  std::size_t length = 0;  // turns, user and bot
  double ret = 0;          // sum of the ratings of spoken bot utterances
  std::size_t cooperative = 0;
  std::size_t non_cooperative = 0;
  std::size_t ignored = 0;
  std::size_t positive_feedback = 0;
  std::size_t negative_feedback = 0;
  std::size_t bot_turns = 0;
  std::size_t question_turns = 0;
  std::size_t bot_utterances = 0;
  std::size_t fact_utterances = 0;
  std::size_t pivots = 0;
  std::size_t pivot_opportunities = 0;  // bot turns after the first
  std::size_t unique_providers = 0;

  bool operator==(const ConversationCounts&) const = default;
};

/// Followups to bot questions are classified with the same interpreter the NLU uses;
/// explicit feedback is matched against the feedback phrase lists.
ConversationCounts count(const Conversation& conv, const nlu::Nlu& nlu);

struct MetricsReport {
  std::size_t conversations = 0;
  double conversation_length = 0;
  double mean_return = 0;
  double cooperative = 0;  // per conversation
  double non_cooperative = 0;
  double positive_feedback = 0;
  double negative_feedback = 0;
  double question_ending_rate = 0;  // bot turns that end in a question / bot turns
  double unique_providers = 0;      // per conversation
  double fact_fraction = 0;         // fact utterances / bot utterances
  double focus_pivot_rate = 0;      // focus changes between consecutive bot turns / opportunities

  /// Field names and values in reporting order.
  std::vector<std::pair<std::string, double>> fields() const;
  nlohmann::json to_json() const;
};

MetricsReport aggregate(const std::vector<ConversationCounts>& counts);

/// Signed relative change in percent; 0 when both are 0, NaN when only the control is 0.
double percent_change(double arm, double control);

struct Interval {
  double lo = 0;
  double hi = 0;
};

/// Percentile bootstrap CI of the mean.
Interval bootstrap_mean_ci(const std::vector<double>& xs, std::uint64_t seed, std::size_t resamples = 1000,
                           double level = 0.95);

struct ArmResult {
  std::string name;
  std::vector<ConversationCounts> counts;
  std::vector<int> conversation_ratings;
  MetricsReport report;
  Interval length_ci;
  Interval return_ci;
};

struct AbReport {
  std::size_t control = 0;
  std::uint64_t seed = 0;
  std::vector<ArmResult> arms;

  std::string to_text() const;
  nlohmann::json to_json() const;
};

struct Arm {
  std::string name;
  DialogueManager* dm = nullptr;
};

/// Runs every arm on the same n profiles and episode seeds. Throws on fewer than 2 arms.
AbReport ab_experiment(const std::vector<Arm>& arms, std::size_t control, const World& world, std::size_t n,
                       std::uint64_t seed);

}  // namespace dcrl::sim
