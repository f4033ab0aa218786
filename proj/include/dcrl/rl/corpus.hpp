#pragma once

#include "dcrl/core/types.hpp"
#include "dcrl/encoder/encoder.hpp"
#include "dcrl/rl/qlearning.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

namespace dcrl::rl {

/// One composition step as logged during data generation: every candidate with its
/// rating, and the behavior policy's choice (absent when it declined to speak).
struct StepRecord {
  std::size_t conversation = 0;
  std::size_t turn = 0;  // index into Conversation::turns (a bot turn)
  std::size_t step = 0;
  std::vector<Candidate> candidates;
  std::vector<int> ratings;
  std::optional<std::size_t> selected;
  double behavior_prob = 1.0;

  bool operator==(const StepRecord&) const = default;
};

nlohmann::json to_json(const StepRecord& r);
StepRecord step_from_json(const nlohmann::json& j);
void write_steps(std::ostream& out, const std::vector<StepRecord>& steps);
void write_steps(const std::filesystem::path& path, const std::vector<StepRecord>& steps);
std::vector<StepRecord> read_steps(const std::filesystem::path& path);

struct CorpusPoint {
  std::uint32_t conversation = 0;
  std::uint32_t history = 0;         // utterances before this decision
  std::int32_t user_column = -1;     // input column of the last user utterance
  std::uint32_t turn = 0;
  std::uint32_t step = 0;
  std::vector<std::uint32_t> actions;  // columns of Corpus::actions
  std::vector<double> ratings;
  std::int32_t selected = -1;
  double behavior_prob = 1.0;
};

struct CorpusTransition {
  std::uint32_t point = 0;
  std::uint32_t slot = 0;   // index of the taken action in the point's candidate list
  double reward = 0;
  std::int64_t next = -1;   // next decision point, -1 when terminal
};

/// Raw-text training data with every text already hashed: GRU inputs per conversation,
/// deduplicated action embeddings, decision points and selected-action transitions.
struct Corpus {
  encoder::SentenceEmbedder embedder;
  std::vector<MatrixXr> inputs;
  MatrixXr actions;
  std::vector<CorpusPoint> points;
  std::vector<CorpusTransition> transitions;
  std::vector<std::vector<std::uint32_t>> points_of;  // per conversation, in order

  static Corpus build(const std::vector<Conversation>& conversations, const std::vector<StepRecord>& steps,
                      const encoder::SentenceEmbedder& embedder);

  std::size_t supervised_labels() const;
  std::size_t rl_labels() const { return transitions.size(); }

  /// phi for `point` given the GRU states of its conversation.
  VectorXr state(const CorpusPoint& point, const MatrixXr& conversation_states, Index hidden) const;
};

/// Frozen-encoder view of a corpus (or any tabular problem): states as columns.
struct TransitionDataset {
  MatrixXr states;
  MatrixXr actions;
  std::vector<std::vector<std::uint32_t>> candidates;
  std::vector<std::int32_t> selected;
  std::vector<CorpusTransition> transitions;

  Transition materialize(std::size_t k) const;
  Batch batch(const std::vector<std::size_t>& ids) const;
  Box action_box() const { return Box::of_columns(actions); }
};

TransitionDataset embed_corpus(const Corpus& corpus, const nn::GruCell<double>& cell);

}  // namespace dcrl::rl
