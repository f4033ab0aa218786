#pragma once

#include "dcrl/core/types.hpp"
#include "dcrl/nn/gru.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace dcrl::encoder {

using nn::MatrixXr;
using nn::VectorXr;

/// Signed feature hashing of token uni- and bigrams, l2-normalized.
struct SentenceEmbedder {
  nn::Index dim = 64;
  std::uint64_t hash_seed = 0x5eed;
  std::vector<int> ngram_orders{1, 2};

  VectorXr embed(const std::string& text) const;
};

inline constexpr nn::Index kContextWidth = 2;  // turn/20, step/4

enum class Segment { Hidden, UserText, Context };

std::string_view to_string(Segment s);

/// Widths of the three named segments of a state vector, in their fixed order.
struct StateLayout {
  nn::Index hidden = 200;
  nn::Index sentence = 64;

  nn::Index width() const { return hidden + sentence + kContextWidth; }
  nn::Index width_of(Segment s) const;
  static constexpr Segment kOrder[3] = {Segment::Hidden, Segment::UserText, Segment::Context};
};

/// phi_x. Only constructible through `assemble`, which enforces the segment order.
class EmbeddedState {
 public:
  static EmbeddedState assemble(const StateLayout& layout, const std::vector<std::pair<Segment, VectorXr>>& parts);

  const VectorXr& values() const { return values_; }
  const StateLayout& layout() const { return layout_; }
  auto segment(Segment s) const {
    nn::Index off = 0;
    for (Segment k : StateLayout::kOrder) {
      if (k == s) break;
      off += layout_.width_of(k);
    }
    return values_.segment(off, layout_.width_of(s));
  }

 private:
  StateLayout layout_;
  VectorXr values_;
};

class LayoutError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

VectorXr context_features(std::size_t turn_index, std::size_t step_index);

EmbeddedState build_state(const StateLayout& layout, const VectorXr& hidden, const VectorXr& user_text_embedding,
                          std::size_t turn_index, std::size_t step_index);

EmbeddedState build_state(const SentenceEmbedder& e, const VectorXr& hidden, const std::string& last_user_text,
                          std::size_t turn_index, std::size_t step_index);

/// psi_a = embed(text) ++ candidate_features.
VectorXr embed_action(const SentenceEmbedder& e, const Candidate& cand, std::size_t turn_index, std::size_t step_index);

/// GRU input for one conversation utterance.
VectorXr utterance_input(const SentenceEmbedder& e, const Utterance& u, std::size_t turn_index, std::size_t step_index);

/// Flattened utterance stream of a conversation as GRU inputs, one column per utterance.
MatrixXr conversation_inputs(const SentenceEmbedder& e, const Conversation& conv);

VectorXr encode_history(const nn::GruCell<double>& cell, const SentenceEmbedder& e, const Conversation& conv);

/// Incremental encoder: feeds one utterance at a time so rollouts never re-run the prefix.
class HistoryCursor {
 public:
  HistoryCursor(const nn::GruCell<double>* cell, const SentenceEmbedder* embedder);

  void push(const Utterance& u, std::size_t turn_index, std::size_t step_index);
  const VectorXr& hidden() const { return hidden_; }

 private:
  const nn::GruCell<double>* cell_;
  const SentenceEmbedder* embedder_;
  VectorXr hidden_;
};

/// Widths and hashing parameters every consumer of embedded data must agree on.
struct ModelManifest {
  nn::Index sentence_dim = 64;
  std::uint64_t hash_seed = 0x5eed;
  std::vector<int> ngram_orders{1, 2};
  nn::Index gru_hidden = 200;
  nn::Index gru_input = 0;
  nn::Index state_width = 0;
  nn::Index action_width = 0;
  std::string feature_layout;

  static ModelManifest make(const SentenceEmbedder& e, nn::Index gru_hidden);
  SentenceEmbedder embedder() const;
  StateLayout state_layout() const { return {gru_hidden, sentence_dim}; }

  nlohmann::json to_json() const;
  static ModelManifest from_json(const nlohmann::json& j);
  /// Stable short id (hex digest of the canonical JSON).
  std::string id() const;
};

class ManifestMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Throws ManifestMismatch naming the first differing field.
void require_compatible(const ModelManifest& expected, const ModelManifest& actual);

}  // namespace dcrl::encoder
