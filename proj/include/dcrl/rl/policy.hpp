#pragma once

#include "dcrl/core/types.hpp"
#include "dcrl/encoder/encoder.hpp"
#include "dcrl/rl/qlearning.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>

namespace dcrl::rl {

/// A trained dialogue manager: hashed sentence embedder + GRU history encoder + a head
/// scoring [phi_x; psi_a]. Supervised scorers and Q-networks share this shape.
struct Policy {
  PolicyKind kind = PolicyKind::Supervised;
  encoder::SentenceEmbedder embedder;
  nn::GruCell<double> cell;
  Net head;
  double threshold = 1.5;
  nlohmann::json meta = nlohmann::json::object();

  encoder::ModelManifest manifest() const { return encoder::ModelManifest::make(embedder, cell.hidden_width); }
  VectorXr score(const VectorXr& state, const MatrixXr& actions) const { return q_values(head, state, actions); }

  void save(const std::filesystem::path& path) const;
  static Policy load(const std::filesystem::path& path);
};

struct Selection {
  std::size_t index = 0;
  double score = 0;
};

/// Argmax with ties to the lowest index.
Selection select_action(const VectorXr& scores);
Selection select_action(const Policy& policy, const encoder::EmbeddedState& state, const MatrixXr& actions);

}  // namespace dcrl::rl
