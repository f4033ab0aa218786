#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dcrl {

/// Canonical lowercase animal name, the join key with the knowledge base.
using EntityId = std::string;

enum class ActKind : std::uint8_t { Fact, Sound, Quiz, YesNoQuestion, OpenQuestion, ListQuestion, Ack, FocusChange };

inline constexpr std::size_t kActKindCount = 8;

std::string_view to_string(ActKind kind);
ActKind act_kind_from_string(std::string_view name);

/// Discourse function of an utterance. `entity` is the entity the act is about
/// (the offered entity for FocusChange, the correct answer for Quiz).
struct DialogueAct {
  ActKind kind = ActKind::Fact;
  std::optional<EntityId> entity;

  DialogueAct() = default;
  DialogueAct(ActKind k, std::optional<EntityId> e = std::nullopt);

  bool is_question() const;
  bool operator==(const DialogueAct&) const = default;
};

/// True for acts that end a composed bot turn and expect an answer.
bool is_question(ActKind kind);
/// Acts that propose moving the conversation to another entity.
bool offers_focus_change(ActKind kind);

/// One provider-generated utterance: an element of the realized action set.
struct Candidate {
  std::string text;
  DialogueAct act;
  std::string provider_id;
  bool offers_focus_change = false;
  std::optional<EntityId> target_entity;
  std::size_t token_count = 0;
  /// Identifies the content so it is never proposed twice in one conversation; empty for
  /// content-free utterances such as acknowledgements.
  std::string content_id;

  static Candidate make(std::string text, DialogueAct act, std::string provider_id, std::string content_id = {});
  bool operator==(const Candidate&) const = default;
};

/// Whitespace-separated token count.
std::size_t whitespace_token_count(std::string_view text);

enum class Speaker : std::uint8_t { User, Bot };

struct Utterance {
  std::string text;
  std::optional<DialogueAct> act;  // unset for user utterances
  std::string provider_id;
  std::optional<int> rating;
  std::string content_id;

  bool operator==(const Utterance&) const = default;
};

struct Turn {
  Speaker speaker = Speaker::User;
  std::vector<Utterance> utterances;
  std::optional<EntityId> focus_after;

  bool operator==(const Turn&) const = default;
};

enum class EndReason : std::uint8_t { LowScore, OutOfDomain, UserStop, MaxTurns };

std::string_view to_string(EndReason reason);
EndReason end_reason_from_string(std::string_view name);

struct Conversation {
  std::vector<Turn> turns;
  std::optional<std::string> user_profile_id;
  EndReason ended_reason = EndReason::MaxTurns;

  bool operator==(const Conversation&) const = default;
};

/// Ratings live on the scale -3..7 with no zero.
bool is_valid_rating(int rating);

/// Throws std::invalid_argument if the conversation violates the turn-structure invariants.
void validate(const Conversation& conversation, std::size_t max_utterances_per_turn);

/// Number of turns, user and bot combined.
std::size_t conversation_length(const Conversation& conversation);

enum class PolicyKind : std::uint8_t { Supervised, Saql, SaqlReg, Caql, CaqlReg, E2eReg };

std::string_view to_string(PolicyKind kind);
PolicyKind policy_kind_from_string(std::string_view name);

struct MdpConfig {
  double gamma = 0.95;
  std::size_t max_bot_turns = 10;
  std::size_t max_utterances_per_turn = 4;
  double dm_score_threshold = 1.5;

  /// Defaults per policy kind: discount 0.95 SAQL, 0.9 CAQL and CQL-regularized, 0.8 E2E.
  static MdpConfig defaults_for(PolicyKind kind);
};

/// Normalization maxima for count features.
struct FeatureScales {
  static constexpr double kTurnIndex = 20.0;
  static constexpr double kTokenCount = 40.0;
  static constexpr double kStepIndex = 4.0;
};

/// Layout: [one-hot act (8) | offers_focus_change | tokens/40 | turn/20 | step/4].
inline constexpr std::size_t kCandidateFeatureWidth = kActKindCount + 4;

Eigen::VectorXd candidate_features(const Candidate& candidate, std::size_t turn_index, std::size_t step_index);

/// Same layout for an utterance already in the conversation; user utterances carry no act.
Eigen::VectorXd utterance_features(const Utterance& utterance, std::size_t turn_index, std::size_t step_index);

}  // namespace dcrl
