#pragma once

#include "dcrl/core/types.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace dcrl::nlu {

/// Phrase lists matched case-insensitively on token boundaries.
struct Lexicons {
  std::vector<std::string> yes;
  std::vector<std::string> no;
  std::vector<std::string> positive_feedback;
  std::vector<std::string> negative_feedback;
  std::vector<std::string> stop;
  /// Words that keep a non-matching reply inside the animal domain.
  std::vector<std::string> domain;

  static Lexicons defaults();
  /// Reads `<dir>/{yes,no,positive_feedback,negative_feedback,stop,domain}.txt`, one phrase per line.
  static Lexicons load(const std::filesystem::path& dir);
};

struct EntityMention {
  EntityId entity;
  std::size_t position = 0;  // token index
  std::size_t length = 0;    // tokens
};

/// Exact and alias string matching of entity surface forms.
class EntityIndex {
 public:
  EntityIndex() = default;
  explicit EntityIndex(const std::vector<std::pair<EntityId, std::vector<std::string>>>& entries);

  /// Leftmost mention; longest alias wins at equal position.
  std::optional<EntityMention> first_mention(const std::vector<std::string>& tokens) const;
  std::vector<EntityMention> mentions(const std::vector<std::string>& tokens) const;
  bool contains(const EntityId& id) const;

 private:
  struct Alias {
    EntityId entity;
    std::vector<std::string> tokens;
  };
  std::vector<Alias> aliases_;  // sorted by descending token length
  std::vector<EntityId> ids_;
};

enum class Cooperation { Cooperative, NonCooperative, Ignored };
enum class Polarity { Yes, No };

std::string_view to_string(Cooperation c);

struct AnswerInterpretation {
  Cooperation cooperation = Cooperation::Ignored;
  std::optional<Polarity> polarity;
  std::optional<EntityId> selected_entity;
  bool correct_quiz_answer = false;

  bool operator==(const AnswerInterpretation&) const = default;
};

struct FocusState {
  std::optional<EntityId> current;
  std::vector<EntityId> history;

  /// Moves the focus; history grows only on an actual change.
  void move_to(const EntityId& entity);
  bool operator==(const FocusState&) const = default;
};

enum class Feedback { None, Positive, Negative };

/// Focus tracker plus user-answer interpreter.
class Nlu {
 public:
  Nlu() = default;
  Nlu(Lexicons lexicons, EntityIndex entities);

  AnswerInterpretation interpret_answer(const DialogueAct& question, const std::string& user_text) const;

  /// New focus after `user_text`, given the bot turn that preceded it (if any).
  FocusState track_focus(const FocusState& state, const std::string& user_text, const Turn* bot_turn) const;

  /// False for replies that leave the animal domain entirely.
  bool in_domain(const std::string& user_text) const;
  bool is_stop(const std::string& user_text) const;
  Feedback feedback(const std::string& user_text) const;

  const Lexicons& lexicons() const { return lexicons_; }
  const EntityIndex& entities() const { return entities_; }

 private:
  std::size_t first_match(const std::vector<std::string>& tokens, const std::vector<std::vector<std::string>>& phrases) const;

  Lexicons lexicons_;
  EntityIndex entities_;
  std::vector<std::vector<std::string>> yes_, no_, positive_, negative_, stop_, domain_;
};

/// The question that ended a bot turn, if it ended with one.
std::optional<DialogueAct> closing_question(const Turn& bot_turn);

}  // namespace dcrl::nlu
