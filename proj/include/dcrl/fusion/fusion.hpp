#pragma once

#include "dcrl/core/types.hpp"
#include "dcrl/nlu/nlu.hpp"
#include "dcrl/providers/knowledge_base.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace dcrl::fusion {

enum class Tag { Keep, Delete, Substitute };

struct Edit {
  Tag tag = Tag::Keep;
  std::string phrase;  // replacement for Substitute
  std::string insert;  // connective emitted before the token, possibly empty
};

/// One tag per input token. Tokens are whitespace-separated, with sentence-final
/// punctuation split off as its own token so it can be substituted.
struct EditProgram {
  std::vector<std::string> tokens;
  std::vector<Edit> edits;
};

/// Pronoun table, entity matcher and the closed set of substitution phrases.
class Vocabulary {
 public:
  Vocabulary() = default;

  /// Pronouns and plural surface forms taken from the knowledge base.
  static Vocabulary from_kb(const providers::KnowledgeBase& kb);
  /// As from_kb, then applies a `entity<TAB>pronoun` file; single-field lines are connectives.
  static Vocabulary load(const std::filesystem::path& path, const providers::KnowledgeBase& kb);

  const nlu::EntityIndex& entities() const { return entities_; }
  std::optional<std::string> pronoun(const EntityId& id) const;
  const std::vector<std::string>* plural(const EntityId& id) const;
  /// Case-insensitive membership of a substitution or insertion phrase.
  bool allows(const std::string& phrase) const;

 private:
  void rebuild_phrases();

  nlu::EntityIndex entities_;
  std::map<EntityId, std::string> pronouns_;
  std::map<EntityId, std::vector<std::string>> plurals_;
  std::vector<std::string> connectives_;
  std::set<std::string> phrases_;
};

std::vector<std::string> tokenize(const std::string& sentence);

/// Tags the concatenation of `utterances`. `acts` may be empty (markers then default to "").
EditProgram tag(const std::vector<std::string>& utterances, const std::vector<DialogueAct>& acts,
                const Vocabulary& vocab);

/// Renders an edit program; throws std::invalid_argument if it uses a phrase outside `vocab`.
std::string apply(const EditProgram& program, const Vocabulary& vocab);

/// Discourse marker placed between two consecutive utterances when no other rule fired.
std::string marker(ActKind previous, ActKind next);

std::string fuse(const std::vector<std::string>& utterances, const std::vector<DialogueAct>& acts,
                 const Vocabulary& vocab);
std::string fuse(const std::vector<std::string>& utterances, const Vocabulary& vocab);

}  // namespace dcrl::fusion
