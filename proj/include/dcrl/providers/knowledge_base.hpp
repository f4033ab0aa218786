#pragma once

#include "dcrl/core/types.hpp"
#include "dcrl/nlu/nlu.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace dcrl::providers {

struct Fact {
  std::string text;
  /// "structured" for templated knowledge-graph content; otherwise the quoted site.
  std::string source;
};

struct Quiz {
  std::string prompt;
  std::vector<EntityId> options;
  EntityId answer;
};

struct EntityEntry {
  EntityId id;
  std::string plural;
  std::string pronoun;
  std::vector<std::string> aliases;
  std::vector<Fact> facts;
  std::string sound_line;
  Quiz quiz;
  std::vector<EntityId> related;
};

/// Read-only animal knowledge base. File format: one JSON object per line with keys
/// id, plural, pronoun, aliases, facts[{text,source}], sound_line, quiz{prompt,options,answer}, related.
class KnowledgeBase {
 public:
  KnowledgeBase() = default;
  explicit KnowledgeBase(std::vector<EntityEntry> entries);

  static KnowledgeBase load(const std::filesystem::path& path);
  static KnowledgeBase parse(const std::string& jsonl);

  /// Invariant violations (empty when the KB is valid): at least 10 entities, at least
  /// 3 facts each, every related entity exists, quiz answer among its options.
  std::vector<std::string> lint() const;

  const EntityEntry& at(const EntityId& id) const;
  bool contains(const EntityId& id) const { return index_.count(id) != 0; }
  const std::vector<EntityEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  /// Restricted copy holding only `ids`, with related links filtered to the kept set.
  KnowledgeBase subset(const std::vector<EntityId>& ids) const;

  nlu::EntityIndex entity_index() const;

 private:
  std::vector<EntityEntry> entries_;
  std::map<EntityId, std::size_t> index_;
};

/// Utterance text for a fact: structured facts verbatim, quoted ones with attribution.
std::string render_fact(const Fact& fact);

}  // namespace dcrl::providers
