#include "dcrl/providers/knowledge_base.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace dcrl::providers {

KnowledgeBase::KnowledgeBase(std::vector<EntityEntry> entries) : entries_(std::move(entries)) {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (!index_.emplace(entries_[i].id, i).second) throw std::invalid_argument("duplicate entity: " + entries_[i].id);
  }
}

KnowledgeBase KnowledgeBase::parse(const std::string& jsonl) {
  std::istringstream in(jsonl);
  std::string line;
  std::vector<EntityEntry> entries;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line);
    EntityEntry e;
    e.id = j.at("id").get<std::string>();
    e.plural = j.value("plural", e.id + "s");
    e.pronoun = j.value("pronoun", std::string("they"));
    e.aliases = j.value("aliases", std::vector<std::string>{});
    for (const auto& f : j.at("facts")) e.facts.push_back({f.at("text").get<std::string>(), f.value("source", std::string("structured"))});
    e.sound_line = j.at("sound_line").get<std::string>();
    const auto& q = j.at("quiz");
    e.quiz = {q.at("prompt").get<std::string>(), q.at("options").get<std::vector<std::string>>(),
              q.at("answer").get<std::string>()};
    e.related = j.value("related", std::vector<std::string>{});
    entries.push_back(std::move(e));
  }
  return KnowledgeBase(std::move(entries));
}

KnowledgeBase KnowledgeBase::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read knowledge base " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::vector<std::string> KnowledgeBase::lint() const {
  std::vector<std::string> problems;
  if (entries_.size() < 10) problems.push_back("knowledge base needs at least 10 entities, found " + std::to_string(entries_.size()));
  for (const auto& e : entries_) {
    if (e.facts.size() < 3) problems.push_back(e.id + ": needs at least 3 facts");
    if (e.sound_line.empty()) problems.push_back(e.id + ": missing sound line");
    for (const auto& r : e.related)
      if (!contains(r)) problems.push_back(e.id + ": related entity '" + r + "' does not exist");
    if (std::find(e.quiz.options.begin(), e.quiz.options.end(), e.quiz.answer) == e.quiz.options.end())
      problems.push_back(e.id + ": quiz answer not among options");
    for (const auto& o : e.quiz.options)
      if (!contains(o)) problems.push_back(e.id + ": quiz option '" + o + "' does not exist");
    if (e.id != [&] {
          std::string lower = e.id;
          for (char& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
          return lower;
        }())
      problems.push_back(e.id + ": entity ids must be lowercase");
  }
  return problems;
}

const EntityEntry& KnowledgeBase::at(const EntityId& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw std::out_of_range("unknown entity: " + id);
  return entries_[it->second];
}

KnowledgeBase KnowledgeBase::subset(const std::vector<EntityId>& ids) const {
  std::vector<EntityEntry> kept;
  for (const auto& id : ids) kept.push_back(at(id));
  for (auto& e : kept) {
    std::erase_if(e.related, [&](const EntityId& r) { return std::find(ids.begin(), ids.end(), r) == ids.end(); });
  }
  return KnowledgeBase(std::move(kept));
}

nlu::EntityIndex KnowledgeBase::entity_index() const {
  std::vector<std::pair<EntityId, std::vector<std::string>>> entries;
  for (const auto& e : entries_) {
    auto aliases = e.aliases;
    aliases.push_back(e.plural);
    entries.emplace_back(e.id, std::move(aliases));
  }
  return nlu::EntityIndex(entries);
}

std::string render_fact(const Fact& fact) {
  if (fact.source.empty() || fact.source == "structured") return fact.text;
  std::string body = fact.text;
  if (!body.empty()) body[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(body[0])));
  return fact.source + " says that " + body;
}

}  // namespace dcrl::providers
