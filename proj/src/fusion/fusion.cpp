#include "dcrl/fusion/fusion.hpp"

#include "dcrl/core/text.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace dcrl::fusion {

namespace {

const std::set<std::string> kClauseOpeners = {"that", "and", "but", "because", "so", "when", "while", "since", "if", "where", "then"};

bool is_final_punct(const std::string& t) { return t == "." || t == "?" || t == "!"; }

std::string normalize(const std::string& token) {
  std::size_t b = 0, e = token.size();
  auto keep = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '\''; };
  while (b < e && !keep(token[b])) ++b;
  while (e > b && !keep(token[e - 1])) --e;
  return text::to_lower(token.substr(b, e - b));
}

std::string capitalize(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s;
}

std::string decapitalize(std::string s) {
  if (s == "I" || s.rfind("I'", 0) == 0) return s;
  if (!s.empty()) s[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(s[0])));
  return s;
}

}  // namespace

Vocabulary Vocabulary::from_kb(const providers::KnowledgeBase& kb) {
  Vocabulary v;
  v.entities_ = kb.entity_index();
  for (const auto& e : kb.entries()) {
    v.pronouns_[e.id] = e.pronoun;
    v.plurals_[e.id] = text::words(e.plural);
  }
  v.connectives_ = {"and", "Also,", "By the way,"};
  v.rebuild_phrases();
  return v;
}

Vocabulary Vocabulary::load(const std::filesystem::path& path, const providers::KnowledgeBase& kb) {
  Vocabulary v = from_kb(kb);
  for (const auto& line : text::read_lines(path.string())) {
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      if (std::find(v.connectives_.begin(), v.connectives_.end(), line) == v.connectives_.end())
        v.connectives_.push_back(line);
      continue;
    }
    const auto entity = text::trim(line.substr(0, tab));
    if (!kb.contains(entity)) throw std::invalid_argument("fusion vocabulary: unknown entity '" + entity + "'");
    v.pronouns_[entity] = text::trim(line.substr(tab + 1));
  }
  v.rebuild_phrases();
  return v;
}

void Vocabulary::rebuild_phrases() {
  phrases_.clear();
  for (const auto& [id, p] : pronouns_) {
    phrases_.insert(text::to_lower(p));
    if (p == "they") phrases_.insert("they're");
    if (p == "it") phrases_.insert("it's");
  }
  for (const auto& c : connectives_) phrases_.insert(text::to_lower(c));
}

std::optional<std::string> Vocabulary::pronoun(const EntityId& id) const {
  auto it = pronouns_.find(id);
  if (it == pronouns_.end() || it->second.empty()) return std::nullopt;
  return it->second;
}

const std::vector<std::string>* Vocabulary::plural(const EntityId& id) const {
  auto it = plurals_.find(id);
  return it == plurals_.end() ? nullptr : &it->second;
}

bool Vocabulary::allows(const std::string& phrase) const { return phrases_.count(text::to_lower(phrase)) != 0; }

std::vector<std::string> tokenize(const std::string& sentence) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : sentence) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  if (!out.empty()) {
    auto& last = out.back();
    if (last.size() > 1 && is_final_punct(std::string(1, last.back()))) {
      std::string p(1, last.back());
      last.pop_back();
      out.push_back(p);
    }
  }
  return out;
}

std::string marker(ActKind previous, ActKind next) {
  if (previous == ActKind::Ack) return "";
  if (next == ActKind::Fact) {
    if (previous == ActKind::Fact) return "Also, ";
    if (previous == ActKind::Sound || previous == ActKind::Quiz) return "By the way, ";
  }
  return "";
}

EditProgram tag(const std::vector<std::string>& utterances, const std::vector<DialogueAct>& acts,
                const Vocabulary& vocab) {
  if (!acts.empty() && acts.size() != utterances.size())
    throw std::invalid_argument("fusion: acts must be empty or match utterances");
  EditProgram prog;
  std::vector<std::size_t> start;  // offset of each utterance in prog.tokens
  std::vector<std::vector<std::string>> norm;
  for (const auto& u : utterances) {
    start.push_back(prog.tokens.size());
    auto toks = tokenize(u);
    std::vector<std::string> n;
    for (const auto& t : toks) n.push_back(normalize(t));
    norm.push_back(std::move(n));
    prog.tokens.insert(prog.tokens.end(), toks.begin(), toks.end());
  }
  prog.edits.assign(prog.tokens.size(), Edit{});

  std::set<EntityId> mentioned;
  bool sentence_joined = false;
  for (std::size_t i = 0; i < utterances.size(); ++i) {
    const auto& cur = norm[i];
    const std::size_t off = start[i];
    const std::size_t len = cur.size();
    const auto cur_mentions = vocab.entities().mentions(cur);
    bool joined = false, pronominalized = false;

    if (i > 0) {
      const auto& prev = norm[i - 1];
      const std::size_t prev_last = start[i - 1] + prev.size() - 1;
      const bool both_statements = !prev.empty() && len > 0 && prog.tokens[prev_last] == "." &&
                                   prog.edits[prev_last].tag == Tag::Keep && prog.tokens[off + len - 1] == ".";
      if (!sentence_joined && both_statements) {
        std::size_t p = 0;
        while (p + 1 < len && p + 1 < prev.size() && cur[p] == prev[p] && !cur[p].empty()) ++p;
        const nlu::EntityMention* m = nullptr;
        for (const auto& cm : cur_mentions)
          if (cm.position + cm.length <= p) m = &cm;
        if (p > 0 && m) {
          prog.edits[prev_last] = {Tag::Substitute, "and", ""};
          const bool only_mention = m->position == 0 && m->length == p;
          if (!only_mention)
            for (std::size_t k = 0; k < p; ++k) prog.edits[off + k].tag = Tag::Delete;
          joined = true;
        }
      }

      const bool question = len > 0 && prog.tokens[off + len - 1] == "?";
      for (const auto& cm : cur_mentions) {
        if (question) break;
        if (!mentioned.count(cm.entity)) continue;
        const auto* pl = vocab.plural(cm.entity);
        const auto pron = vocab.pronoun(cm.entity);
        if (!pl || !pron || pl->size() != cm.length) continue;
        if (!std::equal(pl->begin(), pl->end(), cur.begin() + static_cast<std::ptrdiff_t>(cm.position))) continue;
        if (prog.edits[off + cm.position].tag != Tag::Keep) continue;
        // Only where the mention opens a clause, so modifiers and prepositions never precede the pronoun.
        std::size_t before = cm.position;
        while (before > 0 && prog.edits[off + before - 1].tag == Tag::Delete) --before;
        if (before > 0 && !kClauseOpeners.count(cur[before - 1])) continue;
        std::string phrase = *pron;
        const std::size_t next = cm.position + cm.length;
        bool contract = false;
        if (next < len && ((phrase == "they" && cur[next] == "are") || (phrase == "it" && cur[next] == "is"))) {
          phrase += phrase == "they" ? "'re" : "'s";
          contract = true;
        }
        if (before == 0 && !joined) phrase = capitalize(phrase);
        prog.edits[off + cm.position] = {Tag::Substitute, phrase, ""};
        for (std::size_t k = 1; k < cm.length; ++k) prog.edits[off + cm.position + k].tag = Tag::Delete;
        if (contract) prog.edits[off + next].tag = Tag::Delete;
        pronominalized = true;
      }

      if (!joined && !pronominalized && len > 0) {
        const std::string m = acts.empty() ? std::string() : marker(acts[i - 1].kind, acts[i].kind);
        prog.edits[off].insert = text::trim(m);
      }
    }
    sentence_joined = joined;
    for (const auto& cm : cur_mentions) mentioned.insert(cm.entity);
  }
  return prog;
}

std::string apply(const EditProgram& program, const Vocabulary& vocab) {
  if (program.tokens.size() != program.edits.size()) throw std::invalid_argument("fusion: one edit per token required");
  std::string out;
  auto emit = [&](const std::string& w) {
    if (!out.empty() && !is_final_punct(w)) out.push_back(' ');
    out += w;
  };
  bool decap = false;
  for (std::size_t k = 0; k < program.tokens.size(); ++k) {
    const auto& e = program.edits[k];
    if (!e.insert.empty()) {
      if (!vocab.allows(e.insert)) throw std::invalid_argument("fusion: phrase outside vocabulary: " + e.insert);
      emit(e.insert);
      decap = true;
    }
    if (e.tag == Tag::Delete) continue;
    if (e.tag == Tag::Substitute) {
      if (!vocab.allows(e.phrase)) throw std::invalid_argument("fusion: phrase outside vocabulary: " + e.phrase);
      emit(e.phrase);
    } else {
      emit(decap ? decapitalize(program.tokens[k]) : program.tokens[k]);
    }
    decap = false;
  }
  return out;
}

std::string fuse(const std::vector<std::string>& utterances, const std::vector<DialogueAct>& acts,
                 const Vocabulary& vocab) {
  if (utterances.size() == 1) return utterances.front();
  return apply(tag(utterances, acts, vocab), vocab);
}

std::string fuse(const std::vector<std::string>& utterances, const Vocabulary& vocab) {
  return fuse(utterances, {}, vocab);
}

}  // namespace dcrl::fusion
