#include "dcrl/nlu/nlu.hpp"

#include "dcrl/core/text.hpp"

#include <algorithm>

namespace dcrl::nlu {

Lexicons Lexicons::defaults() {
  Lexicons l;
  l.yes = {"yes", "yeah", "sure", "ok", "okay", "yep", "please", "tell me"};
  l.no = {"no", "nope", "nah", "no thanks"};
  l.positive_feedback = {"thank you", "wonderful", "amazing", "i love it"};
  l.negative_feedback = {"stop", "shut up", "boring"};
  l.stop = {"stop", "shut up", "goodbye", "bye"};
  l.domain = {"animal", "animals", "sound", "sounds", "fact", "facts", "more", "hear", "learn", "know",
              "guess", "cool", "wow", "hmm", "great", "interesting", "next", "another", "boring", "zoo"};
  return l;
}

Lexicons Lexicons::load(const std::filesystem::path& dir) {
  Lexicons l;
  l.yes = text::read_lines((dir / "yes.txt").string());
  l.no = text::read_lines((dir / "no.txt").string());
  l.positive_feedback = text::read_lines((dir / "positive_feedback.txt").string());
  l.negative_feedback = text::read_lines((dir / "negative_feedback.txt").string());
  l.stop = text::read_lines((dir / "stop.txt").string());
  l.domain = text::read_lines((dir / "domain.txt").string());
  return l;
}

EntityIndex::EntityIndex(const std::vector<std::pair<EntityId, std::vector<std::string>>>& entries) {
  for (const auto& [id, aliases] : entries) {
    ids_.push_back(id);
    aliases_.push_back({id, text::words(id)});
    for (const auto& a : aliases) aliases_.push_back({id, text::words(a)});
  }
  std::stable_sort(aliases_.begin(), aliases_.end(),
                   [](const Alias& a, const Alias& b) { return a.tokens.size() > b.tokens.size(); });
}

std::vector<EntityMention> EntityIndex::mentions(const std::vector<std::string>& tokens) const {
  std::vector<EntityMention> out;
  std::size_t i = 0;
  while (i < tokens.size()) {
    bool matched = false;
    for (const auto& alias : aliases_) {
      const auto n = alias.tokens.size();
      if (n == 0 || i + n > tokens.size()) continue;
      if (std::equal(alias.tokens.begin(), alias.tokens.end(), tokens.begin() + static_cast<std::ptrdiff_t>(i))) {
        out.push_back({alias.entity, i, n});
        i += n;
        matched = true;
        break;
      }
    }
    if (!matched) ++i;
  }
  return out;
}

std::optional<EntityMention> EntityIndex::first_mention(const std::vector<std::string>& tokens) const {
  auto all = mentions(tokens);
  if (all.empty()) return std::nullopt;
  return all.front();
}

bool EntityIndex::contains(const EntityId& id) const { return std::find(ids_.begin(), ids_.end(), id) != ids_.end(); }

std::string_view to_string(Cooperation c) {
  switch (c) {
    case Cooperation::Cooperative: return "cooperative";
    case Cooperation::NonCooperative: return "non_cooperative";
    case Cooperation::Ignored: return "ignored";
  }
  return "ignored";
}

void FocusState::move_to(const EntityId& entity) {
  if (current && *current == entity) return;
  current = entity;
  history.push_back(entity);
}

namespace {

std::vector<std::vector<std::string>> tokenize_all(const std::vector<std::string>& phrases) {
  std::vector<std::vector<std::string>> out;
  for (const auto& p : phrases) out.push_back(text::words(p));
  return out;
}

}  // namespace

Nlu::Nlu(Lexicons lexicons, EntityIndex entities)
    : lexicons_(std::move(lexicons)),
      entities_(std::move(entities)),
      yes_(tokenize_all(lexicons_.yes)),
      no_(tokenize_all(lexicons_.no)),
      positive_(tokenize_all(lexicons_.positive_feedback)),
      negative_(tokenize_all(lexicons_.negative_feedback)),
      stop_(tokenize_all(lexicons_.stop)),
      domain_(tokenize_all(lexicons_.domain)) {}

std::size_t Nlu::first_match(const std::vector<std::string>& tokens,
                             const std::vector<std::vector<std::string>>& phrases) const {
  std::size_t best = std::string::npos;
  for (const auto& p : phrases) best = std::min(best, text::find_phrase(tokens, p));
  return best;
}

AnswerInterpretation Nlu::interpret_answer(const DialogueAct& question, const std::string& user_text) const {
  const auto tokens = text::words(user_text);
  const auto mention = entities_.first_mention(tokens);
  const std::size_t yes_at = first_match(tokens, yes_);
  const std::size_t no_at = first_match(tokens, no_);
  AnswerInterpretation out;
  switch (question.kind) {
    case ActKind::YesNoQuestion:
    case ActKind::FocusChange: {
      const bool names_subject = mention && question.entity && mention->entity == *question.entity;
      if (no_at != std::string::npos && (yes_at == std::string::npos || no_at < yes_at)) {
        out.cooperation = Cooperation::NonCooperative;
        out.polarity = Polarity::No;
      } else if (yes_at != std::string::npos || names_subject) {
        out.cooperation = Cooperation::Cooperative;
        out.polarity = Polarity::Yes;
      }
      break;
    }
    case ActKind::ListQuestion:
    case ActKind::OpenQuestion:
    case ActKind::Quiz: {
      if (mention) {
        out.cooperation = Cooperation::Cooperative;
        out.selected_entity = mention->entity;
        out.correct_quiz_answer = question.kind == ActKind::Quiz && question.entity && *question.entity == mention->entity;
      } else if (no_at != std::string::npos) {
        out.cooperation = Cooperation::NonCooperative;
      }
      break;
    }
    default: break;
  }
  return out;
}

FocusState Nlu::track_focus(const FocusState& state, const std::string& user_text, const Turn* bot_turn) const {
  FocusState next = state;
  const auto tokens = text::words(user_text);
  if (auto mention = entities_.first_mention(tokens)) {
    next.move_to(mention->entity);
    return next;
  }
  if (bot_turn) {
    if (auto q = closing_question(*bot_turn); q && q->kind == ActKind::FocusChange && q->entity) {
      if (interpret_answer(*q, user_text).cooperation == Cooperation::Cooperative) next.move_to(*q->entity);
    }
  }
  return next;
}

bool Nlu::in_domain(const std::string& user_text) const {
  const auto tokens = text::words(user_text);
  if (entities_.first_mention(tokens)) return true;
  for (const auto* list : {&yes_, &no_, &positive_, &negative_, &stop_, &domain_})
    if (first_match(tokens, *list) != std::string::npos) return true;
  return false;
}

bool Nlu::is_stop(const std::string& user_text) const {
  return first_match(text::words(user_text), stop_) != std::string::npos;
}

Feedback Nlu::feedback(const std::string& user_text) const {
  const auto tokens = text::words(user_text);
  if (first_match(tokens, negative_) != std::string::npos) return Feedback::Negative;
  if (first_match(tokens, positive_) != std::string::npos) return Feedback::Positive;
  return Feedback::None;
}

std::optional<DialogueAct> closing_question(const Turn& bot_turn) {
  if (bot_turn.speaker != Speaker::Bot || bot_turn.utterances.empty()) return std::nullopt;
  const auto& last = bot_turn.utterances.back();
  if (last.act && last.act->is_question()) return last.act;
  return std::nullopt;
}

}  // namespace dcrl::nlu
