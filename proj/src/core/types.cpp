#include "dcrl/core/types.hpp"

#include <algorithm>
#include <stdexcept>

namespace dcrl {

namespace {

constexpr std::array<std::string_view, kActKindCount> kActNames = {
    "fact", "sound", "quiz", "yes_no_question", "open_question", "list_question", "ack", "focus_change"};

}  // namespace

std::string_view to_string(ActKind kind) { return kActNames[static_cast<std::size_t>(kind)]; }

ActKind act_kind_from_string(std::string_view name) {
  for (std::size_t k = 0; k < kActNames.size(); ++k)
    if (kActNames[k] == name) return static_cast<ActKind>(k);
  throw std::invalid_argument("unknown dialogue act: " + std::string(name));
}

DialogueAct::DialogueAct(ActKind k, std::optional<EntityId> e) : kind(k), entity(std::move(e)) {
  if (kind == ActKind::FocusChange && !entity) throw std::invalid_argument("FocusChange act requires a target entity");
}

bool is_question(ActKind kind) {
  switch (kind) {
    case ActKind::Quiz:
    case ActKind::YesNoQuestion:
    case ActKind::OpenQuestion:
    case ActKind::ListQuestion:
    case ActKind::FocusChange: return true;
    default: return false;
  }
}

bool DialogueAct::is_question() const { return dcrl::is_question(kind); }

bool offers_focus_change(ActKind kind) {
  return kind == ActKind::FocusChange || kind == ActKind::OpenQuestion || kind == ActKind::ListQuestion;
}

std::size_t whitespace_token_count(std::string_view text) {
  std::size_t count = 0;
  bool in_token = false;
  for (char c : text) {
    const bool space = c == ' ' || c == '\t' || c == '\n' || c == '\r';
    if (!space && !in_token) ++count;
    in_token = !space;
  }
  return count;
}

Candidate Candidate::make(std::string text, DialogueAct act, std::string provider_id, std::string content_id) {
  if (text.empty()) throw std::invalid_argument("candidate text must be non-empty");
  Candidate c;
  c.token_count = whitespace_token_count(text);
  c.text = std::move(text);
  c.offers_focus_change = dcrl::offers_focus_change(act.kind);
  if (act.kind == ActKind::FocusChange) c.target_entity = act.entity;
  c.act = std::move(act);
  c.provider_id = std::move(provider_id);
  c.content_id = std::move(content_id);
  return c;
}

std::string_view to_string(EndReason reason) {
  switch (reason) {
    case EndReason::LowScore: return "low_score";
    case EndReason::OutOfDomain: return "out_of_domain";
    case EndReason::UserStop: return "user_stop";
    case EndReason::MaxTurns: return "max_turns";
  }
  return "max_turns";
}

EndReason end_reason_from_string(std::string_view name) {
  for (auto r : {EndReason::LowScore, EndReason::OutOfDomain, EndReason::UserStop, EndReason::MaxTurns})
    if (to_string(r) == name) return r;
  throw std::invalid_argument("unknown end reason: " + std::string(name));
}

bool is_valid_rating(int rating) { return rating >= -3 && rating <= 7 && rating != 0; }

void validate(const Conversation& conversation, std::size_t max_utterances_per_turn) {
  for (std::size_t t = 0; t < conversation.turns.size(); ++t) {
    const Turn& turn = conversation.turns[t];
    const Speaker expected = (t % 2 == 0) ? Speaker::User : Speaker::Bot;
    if (turn.speaker != expected) throw std::invalid_argument("turns must alternate user/bot starting with user");
    if (turn.speaker == Speaker::User) {
      if (turn.utterances.size() != 1) throw std::invalid_argument("user turn must hold exactly one utterance");
      if (turn.utterances[0].act) throw std::invalid_argument("user utterance carries no dialogue act");
    } else {
      if (turn.utterances.empty() || turn.utterances.size() > max_utterances_per_turn)
        throw std::invalid_argument("bot turn must hold 1..K utterances");
      for (const auto& u : turn.utterances)
        if (!u.act) throw std::invalid_argument("bot utterance requires a dialogue act");
    }
    for (const auto& u : turn.utterances)
      if (u.rating && !is_valid_rating(*u.rating)) throw std::invalid_argument("rating outside {-3..-1, 1..7}");
  }
}

std::size_t conversation_length(const Conversation& conversation) { return conversation.turns.size(); }

std::string_view to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::Supervised: return "supervised";
    case PolicyKind::Saql: return "saql";
    case PolicyKind::SaqlReg: return "saql-reg";
    case PolicyKind::Caql: return "caql";
    case PolicyKind::CaqlReg: return "caql-reg";
    case PolicyKind::E2eReg: return "e2e-reg";
  }
  return "supervised";
}

PolicyKind policy_kind_from_string(std::string_view name) {
  for (auto k : {PolicyKind::Supervised, PolicyKind::Saql, PolicyKind::SaqlReg, PolicyKind::Caql, PolicyKind::CaqlReg,
                 PolicyKind::E2eReg})
    if (to_string(k) == name) return k;
  throw std::invalid_argument("unknown policy kind: " + std::string(name));
}

MdpConfig MdpConfig::defaults_for(PolicyKind kind) {
  MdpConfig c;
  switch (kind) {
    case PolicyKind::Supervised: c.gamma = 0.0; break;
    case PolicyKind::Saql: c.gamma = 0.95; break;
    case PolicyKind::SaqlReg:
    case PolicyKind::Caql:
    case PolicyKind::CaqlReg: c.gamma = 0.9; break;
    case PolicyKind::E2eReg: c.gamma = 0.8; break;
  }
  // Q-values live on a return scale, so only clearly bad states end a turn early.
  c.dm_score_threshold = kind == PolicyKind::Supervised ? 1.5 : 0.0;
  return c;
}

namespace {

Eigen::VectorXd feature_vector(std::optional<ActKind> act, bool focus_change, std::size_t tokens,
                               std::size_t turn_index, std::size_t step_index) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(kCandidateFeatureWidth));
  if (act) v(static_cast<Eigen::Index>(*act)) = 1.0;
  const auto base = static_cast<Eigen::Index>(kActKindCount);
  v(base) = focus_change ? 1.0 : 0.0;
  v(base + 1) = static_cast<double>(tokens) / FeatureScales::kTokenCount;
  v(base + 2) = static_cast<double>(turn_index) / FeatureScales::kTurnIndex;
  v(base + 3) = static_cast<double>(step_index) / FeatureScales::kStepIndex;
  return v;
}

}  // namespace

Eigen::VectorXd candidate_features(const Candidate& c, std::size_t turn_index, std::size_t step_index) {
  return feature_vector(c.act.kind, c.offers_focus_change, c.token_count, turn_index, step_index);
}

Eigen::VectorXd utterance_features(const Utterance& u, std::size_t turn_index, std::size_t step_index) {
  std::optional<ActKind> kind;
  if (u.act) kind = u.act->kind;
  return feature_vector(kind, kind && offers_focus_change(*kind), whitespace_token_count(u.text), turn_index,
                        step_index);
}

}  // namespace dcrl
