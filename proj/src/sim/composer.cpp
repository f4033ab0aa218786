#include "dcrl/core/text.hpp"
#include "dcrl/sim/sim.hpp"

#include <algorithm>
#include <stdexcept>

namespace dcrl::sim {

namespace {

bool has_word(const std::vector<std::string>& tokens, std::string_view w) {
  return std::find(tokens.begin(), tokens.end(), w) != tokens.end();
}

Request request_from_text(const std::string& text) {
  const auto tokens = text::words(text);
  if (has_word(tokens, "sound") || has_word(tokens, "sounds")) return Request::Sound;
  if (text::find_phrase(tokens, {"tell", "me"}) != std::string::npos || has_word(tokens, "learn") ||
      has_word(tokens, "more") || has_word(tokens, "fact") || has_word(tokens, "facts"))
    return Request::Facts;
  return Request::None;
}

}  // namespace

Composer::Composer(const World* world, std::uint64_t seed) : world_(world), seed_(seed) {}

void Composer::end(EndReason reason) {
  end_ = reason;
  conv_.ended_reason = reason;
  candidates_.clear();
  awaiting_user_ = false;
}

void Composer::user_says(const std::string& text) {
  if (ended()) throw std::logic_error("conversation has ended");
  if (!awaiting_user_) throw std::logic_error("bot turn in progress");
  const Turn* bot = conv_.turns.empty() ? nullptr : &conv_.turns.back();
  const auto question = bot ? nlu::closing_question(*bot) : std::nullopt;
  const std::string offer = bot && !bot->utterances.empty() ? bot->utterances.back().content_id : std::string();

  Turn user;
  user.speaker = Speaker::User;
  user.utterances.push_back(Utterance{text, std::nullopt, {}, std::nullopt, {}});
  last_user_text_ = text;
  user_question_ = text.find('?') != std::string::npos;

  const auto& nlu = world_->nlu;
  if (nlu.is_stop(text) || !nlu.in_domain(text)) {
    user.focus_after = focus_.current;
    conv_.turns.push_back(std::move(user));
    end(nlu.is_stop(text) ? EndReason::UserStop : EndReason::OutOfDomain);
    return;
  }

  last_answer_.reset();
  after_cooperative_ = false;
  request_ = Request::None;
  if (question) {
    last_answer_ = nlu.interpret_answer(*question, text);
    after_cooperative_ = last_answer_->cooperation == nlu::Cooperation::Cooperative;
    if (after_cooperative_) {
      if (question->kind == ActKind::FocusChange)
        request_ = offer.rfind("offer_sound:", 0) == 0 ? Request::Sound : Request::Facts;
      else if (question->kind != ActKind::Quiz)
        request_ = Request::Facts;
    }
  }
  if (request_ == Request::None) request_ = request_from_text(text);
  focus_ = nlu.track_focus(focus_, text, bot);
  user.focus_after = focus_.current;
  conv_.turns.push_back(std::move(user));

  turn_index_ = conv_.turns.size();
  this_turn_.clear();
  this_turn_ratings_.clear();
  served_content_ = false;
  awaiting_user_ = false;
  refresh_candidates();
}

void Composer::refresh_candidates() {
  providers::CompositionContext ctx;
  ctx.focus = focus_;
  ctx.utterances_this_turn = this_turn_;
  ctx.step_index = this_turn_.size();
  ctx.turn_index = turn_index_;
  ctx.used_content_ids = used_;
  ctx.after_cooperative_answer = after_cooperative_;
  try {
    candidates_ = providers::generate_candidates(ctx, world_->kb, derive_seed(seed_, turn_index_ * 8 + ctx.step_index),
                                                 world_->caps);
  } catch (const providers::EmptyCandidateSet&) {
    candidates_.clear();
  }
}

void Composer::select(std::size_t index, std::optional<int> rating) {
  if (ended() || awaiting_user_) throw std::logic_error("no bot turn in progress");
  const Candidate cand = candidates_.at(index);
  this_turn_.push_back(cand);
  this_turn_ratings_.push_back(rating);
  if (!cand.content_id.empty()) used_.insert(cand.content_id);
  if (cand.act.kind != ActKind::Ack) served_content_ = true;
  if (cand.act.is_question() || this_turn_.size() >= world_->mdp.max_utterances_per_turn)
    finish_turn();
  else
    refresh_candidates();
}

void Composer::select_final(std::size_t index, std::optional<int> rating) {
  if (ended() || awaiting_user_) throw std::logic_error("no bot turn in progress");
  const Candidate cand = candidates_.at(index);
  this_turn_.push_back(cand);
  this_turn_ratings_.push_back(rating);
  if (!cand.content_id.empty()) used_.insert(cand.content_id);
  finish_turn();
  if (!ended()) end(EndReason::LowScore);
}

void Composer::decline() {
  if (ended() || awaiting_user_) throw std::logic_error("no bot turn in progress");
  if (this_turn_.empty())
    end(EndReason::LowScore);
  else
    finish_turn();
}

void Composer::finish_turn() {
  Turn bot;
  bot.speaker = Speaker::Bot;
  std::vector<std::string> texts;
  std::vector<DialogueAct> acts;
  for (std::size_t i = 0; i < this_turn_.size(); ++i) {
    const auto& c = this_turn_[i];
    bot.utterances.push_back(Utterance{c.text, c.act, c.provider_id, this_turn_ratings_[i], c.content_id});
    texts.push_back(c.text);
    acts.push_back(c.act);
  }
  bot.focus_after = focus_.current;
  conv_.turns.push_back(std::move(bot));
  last_response_ = fusion::fuse(texts, acts, world_->vocab);
  ++bot_turns_;
  this_turn_.clear();
  this_turn_ratings_.clear();
  candidates_.clear();
  if (bot_turns_ >= world_->mdp.max_bot_turns)
    end(EndReason::MaxTurns);
  else
    awaiting_user_ = true;
}

}  // namespace dcrl::sim
