#include "dcrl/core/text.hpp"
#include "dcrl/sim/sim.hpp"

#include <algorithm>
#include <array>

namespace dcrl::sim {

namespace {

template <std::size_t N>
std::string pick(Rng& rng, const std::array<const char*, N>& pool) {
  return pool[uniform_index(rng, N)];
}

constexpr std::array<const char*, 4> kFillers = {"cool", "wow", "interesting", "hmm"};
constexpr std::array<const char*, 3> kYes = {"yes", "sure", "okay"};
constexpr std::array<const char*, 2> kOutOfDomain = {"what's the weather like today?", "set a timer"};

bool contains(const std::vector<EntityId>& v, const EntityId& e) { return std::find(v.begin(), v.end(), e) != v.end(); }

}  // namespace

SimUserProfile sample_profile(const World& world, std::uint64_t seed, std::size_t index) {
  Rng rng(seed);
  const auto& cfg = world.sim;
  SimUserProfile p;
  p.id = "user-" + std::to_string(index);
  p.engagement = uniform(rng, cfg.engagement_min, cfg.engagement_max);
  p.prefers_facts = bernoulli(rng, cfg.fact_lover_fraction);
  for (auto i : sample_sorted(rng, world.kb.size(), cfg.favorites)) p.favorites.push_back(world.kb.entries()[i].id);
  p.stop_threshold = cfg.stop_threshold;
  p.seed = seed;
  return p;
}

Episode::Episode(const World* world, SimUserProfile profile, std::uint64_t seed)
    : world_(world),
      profile_(std::move(profile)),
      seed_(seed),
      composer_(world, derive_seed(seed, 1)),
      user_rng_(derive_seed(seed, 2)),
      engagement_(std::clamp(profile_.engagement, 0.0, 1.0)) {
  const auto& kb = world_->kb;
  EntityId topic;
  if (!profile_.favorites.empty() && bernoulli(user_rng_, 0.7))
    topic = profile_.favorites[uniform_index(user_rng_, profile_.favorites.size())];
  else
    topic = kb.entries()[uniform_index(user_rng_, kb.size())].id;
  composer_.user_says(profile_.prefers_facts ? "tell me about " + kb.at(topic).plural
                                             : "how does a " + topic + " sound?");
}

int Episode::rating(std::size_t i) const {
  const auto& cand = composer_.candidates().at(i);
  const std::uint64_t position = composer_.turn_index() * 8 + composer_.step_index();
  Rng rng(derive_seed(derive_seed(seed_, 5), text::fnv1a(cand.text) ^ position));
  return rate_utterance(cand, rating_context(composer_, profile_), world_->sim.rater_sigma, rng);
}

double Episode::expected_rating(std::size_t i) const {
  return base_score(composer_.candidates().at(i), rating_context(composer_, profile_));
}

void Episode::select(std::size_t i) {
  const int r = rating(i);
  total_reward_ += r;
  ++decisions_;
  composer_.select(i, r);
  if (composer_.awaiting_user()) after_turn();
}

void Episode::select_final(std::size_t i) {
  const int r = rating(i);
  total_reward_ += r;
  ++decisions_;
  composer_.select_final(i, r);
}

void Episode::decline() {
  composer_.decline();
  if (composer_.awaiting_user()) after_turn();
}

void Episode::after_turn() {
  const auto& cfg = world_->sim;
  const Turn& bot = composer_.conversation().turns.back();
  for (const auto& u : bot.utterances) {
    switch (u.act->kind) {
      case ActKind::Fact:
        engagement_ += cfg.fact_gain * (profile_.prefers_facts ? cfg.fact_lover_multiplier : 1.0);
        break;
      case ActKind::Sound:
        engagement_ += sounds_heard_ == 0 ? cfg.first_sound_gain : -cfg.repeat_sound_loss;
        ++sounds_heard_;
        break;
      case ActKind::Quiz: engagement_ += cfg.quiz_gain; break;
      default: break;
    }
  }
  engagement_ = std::clamp(engagement_, 0.0, 1.0);

  const double theta = profile_.stop_threshold;
  const double p_stop = cfg.stop_base + (1 - cfg.stop_base) * std::clamp((theta - engagement_) / theta, 0.0, 1.0);
  if (bernoulli(user_rng_, p_stop)) {
    composer_.user_says(engagement_ < cfg.negative_feedback_below ? "stop" : "goodbye");
    return;
  }
  if (bernoulli(user_rng_, cfg.out_of_domain)) {
    composer_.user_says(pick(user_rng_, kOutOfDomain));
    return;
  }
  std::string text = reply(bot);
  if (engagement_ > cfg.positive_feedback_above && bernoulli(user_rng_, cfg.feedback_probability))
    text = (bernoulli(user_rng_, 0.5) ? "thank you! " : "wonderful! ") + text;
  else if (engagement_ < cfg.negative_feedback_below && bernoulli(user_rng_, cfg.feedback_probability))
    text = "this is boring. " + text;

  const auto before = composer_.focus().current;
  composer_.user_says(text);
  const auto after = composer_.focus().current;
  if (after && after != before && contains(profile_.favorites, *after))
    engagement_ = std::clamp(engagement_ + cfg.favorite_gain, 0.0, 1.0);
}

bool Episode::prefers(const Utterance& q) const {
  const auto& id = q.content_id;
  switch (q.act->kind) {
    case ActKind::FocusChange:
      return (q.act->entity && contains(profile_.favorites, *q.act->entity)) ||
             (id.rfind("offer_facts:", 0) == 0 && profile_.prefers_facts) ||
             (id.rfind("offer_sound:", 0) == 0 && !profile_.prefers_facts);
    case ActKind::YesNoQuestion: return profile_.prefers_facts;
    case ActKind::Quiz: return !profile_.prefers_facts;
    case ActKind::ListQuestion:
      for (const auto& f : profile_.favorites)
        if (id.find(f) != std::string::npos) return true;
      return false;
    default: return false;
  }
}

std::string Episode::reply(const Turn& bot) {
  const auto& cfg = world_->sim;
  const auto q = nlu::closing_question(bot);
  if (q) {
    const double p = std::clamp(
        cfg.cooperation_base + cfg.cooperation_gain * engagement_ + (prefers(bot.utterances.back()) ? cfg.preference_bonus : 0),
        0.0, 1.0);
    const bool cooperate = bernoulli(user_rng_, p);
    engagement_ = std::clamp(engagement_ + (cooperate ? cfg.cooperative_gain : -cfg.uncooperative_loss), 0.0, 1.0);
    return reply_to_question(bot.utterances.back(), cooperate);
  }
  if (bernoulli(user_rng_, 0.5)) return pick(user_rng_, kFillers);
  const auto& focus = composer_.focus().current;
  if (!focus) return "tell me about animals";
  const auto& entry = world_->kb.at(*focus);
  if (profile_.prefers_facts || entry.related.empty()) return "tell me more about " + entry.plural;
  return "how does a " + entry.related[uniform_index(user_rng_, entry.related.size())] + " sound?";
}

std::string Episode::reply_to_question(const Utterance& question, bool cooperate) {
  const auto& kb = world_->kb;
  const ActKind kind = question.act->kind;
  if (!cooperate) {
    if (bernoulli(user_rng_, 0.25)) return pick(user_rng_, kFillers);
    switch (kind) {
      case ActKind::Quiz: return bernoulli(user_rng_, 0.5) ? "no idea" : "no, I don't know";
      case ActKind::ListQuestion:
      case ActKind::OpenQuestion: return bernoulli(user_rng_, 0.5) ? "no, neither" : "no idea";
      default: return bernoulli(user_rng_, 0.5) ? "no thanks" : "nope";
    }
  }
  switch (kind) {
    case ActKind::Quiz: {
      const EntityId answer = *question.act->entity;
      const auto& options = kb.at(answer).quiz.options;
      if (bernoulli(user_rng_, 0.5 + 0.4 * engagement_) || options.size() < 2) return "a " + answer;
      std::vector<EntityId> wrong;
      for (const auto& o : options)
        if (o != answer) wrong.push_back(o);
      return "a " + wrong[uniform_index(user_rng_, wrong.size())];
    }
    case ActKind::ListQuestion: {
      const auto body = question.content_id.substr(question.content_id.find(':') + 1);
      const auto bar = body.find('|');
      const std::array<EntityId, 2> options = {body.substr(0, bar), body.substr(bar + 1)};
      for (const auto& o : options)
        if (contains(profile_.favorites, o)) return "the " + o;
      return "the " + options[uniform_index(user_rng_, 2)];
    }
    case ActKind::OpenQuestion: {
      const EntityId e = !profile_.favorites.empty() && bernoulli(user_rng_, 0.5)
                             ? profile_.favorites[uniform_index(user_rng_, profile_.favorites.size())]
                             : kb.entries()[uniform_index(user_rng_, kb.size())].id;
      return "tell me about " + kb.at(e).plural;
    }
    default: return pick(user_rng_, kYes);
  }
}

int Episode::conversation_rating() const {
  double sum = 0;
  std::size_t n = 0;
  for (const auto& t : composer_.conversation().turns)
    for (const auto& u : t.utterances)
      if (u.rating) {
        sum += *u.rating;
        ++n;
      }
  const double mean = n ? sum / static_cast<double>(n) : 0.0;
  Rng rng(derive_seed(seed_, 9));
  const double raw = 0.5 * mean + 0.5 * (10 * engagement_ - 3) + world_->sim.rater_sigma * standard_normal(rng);
  return discretize_rating(raw);
}

}  // namespace dcrl::sim
