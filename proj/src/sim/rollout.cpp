#include "dcrl/sim/sim.hpp"

#include <limits>
#include <stdexcept>

namespace dcrl::sim {

PolicyDm::PolicyDm(const rl::Policy* policy) : policy_(policy), cursor_(&policy->cell, &policy->embedder) {}

void PolicyDm::begin() {
  cursor_ = encoder::HistoryCursor(&policy_->cell, &policy_->embedder);
  consumed_ = 0;
}

encoder::EmbeddedState PolicyDm::state(const Composer& c) {
  // The utterance stream is append-only: finished turns, then the bot turn in progress.
  std::size_t k = 0;
  const auto& turns = c.conversation().turns;
  for (std::size_t t = 0; t < turns.size(); ++t)
    for (std::size_t s = 0; s < turns[t].utterances.size(); ++s, ++k)
      if (k >= consumed_) cursor_.push(turns[t].utterances[s], t, s);
  const auto& current = c.this_turn();
  for (std::size_t s = 0; s < current.size(); ++s, ++k)
    if (k >= consumed_) {
      const auto& cand = current[s];
      cursor_.push(Utterance{cand.text, cand.act, cand.provider_id, std::nullopt, cand.content_id}, c.turn_index(), s);
    }
  consumed_ = k;
  return encoder::build_state(policy_->embedder, cursor_.hidden(), c.last_user_text(), c.turn_index(), c.step_index());
}

MatrixXr PolicyDm::actions(const Composer& c) const {
  const auto& cands = c.candidates();
  MatrixXr a(policy_->embedder.dim + static_cast<Index>(kCandidateFeatureWidth), static_cast<Index>(cands.size()));
  for (std::size_t i = 0; i < cands.size(); ++i)
    a.col(static_cast<Index>(i)) = encoder::embed_action(policy_->embedder, cands[i], c.turn_index(), c.step_index());
  return a;
}

VectorXr PolicyDm::scores(const Composer& c, const Episode*) {
  const auto phi = state(c);
  return policy_->score(phi.values(), actions(c));
}

VectorXr MyopicOracleDm::scores(const Composer& c, const Episode* episode) {
  const SimUserProfile fallback;
  const auto ctx = rating_context(c, episode ? episode->profile() : fallback);
  VectorXr s(static_cast<Index>(c.candidates().size()));
  for (std::size_t i = 0; i < c.candidates().size(); ++i) s[static_cast<Index>(i)] = base_score(c.candidates()[i], ctx);
  return s;
}

Decision greedy_decision(const VectorXr& scores, double threshold, std::size_t step_index) {
  if (scores.size() == 0) return {};
  const auto best = rl::argmax_stable(scores);
  if (scores[static_cast<Index>(best)] >= threshold) return {Decision::Kind::Select, best};
  if (step_index == 0) return {Decision::Kind::SelectFinal, best};
  return {};
}

void step_greedy(DialogueManager& dm, Episode& ep) {
  auto& c = ep.composer();
  if (c.candidates().empty()) {
    ep.decline();
    return;
  }
  const auto d = greedy_decision(dm.scores(c, &ep), dm.threshold(), c.step_index());
  switch (d.kind) {
    case Decision::Kind::Select: ep.select(d.index); break;
    case Decision::Kind::SelectFinal: ep.select_final(d.index); break;
    case Decision::Kind::Decline: ep.decline(); break;
  }
}

namespace {

double continue_myopic(Episode ep, std::size_t turn_limit) {
  MyopicOracleDm myopic;
  const double start = ep.total_reward();
  while (!ep.done() && ep.composer().bot_turns() < turn_limit) step_greedy(myopic, ep);
  return ep.total_reward() - start;
}

}  // namespace

VectorXr PlannerDm::scores(const Composer& c, const Episode* episode) {
  if (!episode) throw std::invalid_argument("planner needs a simulated episode to branch on");
  const std::size_t limit = c.bot_turns() + 1 + horizon_;
  const std::size_t n = c.candidates().size();
  double base = -std::numeric_limits<double>::infinity();
  if (c.step_index() > 0) {
    Episode branch = *episode;
    branch.decline();
    base = continue_myopic(std::move(branch), limit);
  }
  VectorXr s(static_cast<Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    Episode branch = *episode;
    const double before = branch.total_reward();
    branch.select(i);
    const double gained = branch.total_reward() - before;
    s[static_cast<Index>(i)] = gained + continue_myopic(std::move(branch), limit);
  }
  if (std::isfinite(base)) s.array() -= base;
  return s;
}

RolloutResult rollout_episode(DialogueManager& dm, const World& world, const SimUserProfile& profile,
                              std::uint64_t seed, const RolloutOptions& opts) {
  Episode ep(&world, profile, seed);
  Rng explore(derive_seed(seed, 3));
  dm.begin();
  RolloutResult out;
  while (!ep.done()) {
    auto& c = ep.composer();
    const std::size_t n = c.candidates().size();
    if (n == 0) {
      ep.decline();
      continue;
    }
    const VectorXr s = dm.scores(c, &ep);
    const auto best = rl::argmax_stable(s);
    std::size_t act = best;
    double prob = 1;
    if (opts.epsilon > 0) {
      if (bernoulli(explore, opts.epsilon)) act = uniform_index(explore, n);
      prob = (1 - opts.epsilon) * (act == best ? 1.0 : 0.0) + opts.epsilon / static_cast<double>(n);
    }
    const bool speak = s[static_cast<Index>(best)] >= dm.threshold();
    if (opts.record_steps) {
      rl::StepRecord rec;
      rec.turn = c.conversation().turns.size();
      rec.step = c.step_index();
      rec.candidates = c.candidates();
      for (std::size_t i = 0; i < n; ++i) rec.ratings.push_back(ep.rating(i));
      if (speak || c.step_index() == 0) rec.selected = act;
      rec.behavior_prob = rec.selected ? prob : 1.0;
      out.steps.push_back(std::move(rec));
    }
    if (speak)
      ep.select(act);
    else if (c.step_index() == 0)
      ep.select_final(act);
    else
      ep.decline();
  }
  out.conversation = ep.composer().conversation();
  out.conversation.user_profile_id = profile.id;
  out.total_reward = ep.total_reward();
  out.conversation_rating = ep.conversation_rating();
  return out;
}

std::uint64_t profile_seed(std::uint64_t seed, std::size_t k) { return derive_seed(seed, 2 * k); }
std::uint64_t episode_seed(std::uint64_t seed, std::size_t k) { return derive_seed(seed, 2 * k + 1); }

Dataset generate_dataset(DialogueManager& behavior, const World& world, std::size_t n, std::uint64_t seed,
                         double epsilon) {
  Dataset d;
  RolloutOptions opts;
  opts.epsilon = epsilon;
  opts.record_steps = true;
  for (std::size_t k = 0; k < n; ++k) {
    const auto profile = sample_profile(world, profile_seed(seed, k), k);
    auto r = rollout_episode(behavior, world, profile, episode_seed(seed, k), opts);
    for (auto& s : r.steps) {
      s.conversation = k;
      d.steps.push_back(std::move(s));
    }
    d.conversations.push_back(std::move(r.conversation));
  }
  return d;
}

}  // namespace dcrl::sim
