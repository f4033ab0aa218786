#pragma once

#include "dcrl/core/random.hpp"
#include "dcrl/core/types.hpp"
#include "dcrl/encoder/encoder.hpp"
#include "dcrl/fusion/fusion.hpp"
#include "dcrl/nlu/nlu.hpp"
#include "dcrl/providers/providers.hpp"
#include "dcrl/rl/corpus.hpp"
#include "dcrl/rl/policy.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace dcrl::sim {

using nn::Index;
using nn::MatrixXr;
using nn::VectorXr;

/// Knobs of the synthetic user population and rater. The dynamics are built so that
/// sounds rate high immediately while facts raise engagement and so lengthen conversations.
struct SimConfig {
  double engagement_min = 0.45;
  double engagement_max = 0.75;
  double fact_lover_fraction = 0.5;
  std::size_t favorites = 2;
  double stop_base = 0.03;
  double stop_threshold = 0.35;
  double out_of_domain = 0.02;
  double cooperation_base = 0.3;
  double cooperation_gain = 0.6;
  double preference_bonus = 0.2;
  double fact_gain = 0.05;
  double fact_lover_multiplier = 2.4;
  double first_sound_gain = 0.02;
  double repeat_sound_loss = 0.09;
  double quiz_gain = 0.02;
  double cooperative_gain = 0.04;
  double uncooperative_loss = 0.06;
  double favorite_gain = 0.05;
  double feedback_probability = 0.35;
  double positive_feedback_above = 0.75;
  double negative_feedback_below = 0.3;
  double rater_sigma = 0.75;

  nlohmann::json to_json() const;
  static SimConfig from_json(const nlohmann::json& j);
  static SimConfig load(const std::filesystem::path& path);
};

/// Everything an episode reads but never mutates; shared across episodes and threads.
struct World {
  providers::KnowledgeBase kb;
  nlu::Nlu nlu;
  fusion::Vocabulary vocab;
  SimConfig sim;
  MdpConfig mdp;
  providers::ProviderCaps caps;

  static World make(providers::KnowledgeBase kb, nlu::Lexicons lexicons, SimConfig sim = {}, MdpConfig mdp = {});
  /// Loads kb.jsonl, lexicons/, fusion_vocab.tsv and (if present) profiles.json from `data_dir`.
  static World load(const std::filesystem::path& data_dir);
};

enum class Request { None, Sound, Facts };

/// Dialogue-side state machine shared by simulated episodes and live sessions: NLU on
/// user turns, candidate generation per composition step, turn closing and fusion.
class Composer {
 public:
  Composer(const World* world, std::uint64_t seed);

  void user_says(const std::string& text);
  void select(std::size_t index, std::optional<int> rating = std::nullopt);
  /// Ends the bot turn; with nothing said yet the conversation ends (LowScore).
  void decline();
  /// Low-score ending: speaks the one forced utterance, then ends the conversation (LowScore).
  void select_final(std::size_t index, std::optional<int> rating = std::nullopt);

  bool awaiting_user() const { return awaiting_user_; }
  bool ended() const { return end_.has_value(); }
  std::optional<EndReason> end_reason() const { return end_; }

  const Conversation& conversation() const { return conv_; }
  const providers::CandidateSet& candidates() const { return candidates_; }
  std::size_t turn_index() const { return turn_index_; }
  std::size_t step_index() const { return this_turn_.size(); }
  std::size_t bot_turns() const { return bot_turns_; }
  const std::vector<Candidate>& this_turn() const { return this_turn_; }
  const nlu::FocusState& focus() const { return focus_; }
  const std::set<std::string>& used_content() const { return used_; }
  bool after_cooperative_answer() const { return after_cooperative_; }
  const std::optional<nlu::AnswerInterpretation>& last_answer() const { return last_answer_; }
  Request request() const { return request_; }
  bool served_content() const { return served_content_; }
  bool user_asked_question() const { return user_question_; }
  const std::string& last_user_text() const { return last_user_text_; }
  /// Fused text of the most recent completed bot turn.
  const std::string& last_response() const { return last_response_; }
  const World& world() const { return *world_; }

 private:
  void finish_turn();
  void refresh_candidates();
  void end(EndReason reason);

  const World* world_;
  std::uint64_t seed_;
  Conversation conv_;
  nlu::FocusState focus_;
  std::set<std::string> used_;
  std::vector<Candidate> this_turn_;
  std::vector<std::optional<int>> this_turn_ratings_;
  providers::CandidateSet candidates_;
  std::size_t turn_index_ = 0;
  std::size_t bot_turns_ = 0;
  bool awaiting_user_ = true;
  bool after_cooperative_ = false;
  bool user_question_ = false;
  bool served_content_ = false;
  Request request_ = Request::None;
  std::optional<nlu::AnswerInterpretation> last_answer_;
  std::optional<EndReason> end_;
  std::string last_user_text_;
  std::string last_response_;
};

struct SimUserProfile {
  std::string id;
  double engagement = 0.6;
  bool prefers_facts = false;
  std::vector<EntityId> favorites;
  double stop_threshold = 0.35;
  std::uint64_t seed = 0;
};

SimUserProfile sample_profile(const World& world, std::uint64_t seed, std::size_t index);

/// What the rater needs to judge one candidate in context.
struct RatingContext {
  std::size_t step_index = 0;
  bool after_cooperative_answer = false;
  Request request = Request::None;
  bool request_pending = false;  // no content utterance yet in this turn
  bool prefers_facts = false;
  const std::set<std::string>* used = nullptr;
};

RatingContext rating_context(const Composer& c, const SimUserProfile& profile);

/// Noise-free rule score of a candidate.
double base_score(const Candidate& cand, const RatingContext& ctx);

/// Round half away from zero, a zero becomes the sign of the raw value, clamp to [-3, 7].
int discretize_rating(double raw);

int rate_utterance(const Candidate& cand, const RatingContext& ctx, double sigma, Rng& rng);

/// A simulated episode: the composer plus a user and a rater with their own seeded streams.
/// Copyable, so planners can branch on exact clones.
class Episode {
 public:
  Episode(const World* world, SimUserProfile profile, std::uint64_t seed);

  Composer& composer() { return composer_; }
  const Composer& composer() const { return composer_; }
  const SimUserProfile& profile() const { return profile_; }
  bool done() const { return composer_.ended(); }

  /// Rating the rater gives candidate `i` of the current step; the noise depends only on
  /// the episode seed, the position and the text, so it is identical across branches.
  int rating(std::size_t i) const;
  double expected_rating(std::size_t i) const;

  void select(std::size_t i);
  void select_final(std::size_t i);
  void decline();

  double engagement() const { return engagement_; }
  double total_reward() const { return total_reward_; }
  std::size_t decisions() const { return decisions_; }

  /// Conversation-level rating on the same -3..7 scale, drawn once the episode is over.
  int conversation_rating() const;

 private:
  void after_turn();
  std::string reply(const Turn& bot_turn);
  std::string reply_to_question(const Utterance& question, bool cooperate);
  bool prefers(const Utterance& question) const;

  const World* world_;
  SimUserProfile profile_;
  std::uint64_t seed_;
  Composer composer_;
  Rng user_rng_;
  double engagement_ = 0;
  std::size_t sounds_heard_ = 0;
  double total_reward_ = 0;
  std::size_t decisions_ = 0;
};

/// Scores the current candidate set. `episode` is null for live sessions.
class DialogueManager {
 public:
  virtual ~DialogueManager() = default;
  virtual void begin() {}
  virtual VectorXr scores(const Composer& c, const Episode* episode) = 0;
  virtual double threshold() const = 0;
};

/// A learned policy with an incremental history encoder.
class PolicyDm : public DialogueManager {
 public:
  explicit PolicyDm(const rl::Policy* policy);
  void begin() override;
  VectorXr scores(const Composer& c, const Episode* episode) override;
  double threshold() const override { return policy_->threshold; }

  /// phi and psi columns for the composer's current step.
  encoder::EmbeddedState state(const Composer& c);
  MatrixXr actions(const Composer& c) const;

 private:
  const rl::Policy* policy_;
  encoder::HistoryCursor cursor_;
  std::size_t consumed_ = 0;
};

/// Rater rule table without noise: the best a purely myopic DM can do.
class MyopicOracleDm : public DialogueManager {
 public:
  explicit MyopicOracleDm(double threshold = 1.5) : threshold_(threshold) {}
  VectorXr scores(const Composer& c, const Episode* episode) override;
  double threshold() const override { return threshold_; }

 private:
  double threshold_;
};

/// Brute-force lookahead on exact episode clones: every candidate (and, after step 0,
/// ending the turn) is tried and continued by the myopic oracle for at most
/// `horizon_turns` further bot turns. Scores are realized return relative to ending the turn.
class PlannerDm : public DialogueManager {
 public:
  explicit PlannerDm(std::size_t horizon_turns = 10) : horizon_(horizon_turns) {}
  VectorXr scores(const Composer& c, const Episode* episode) override;
  double threshold() const override { return 0; }

 private:
  std::size_t horizon_;
};

class UniformDm : public DialogueManager {
 public:
  VectorXr scores(const Composer& c, const Episode*) override {
    return VectorXr::Zero(static_cast<Index>(c.candidates().size()));
  }
  double threshold() const override { return -1e300; }
};

struct Decision {
  enum class Kind { Select, SelectFinal, Decline };
  Kind kind = Kind::Decline;
  std::size_t index = 0;
};

/// Argmax when its score reaches the threshold. Under it, step 0 makes one forced attempt
/// that ends the conversation and later steps end the turn. No candidates: decline.
Decision greedy_decision(const VectorXr& scores, double threshold, std::size_t step_index);

/// One greedy decision of `dm` on `ep`.
void step_greedy(DialogueManager& dm, Episode& ep);

struct RolloutOptions {
  double epsilon = 0;  // probability of a uniformly random candidate instead of the argmax
  bool record_steps = false;
};

struct RolloutResult {
  Conversation conversation;
  double total_reward = 0;
  int conversation_rating = 0;
  std::vector<rl::StepRecord> steps;  // conversation index left at 0
};

RolloutResult rollout_episode(DialogueManager& dm, const World& world, const SimUserProfile& profile,
                              std::uint64_t seed, const RolloutOptions& opts = {});

struct Dataset {
  std::vector<Conversation> conversations;
  std::vector<rl::StepRecord> steps;
};

/// Rolls out `n` conversations with `behavior`, rating every candidate at every step.
Dataset generate_dataset(DialogueManager& behavior, const World& world, std::size_t n, std::uint64_t seed,
                         double epsilon);

/// Seeds for conversation k of an experiment: the same for every arm.
std::uint64_t profile_seed(std::uint64_t seed, std::size_t k);
std::uint64_t episode_seed(std::uint64_t seed, std::size_t k);

}  // namespace dcrl::sim
