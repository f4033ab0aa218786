#include "dcrl/sim/sim.hpp"

#include <fstream>
#include <set>
#include <stdexcept>

namespace dcrl::sim {

#define DCRL_SIM_FIELDS(X)                                                                                    \
  X(engagement_min) X(engagement_max) X(fact_lover_fraction) X(favorites) X(stop_base) X(stop_threshold)      \
  X(out_of_domain) X(cooperation_base) X(cooperation_gain) X(preference_bonus) X(fact_gain)                   \
  X(fact_lover_multiplier) X(first_sound_gain) X(repeat_sound_loss) X(quiz_gain) X(cooperative_gain)          \
  X(uncooperative_loss) X(favorite_gain) X(feedback_probability) X(positive_feedback_above)                   \
  X(negative_feedback_below) X(rater_sigma)

nlohmann::json SimConfig::to_json() const {
  nlohmann::json j;
#define X(f) j[#f] = f;
  DCRL_SIM_FIELDS(X)
#undef X
  return j;
}

SimConfig SimConfig::from_json(const nlohmann::json& j) {
  SimConfig c;
  std::set<std::string> known;
#define X(f)                                                \
  known.insert(#f);                                         \
  if (j.contains(#f)) j.at(#f).get_to(c.f);
  DCRL_SIM_FIELDS(X)
#undef X
  for (const auto& [key, value] : j.items())
    if (!known.count(key) && key.rfind("_", 0) != 0) throw std::invalid_argument("unknown simulator field: " + key);
  if (c.engagement_min < 0 || c.engagement_max > 1 || c.engagement_min > c.engagement_max)
    throw std::invalid_argument("engagement range must lie in [0, 1]");
  if (c.stop_threshold <= 0) throw std::invalid_argument("stop_threshold must be positive");
  if (c.rater_sigma < 0) throw std::invalid_argument("rater_sigma must be non-negative");
  return c;
}

#undef DCRL_SIM_FIELDS

SimConfig SimConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return from_json(nlohmann::json::parse(in));
}

World World::make(providers::KnowledgeBase kb, nlu::Lexicons lexicons, SimConfig sim, MdpConfig mdp) {
  World w;
  w.nlu = nlu::Nlu(std::move(lexicons), kb.entity_index());
  w.vocab = fusion::Vocabulary::from_kb(kb);
  w.kb = std::move(kb);
  w.sim = sim;
  w.mdp = mdp;
  return w;
}

World World::load(const std::filesystem::path& data_dir) {
  auto kb = providers::KnowledgeBase::load(data_dir / "kb.jsonl");
  const auto profiles = data_dir / "profiles.json";
  World w = make(kb, nlu::Lexicons::load(data_dir / "lexicons"),
                 std::filesystem::exists(profiles) ? SimConfig::load(profiles) : SimConfig{});
  const auto vocab = data_dir / "fusion_vocab.tsv";
  if (std::filesystem::exists(vocab)) w.vocab = fusion::Vocabulary::load(vocab, w.kb);
  return w;
}

}  // namespace dcrl::sim
