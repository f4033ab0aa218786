#include "dcrl/cli/config.hpp"

#include "dcrl/core/text.hpp"

#include <fstream>
#include <set>

namespace dcrl::cli {

using nn::Index;

#define DCRL_CONFIG_FIELDS(X)                                                                                   \
  X(kind) X(gamma) X(alpha) X(learning_rate) X(hidden) X(head_layers) X(head_width) X(steps) X(batch_size)      \
  X(target_period) X(ga_step) X(ga_max_steps) X(conversations_per_step) X(log_every) X(seed) X(conversations)  \
  X(bootstrap_conversations) X(bootstrap_steps) X(behavior_epsilon) X(eval_conversations) X(dice_steps)         \
  X(dice_learning_rate) X(dice_batch_size) X(dice_hidden)

namespace {

template <typename T>
void put(nlohmann::json& j, const char* key, const T& v) {
  j[key] = v;
}
template <typename T>
void put(nlohmann::json& j, const char* key, const std::optional<T>& v) {
  j[key] = v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}
template <typename T>
void get(const nlohmann::json& j, const char* key, T& v) {
  j.get_to(v);
  (void)key;
}
template <typename T>
void get(const nlohmann::json& j, const char*, std::optional<T>& v) {
  if (j.is_null())
    v.reset();
  else
    v = j.get<T>();
}

}  // namespace

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json j = nlohmann::json::object();
#define X(f) put(j, #f, f);
  DCRL_CONFIG_FIELDS(X)
#undef X
  return j;
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) { return ExperimentConfig{}.merged(j); }

ExperimentConfig ExperimentConfig::merged(const nlohmann::json& j) const {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  ExperimentConfig c = *this;
  std::set<std::string> known;
  try {
#define X(f)                                  \
  known.insert(#f);                           \
  if (j.contains(#f)) get(j.at(#f), #f, c.f);
    DCRL_CONFIG_FIELDS(X)
#undef X
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  for (const auto& [key, value] : j.items())
    if (!known.count(key) && key.rfind("_", 0) != 0) throw ConfigError("unknown config field: " + key);
  try {
    (void)c.policy_kind();
  } catch (const std::exception&) {
    throw ConfigError("unknown policy kind: " + c.kind);
  }
  if (c.gamma && (*c.gamma < 0 || *c.gamma >= 1)) throw ConfigError("gamma must lie in [0, 1)");
  if (c.alpha && *c.alpha < 0) throw ConfigError("alpha must be non-negative");
  if (c.learning_rate && *c.learning_rate <= 0) throw ConfigError("learning_rate must be positive");
  if (c.batch_size == 0 || c.target_period == 0 || c.hidden == 0 || c.head_width == 0 || c.log_every == 0)
    throw ConfigError("sizes must be positive");
  if (c.behavior_epsilon < 0 || c.behavior_epsilon > 1) throw ConfigError("behavior_epsilon must lie in [0, 1]");
  return c;
}

#undef DCRL_CONFIG_FIELDS

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::filesystem::filesystem_error("cannot read config", path, std::make_error_code(std::errc::no_such_file_or_directory));
  try {
    return from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

PolicyKind ExperimentConfig::policy_kind() const { return policy_kind_from_string(kind); }

ExperimentConfig ExperimentConfig::resolved() const {
  ExperimentConfig c = *this;
  const auto k = policy_kind();
  const auto q = rl::QTrainConfig::defaults_for(k);
  if (!c.gamma) c.gamma = k == PolicyKind::E2eReg ? rl::E2eConfig{}.gamma : q.gamma;
  if (!c.alpha) c.alpha = q.alpha;
  if (!c.learning_rate)
    c.learning_rate = k == PolicyKind::Supervised ? rl::SupervisedConfig{}.learning_rate : q.learning_rate;
  c.kind = std::string(to_string(k));
  return c;
}

std::string ExperimentConfig::hash() const { return text::hash_hex(resolved().to_json().dump()); }

rl::SupervisedConfig ExperimentConfig::supervised() const {
  const auto r = resolved();
  rl::SupervisedConfig s;
  s.hidden = static_cast<Index>(r.hidden);
  s.head = {r.head_layers, static_cast<Index>(r.head_width)};
  s.learning_rate = *r.learning_rate;
  s.steps = r.steps;
  s.conversations_per_step = r.conversations_per_step;
  s.log_every = r.log_every;
  s.seed = r.seed;
  return s;
}

rl::QTrainConfig ExperimentConfig::q_training() const {
  const auto r = resolved();
  auto q = rl::QTrainConfig::defaults_for(r.policy_kind());
  q.gamma = *r.gamma;
  q.alpha = *r.alpha;
  q.head = {r.head_layers, static_cast<Index>(r.head_width)};
  q.learning_rate = *r.learning_rate;
  q.steps = r.steps;
  q.batch_size = r.batch_size;
  q.target_period = r.target_period;
  q.ga = {r.ga_step, r.ga_max_steps};
  q.log_every = r.log_every;
  q.seed = r.seed;
  return q;
}

rl::E2eConfig ExperimentConfig::e2e() const {
  const auto r = resolved();
  rl::E2eConfig e;
  e.gamma = *r.gamma;
  e.alpha = *r.alpha;
  e.learning_rate = *r.learning_rate;
  e.steps = r.steps;
  e.batch_size = r.batch_size;
  e.target_period = r.target_period;
  e.log_every = r.log_every;
  e.seed = r.seed;
  return e;
}

ope::DualDiceConfig ExperimentConfig::dualdice() const {
  ope::DualDiceConfig d;
  d.hidden = {static_cast<Index>(dice_hidden), static_cast<Index>(dice_hidden)};
  d.learning_rate = dice_learning_rate;
  d.steps = dice_steps;
  d.batch_size = dice_batch_size;
  d.seed = seed;
  return d;
}

}  // namespace dcrl::cli
