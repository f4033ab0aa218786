#include "doctest.h"

#include "dcrl/cli/config.hpp"

using namespace dcrl;
using namespace dcrl::cli;
using nlohmann::json;

TEST_CASE("defaults resolve per kind") {
  const auto saql = ExperimentConfig{}.resolved();
  CHECK(saql.gamma == std::optional<double>(0.95));
  CHECK(saql.alpha == std::optional<double>(0.0));
  const auto reg = ExperimentConfig{}.merged({{"kind", "saql-reg"}}).resolved();
  CHECK(reg.gamma == std::optional<double>(0.9));
  CHECK(reg.alpha == std::optional<double>(0.1));
  const auto e2e = ExperimentConfig{}.merged({{"kind", "e2e-reg"}}).resolved();
  CHECK(e2e.gamma == std::optional<double>(0.8));
  CHECK(e2e.alpha == std::optional<double>(0.01));
}

TEST_CASE("desk-scale head and target period") {
  const auto q = ExperimentConfig{}.q_training();
  CHECK(q.head.layers == 3);
  CHECK(q.head.width == 128);
  CHECK(q.target_period == 1000);
  CHECK(q.ga.max_steps == 25);
  CHECK(q.batch_size == 32);
}

TEST_CASE("JSON round trip and stable hash") {
  const auto c = ExperimentConfig{}.merged({{"kind", "caql"}, {"steps", 17}, {"gamma", 0.5}});
  const auto back = ExperimentConfig::from_json(c.to_json());
  CHECK(back.to_json() == c.to_json());
  CHECK(back.hash() == c.hash());
  CHECK(c.hash() != ExperimentConfig{}.hash());
  // An explicit default hashes the same as the implicit one.
  CHECK(ExperimentConfig{}.merged({{"gamma", 0.95}}).hash() == ExperimentConfig{}.hash());
}

TEST_CASE("invalid configs are rejected") {
  const ExperimentConfig c;
  CHECK_THROWS_AS(c.merged({{"stepz", 1}}), ConfigError);
  CHECK_THROWS_AS(c.merged({{"kind", "dqn"}}), ConfigError);
  CHECK_THROWS_AS(c.merged({{"gamma", 1.0}}), ConfigError);
  CHECK_THROWS_AS(c.merged({{"alpha", -1}}), ConfigError);
  CHECK_THROWS_AS(c.merged({{"learning_rate", 0}}), ConfigError);
  CHECK_THROWS_AS(c.merged({{"batch_size", 0}}), ConfigError);
  CHECK_THROWS_AS(c.merged({{"behavior_epsilon", 2}}), ConfigError);
  CHECK_THROWS_AS(c.merged({{"steps", "many"}}), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from_json(json::array()), ConfigError);
  CHECK_NOTHROW(c.merged({{"_note", "comments are fine"}}));
}

TEST_CASE("kind-specific configs") {
  const auto c = ExperimentConfig{}.merged({{"kind", "caql-reg"}, {"ga_step", 0.1}, {"seed", 9}});
  const auto q = c.q_training();
  CHECK(q.kind == PolicyKind::CaqlReg);
  CHECK(q.gamma == 0.9);
  CHECK(q.alpha == 0.1);
  CHECK(q.ga.step_size == 0.1);
  CHECK(q.seed == 9);
  const auto s = ExperimentConfig{}.merged({{"kind", "supervised"}, {"hidden", 16}}).supervised();
  CHECK(s.hidden == 16);
  const auto d = ExperimentConfig{}.merged({{"dice_hidden", 16}}).dualdice();
  CHECK(d.hidden == std::vector<nn::Index>{16, 16});
}
