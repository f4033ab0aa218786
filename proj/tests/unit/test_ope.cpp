#include "doctest.h"

#include "../common/gradcheck.hpp"
#include "../common/oracles.hpp"

#include "dcrl/ope/ope.hpp"

#include <cmath>

using namespace dcrl;
using namespace dcrl::ope;
using oracle::Chain;

namespace {

NuNetwork linear_nu(Index width) { return {Net(width, {1}, {nn::Activation::Identity})}; }

NuNetwork constant_nu(Index width, double c) {
  auto nu = linear_nu(width);
  nu.net.layers()[0].bias[0] = c;
  return nu;
}

MatrixXr policy(std::initializer_list<std::initializer_list<double>> rows) {
  MatrixXr m(static_cast<Index>(rows.size()), 2);
  Index i = 0;
  for (const auto& r : rows) {
    Index j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

DualDiceConfig tabular() {
  DualDiceConfig c;
  c.hidden = {};
  c.learning_rate = 0.05;
  c.steps = 3000;
  c.batch_size = 0;
  return c;
}

}  // namespace

TEST_CASE("nu identically zero estimates zero") {
  const Chain chain;
  const auto d = chain.sample(policy({{0.5, 0.5}, {0.5, 0.5}, {0.5, 0.5}}), policy({{0, 1}, {0, 1}, {0, 1}}), 200, 1);
  CHECK(dualdice_estimate(linear_nu(6), d, chain.gamma) == 0);
}

TEST_CASE("gamma zero with nu identically one estimates the mean reward") {
  const Chain chain;
  const auto d = chain.sample(policy({{0.5, 0.5}, {0.5, 0.5}, {0.5, 0.5}}), policy({{0, 1}, {0, 1}, {0, 1}}), 300, 2);
  double mean = 0;
  for (const auto& s : d.samples) mean += s.reward;
  mean /= static_cast<double>(d.samples.size());
  CHECK(dualdice_estimate(constant_nu(6, 1), d, 0.0) == doctest::Approx(mean));
}

TEST_CASE("terminal next states contribute nothing to the ratio") {
  DiceDataset d;
  DiceSample s;
  s.sa = VectorXr::Ones(2);
  s.reward = 3;
  s.terminal = true;
  d.samples.push_back(s);
  CHECK(dualdice_ratios(constant_nu(2, 2), d, 0.9)[0] == 2);
  s.terminal = false;
  d.samples[0] = s;
  CHECK_THROWS_AS(dualdice_ratios(constant_nu(2, 2), d, 0.9), rl::MissingCandidates);
}

TEST_CASE("DualDICE objective gradient matches finite differences") {
  const Chain chain;
  const auto d = chain.sample(policy({{0.5, 0.5}, {0.3, 0.7}, {0.5, 0.5}}), policy({{0.2, 0.8}, {0, 1}, {1, 0}}), 50, 3);
  Rng rng(4);
  NuNetwork nu{Net::random(6, {5, 1}, {nn::Activation::Tanh, nn::Activation::Identity}, rng)};
  std::vector<std::size_t> s, b{0};
  for (std::size_t i = 0; i < d.samples.size(); ++i) s.push_back(i);
  Net g = nu.net.zeros_like();
  dualdice_objective(nu, d, s, b, 0.9, &g);
  const double err = gradcheck::relative_error<Net>(
      nu.net, g, [&](const Net& n) { return dualdice_objective(NuNetwork{n}, d, s, b, 0.9); });
  CHECK(err < 1e-6);
}

TEST_CASE("DualDICE recovers the chain value") {
  const Chain chain;
  const MatrixXr behavior = policy({{0.5, 0.5}, {0.5, 0.5}, {0.6, 0.4}});
  const MatrixXr target = policy({{0.1, 0.9}, {0.2, 0.8}, {0.5, 0.5}});
  const auto d = chain.sample(behavior, target, 20000, 5);
  const auto nu = dualdice_train(d, chain.gamma, tabular(), linear_nu(6));
  const double j = chain.value(target);
  CHECK(std::abs(dualdice_estimate(nu, d, chain.gamma) / (1 - chain.gamma) - j) < 0.1 * std::abs(j));
}

// The squared sampled residual is biased by gamma^2 Var[nu(x')] under stochastic
// transitions, so exact ratios are only recoverable on a deterministic chain.
TEST_CASE("DualDICE recovers the correction ratios of a deterministic chain") {
  Chain chain;
  chain.slip = 0;
  const MatrixXr behavior = policy({{0.5, 0.5}, {0.5, 0.5}, {0.6, 0.4}});
  const MatrixXr target = policy({{0, 1}, {0, 1}, {0, 1}});
  const auto d = chain.sample(behavior, target, 20000, 5);
  const auto nu = dualdice_train(d, chain.gamma, tabular(), linear_nu(6));

  const VectorXr dpi = chain.occupancy(target), dd = chain.occupancy(behavior);
  const VectorXr w = dualdice_ratios(nu, d, chain.gamma);
  for (std::size_t i = 0; i < d.samples.size(); i += 97) {
    Index k = 0;
    d.samples[i].sa.maxCoeff(&k);
    CHECK(std::abs(w[static_cast<Index>(i)] - dpi[k] / dd[k]) < 0.1);
  }
}

TEST_CASE("on-policy data gives ratios averaging one") {
  const Chain chain;
  const MatrixXr pi = policy({{0.3, 0.7}, {0.5, 0.5}, {0.6, 0.4}});
  const auto d = chain.sample(pi, pi, 20000, 6);
  const auto nu = dualdice_train(d, chain.gamma, tabular(), linear_nu(6));
  CHECK(std::abs(dualdice_ratios(nu, d, chain.gamma).mean() - 1) < 0.05);
}

TEST_CASE("population mean and standard deviation") {
  const auto m = mean_std({1, 2, 3, 4});
  CHECK(m.mean == 2.5);
  CHECK(m.stddev == doctest::Approx(std::sqrt(1.25)));
}

TEST_CASE("evaluation table cells") {
  const std::vector<EvalRow> rows = {{"SAQL", "saql", MeanStd{1.234, 0.5}, std::nullopt}};
  const auto text = eval_table_text(rows);
  CHECK(text.find("Model Type") != std::string::npos);
  CHECK(text.find("1.23 ± 0.50") != std::string::npos);
  const auto j = eval_table_json(rows);
  CHECK(j[0]["off_policy"].is_null());
  CHECK(j[0]["on_policy"]["mean"] == 1.234);
}
