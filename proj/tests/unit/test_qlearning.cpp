#include "doctest.h"

#include "../common/oracles.hpp"

#include "dcrl/rl/qlearning.hpp"
#include "dcrl/rl/toy_mdp.hpp"

#include <cmath>
#include <filesystem>

using namespace dcrl;
using namespace dcrl::rl;

namespace {

// Q(x, a) = w . [x; a] + b with a single linear layer.
Net linear(const VectorXr& w, double b) {
  Net n(w.size(), {1}, {nn::Activation::Identity});
  n.layers()[0].weight = w.transpose();
  n.layers()[0].bias[0] = b;
  return n;
}

VectorXr vec(std::initializer_list<double> v) {
  VectorXr out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

MatrixXr cols(std::initializer_list<VectorXr> v) {
  MatrixXr m(v.begin()->size(), static_cast<Index>(v.size()));
  Index i = 0;
  for (const auto& c : v) m.col(i++) = c;
  return m;
}

ToyMdp toy() { return ToyMdp::load(std::filesystem::path(DCRL_SOURCE_DIR) / "data/toy_mdp.json"); }

}  // namespace

TEST_CASE("SAQL target takes the max over the realized next set only") {
  // state width 1, action width 2: Q = 1*x + 2*a0 + 3*a1
  const QNetwork q(linear(vec({1, 2, 3}), 0));
  Transition t;
  t.state = vec({0});
  t.action = vec({1, 0});
  t.reward = 1;
  t.next_state = vec({1});
  t.next_candidates = cols({vec({1, 0}), vec({0, 0})});  // Q' = 3 and 1
  Transition end = t;
  end.terminal = true;
  end.reward = -2;
  const VectorXr y = saql_targets(q, {t, end}, 0.5);
  CHECK(y[0] == doctest::Approx(1 + 0.5 * 3));
  CHECK(y[1] == -2);
}

TEST_CASE("SAQL targets with a terminal transition first") {
  const QNetwork q(linear(vec({1, 2, 3}), 0));
  Transition end;
  end.state = vec({0});
  end.action = vec({1, 0});
  end.reward = -2;
  end.terminal = true;
  Transition t = end;
  t.terminal = false;
  t.reward = 1;
  t.next_state = vec({1});
  t.next_candidates = cols({vec({0, 1})});  // Q' = 4
  const VectorXr y = saql_targets(q, {end, t}, 0.5);
  CHECK(y[0] == -2);
  CHECK(y[1] == doctest::Approx(1 + 0.5 * 4));
}

TEST_CASE("non-terminal transition without next candidates is rejected") {
  const QNetwork q(linear(vec({1, 1}), 0));
  Transition t;
  t.state = vec({0});
  t.action = vec({1});
  t.next_state = vec({0});
  CHECK_THROWS_AS(saql_targets(q, {t}, 0.9), MissingCandidates);
}

TEST_CASE("Bellman loss is the summed squared error with the matching gradient") {
  const Net n = linear(vec({2, -1}), 0.5);
  Transition a, b;
  a.state = vec({1});
  a.action = vec({1});  // Q = 1.5
  b.state = vec({0});
  b.action = vec({2});  // Q = -1.5
  const VectorXr y = vec({1, 0});
  Net g = n.zeros_like();
  const double l = bellman_loss(n, {a, b}, y, &g);
  CHECK(l == doctest::Approx(0.25 + 2.25));
  // d/dw = sum 2 e [x; a] = 2*0.5*[1,1] + 2*(-1.5)*[0,2]
  CHECK(g.layers()[0].weight(0, 0) == doctest::Approx(1.0));
  CHECK(g.layers()[0].weight(0, 1) == doctest::Approx(1.0 - 6.0));
  CHECK(g.layers()[0].bias[0] == doctest::Approx(1.0 - 3.0));
}

TEST_CASE("CQL term on a two-action set") {
  const Net n = linear(vec({0, 1}), 0);  // Q = a
  Transition t;
  t.state = vec({0});
  t.action = vec({1});
  t.candidates = cols({vec({1}), vec({2})});
  t.behavior_slot = 0;
  const double alpha = 0.5;
  Net g = n.zeros_like();
  const auto c = cql_term(n, {t}, alpha, &g);
  const double mu1 = std::exp(1.0) / (std::exp(1.0) + std::exp(2.0));
  const double mu2 = 1 - mu1;
  CHECK(c.value == doctest::Approx(alpha * (mu1 * 1 + mu2 * 2 - 1)));
  CHECK(c.surrogate == doctest::Approx(alpha * (std::log(std::exp(1.0) + std::exp(2.0)) - 1)));
  // d/dw_a of the surrogate: alpha * (mu1*1 + mu2*2 - 1)
  CHECK(g.layers()[0].weight(0, 1) == doctest::Approx(alpha * (mu1 + 2 * mu2 - 1)));
}

TEST_CASE("CQL needs the behavior slot") {
  const Net n = linear(vec({0, 1}), 0);
  Transition t;
  t.state = vec({0});
  t.action = vec({1});
  t.candidates = cols({vec({1})});
  CHECK_THROWS(cql_term(n, {t}, 1.0));
}

TEST_CASE("alpha zero skips the CQL term entirely") {
  const auto m = toy();
  const Batch b = exact_batch(m, ToyBehavior::FirstAvailable);
  Net init(m.state_width() + m.action_width(), {1}, {nn::Activation::Identity});
  QNetwork q1(init, 7), q2(init, 7);
  nn::AdamState<double> a1(q1.online, {0.01}), a2(q2.online, {0.01});
  QUpdateOptions o;
  o.gamma = m.gamma;
  for (int s = 0; s < 20; ++s) {
    q_update(q1, a1, b, o);
    // plain SAQL step by hand
    Net g = q2.online.zeros_like();
    saql_loss(q2, b, m.gamma, &g);
    nn::adam_step(a2, q2.online, g);
    if (++q2.updates % q2.target_period == 0) update_target(q2);
  }
  CHECK(q1.online == q2.online);
  CHECK(q1.target == q2.target);
}

TEST_CASE("target network is a hard copy every period") {
  Net init(2, {1}, {nn::Activation::Identity});
  QNetwork q(init, 3);
  nn::AdamState<double> adam(q.online, {0.1});
  Transition t;
  t.state = vec({1});
  t.action = vec({1});
  t.reward = 1;
  t.terminal = true;
  for (int s = 1; s <= 3; ++s) {
    q_update(q, adam, {t}, {});
    if (s < 3) CHECK(q.target == init);
  }
  CHECK(q.target == q.online);
}

TEST_CASE("argmax breaks ties to the lowest index") {
  CHECK(argmax_stable(vec({1, 3, 3, 2})) == 1);
  CHECK_THROWS(argmax_stable(VectorXr()));
}

TEST_CASE("gradient ascent reaches the maximizer of a concave quadratic") {
  // f = -1/2 sum a_i (psi_i - c_i)^2
  const VectorXr a = vec({1.0, 2.0, 0.5}), c = vec({0.3, -0.7, 1.2});
  const ValueAndGradient f = [&](const VectorXr& p, VectorXr& g) {
    g = -(a.array() * (p - c).array()).matrix();
    return -0.5 * (a.array() * (p - c).array().square()).sum();
  };
  const auto r = gradient_ascent(f, VectorXr::Zero(3), {0.6, 25});
  CHECK(r.steps <= 25);
  CHECK((r.argmax - c).cwiseAbs().maxCoeff() < 1e-3);
}

TEST_CASE("gradient ascent stays in the box and returns the best iterate") {
  const VectorXr c = vec({2.0, -2.0});
  const ValueAndGradient f = [&](const VectorXr& p, VectorXr& g) {
    g = -(p - c);
    return -0.5 * (p - c).squaredNorm();
  };
  const Box box{vec({-1, -1}), vec({1, 1})};
  const auto r = gradient_ascent(f, VectorXr::Zero(2), {0.5, 25}, &box);
  CHECK(r.argmax[0] == doctest::Approx(1.0));
  CHECK(r.argmax[1] == doctest::Approx(-1.0));
  // A step that overshoots never replaces a better iterate.
  const auto wild = gradient_ascent(f, VectorXr::Zero(2), {50.0, 5});
  VectorXr g0;
  CHECK(wild.value >= f(VectorXr::Zero(2), g0));
}

TEST_CASE("CAQL inner max of a linear Q lands on the box corner") {
  const Net n = linear(vec({0, 1, -2}), 0);  // state width 1, action width 2
  const Box box{vec({-1, -1}), vec({1, 1})};
  const auto r = caql_inner_max(n, vec({0}), VectorXr::Zero(2), {0.5, 25}, &box);
  CHECK(r.argmax[0] == doctest::Approx(1));
  CHECK(r.argmax[1] == doctest::Approx(-1));
  CHECK(r.value == doctest::Approx(3));
}

TEST_CASE("toy MDP exact dataset weights") {
  const auto m = toy();
  const Batch uni = exact_batch(m);
  const Batch first = exact_batch(m, ToyBehavior::FirstAvailable);
  // Every (x, A_x, a) row group sums to 64 * P(A_x) over (x', A_x').
  std::size_t expected_uniform = 0, expected_first = 0;
  for (int x = 0; x < m.states; ++x)
    for (const auto& s : m.action_sets[x]) {
      expected_uniform += static_cast<std::size_t>(std::llround(64 * s.prob * static_cast<double>(s.actions.size())));
      expected_first += static_cast<std::size_t>(std::llround(64 * s.prob));
    }
  CHECK(uni.size() == expected_uniform);
  CHECK(first.size() == expected_first);
}

TEST_CASE("toy MDP SAQL agrees with value iteration over extended states") {
  const auto m = toy();
  const MatrixXr qstar = oracle::value_iteration(m);
  const Batch b = exact_batch(m);
  Net init(m.state_width() + m.action_width(), {1}, {nn::Activation::Identity});
  QNetwork q(init, 50);
  nn::AdamState<double> adam(q.online, {0.05});
  QUpdateOptions o;
  o.gamma = m.gamma;
  const int steps = 8000;
  for (int s = 0; s < steps; ++s) {
    adam.options.learning_rate = 0.05 * std::pow(0.01, double(s) / steps);
    q_update(q, adam, b, o);
  }
  double err = 0;
  for (int x = 0; x < m.states; ++x)
    for (int a = 0; a < m.actions; ++a)
      err = std::max(err, std::abs(q_values(q.online, m.state_features(x), m.action_features(x, a).eval())[0] -
                                   qstar(x, a)));
  CHECK(err < 1e-2);
}
