#pragma once

// Independent reference solutions the learned components are checked against.

#include "dcrl/core/random.hpp"
#include "dcrl/ope/ope.hpp"
#include "dcrl/rl/toy_mdp.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace oracle {

using dcrl::nn::Index;
using dcrl::nn::MatrixXr;
using dcrl::nn::VectorXr;

/// Q*(x, a) for the MDP whose state is (x, A_x): the value of (x, A_x, a) depends only
/// on (x, a), and V(x') averages max over the sampled next set.
inline MatrixXr value_iteration(const dcrl::rl::ToyMdp& m, double tol = 1e-13) {
  MatrixXr q = MatrixXr::Zero(m.states, m.actions);
  for (int it = 0; it < 100000; ++it) {
    VectorXr v = VectorXr::Zero(m.states);
    for (int y = 0; y < m.states; ++y)
      for (const auto& set : m.action_sets[y]) {
        double best = -1e300;
        for (int a : set.actions) best = std::max(best, q(y, a));
        v[y] += set.prob * best;
      }
    MatrixXr next(m.states, m.actions);
    for (int x = 0; x < m.states; ++x)
      for (int a = 0; a < m.actions; ++a) {
        double e = 0;
        for (int y = 0; y < m.states; ++y) e += m.next[x][a][y] * v[y];
        next(x, a) = m.reward[x][a] + m.gamma * e;
      }
    const double delta = (next - q).cwiseAbs().maxCoeff();
    q = next;
    if (delta < tol) break;
  }
  return q;
}

/// Greedy action per (x, A_x), ties to the lowest action index.
inline std::vector<int> greedy(const MatrixXr& q, int x, const std::vector<int>& set) {
  int best = set.front();
  for (int a : set)
    if (q(x, a) > q(x, best) || (q(x, a) == q(x, best) && a < best)) best = a;
  return {best};
}

/// Three states in a row; action 1 moves right, action 0 moves left, each failing with
/// probability `slip` (the state is kept). Reward is the state index plus 0.5 for
/// moving right. Starts in state 0.
struct Chain {
  static constexpr int kStates = 3;
  static constexpr int kActions = 2;
  double gamma = 0.9;
  double slip = 0.2;

  double reward(int x, int a) const { return x + (a == 1 ? 0.5 : 0.0); }
  double p(int x, int a, int y) const {
    const int moved = std::clamp(x + (a == 1 ? 1 : -1), 0, kStates - 1);
    return (y == moved ? 1 - slip : 0.0) + (y == x ? slip : 0.0);
  }
  static Index sa(int x, int a) { return x * kActions + a; }

  /// Normalized discounted occupancy of (x, a) under pi[x][a], from state 0.
  VectorXr occupancy(const MatrixXr& pi) const {
    const Index n = kStates * kActions;
    MatrixXr p_pi = MatrixXr::Zero(n, n);
    for (int x = 0; x < kStates; ++x)
      for (int a = 0; a < kActions; ++a)
        for (int y = 0; y < kStates; ++y)
          for (int b = 0; b < kActions; ++b) p_pi(sa(x, a), sa(y, b)) = p(x, a, y) * pi(y, b);
    VectorXr start = VectorXr::Zero(n);
    for (int b = 0; b < kActions; ++b) start[sa(0, b)] = pi(0, b);
    const MatrixXr a = MatrixXr::Identity(n, n) - gamma * p_pi.transpose();
    return (1 - gamma) * a.partialPivLu().solve(start);
  }

  /// Discounted return J(pi) = beta^T (I - gamma P_pi)^-1 r_pi.
  double value(const MatrixXr& pi) const {
    MatrixXr p_pi = MatrixXr::Zero(kStates, kStates);
    VectorXr r = VectorXr::Zero(kStates);
    for (int x = 0; x < kStates; ++x)
      for (int a = 0; a < kActions; ++a) {
        r[x] += pi(x, a) * reward(x, a);
        for (int y = 0; y < kStates; ++y) p_pi(x, y) += pi(x, a) * p(x, a, y);
      }
    const VectorXr v = (MatrixXr::Identity(kStates, kStates) - gamma * p_pi).partialPivLu().solve(r);
    return v[0];
  }

  static VectorXr one_hot(int x, int a) {
    VectorXr v = VectorXr::Zero(kStates * kActions);
    v[sa(x, a)] = 1;
    return v;
  }

  /// n transitions from behavior's normalized discounted occupancy: after every step the
  /// walk restarts at state 0 with probability 1 - gamma.
  dcrl::ope::DiceDataset sample(const MatrixXr& behavior, const MatrixXr& target, std::size_t n,
                                std::uint64_t seed) const {
    dcrl::Rng rng(seed);
    dcrl::ope::DiceDataset d;
    auto draw = [&](const double* probs, int k) {
      double u = dcrl::uniform01(rng);
      for (int i = 0; i < k - 1; ++i) {
        if (u < probs[i]) return i;
        u -= probs[i];
      }
      return k - 1;
    };
    auto pairs = [&](int x) {
      MatrixXr m(kStates * kActions, kActions);
      for (int b = 0; b < kActions; ++b) m.col(b) = one_hot(x, b);
      return m;
    };
    int x = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const VectorXr pb = behavior.row(x).transpose();
      const int a = draw(pb.data(), kActions);
      double py[kStates];
      for (int y = 0; y < kStates; ++y) py[y] = p(x, a, y);
      const int y = draw(py, kStates);
      dcrl::ope::DiceSample s;
      s.sa = one_hot(x, a);
      s.reward = reward(x, a);
      s.next_sa = pairs(y);
      s.next_pi = target.row(y).transpose();
      d.samples.push_back(std::move(s));
      x = dcrl::bernoulli(rng, 1 - gamma) ? 0 : y;
    }
    d.initial.push_back({pairs(0), target.row(0).transpose()});
    return d;
  }
};

}  // namespace oracle
