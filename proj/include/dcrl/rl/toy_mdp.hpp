#pragma once

#include "dcrl/rl/qlearning.hpp"

#include <filesystem>
#include <vector>

namespace dcrl::rl {

/// Small tabular MDP whose available actions are drawn per visit from a distribution over
/// subsets. States are one-hot phi_x; actions are one-hot psi over (state, action) pairs,
/// so a linear Q over [phi; psi] is exactly tabular.
struct ToyMdp {
  struct ActionSet {
    std::vector<int> actions;
    double prob = 0;
  };

  double gamma = 0.9;
  int states = 0;
  int actions = 0;
  std::vector<std::vector<ActionSet>> action_sets;
  std::vector<std::vector<double>> reward;              // [x][a]
  std::vector<std::vector<std::vector<double>>> next;   // [x][a][x']
  std::vector<double> initial;

  static ToyMdp load(const std::filesystem::path& path);

  Index state_width() const { return states; }
  Index action_width() const { return static_cast<Index>(states) * actions; }
  VectorXr state_features(int x) const;
  VectorXr action_features(int x, int a) const;
  MatrixXr set_features(int x, const std::vector<int>& set) const;
};

enum class ToyBehavior {
  Uniform,         // every action of A_x, equally often
  FirstAvailable,  // always the lowest-index action of A_x
};

/// Every (x, A_x, a, x', A_x') combination the behavior can produce, each repeated in
/// proportion to P(A_x | x) P(x' | x, a) P(A_x' | x') (`resolution` copies per unit of
/// probability cubed). Each row records its action's slot in A_x.
Batch exact_batch(const ToyMdp& mdp, ToyBehavior behavior = ToyBehavior::Uniform, int resolution = 4);

}  // namespace dcrl::rl
