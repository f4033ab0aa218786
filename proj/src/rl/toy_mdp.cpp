#include "dcrl/rl/toy_mdp.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace dcrl::rl {

ToyMdp ToyMdp::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  const auto j = nlohmann::json::parse(in);
  ToyMdp m;
  m.gamma = j.at("gamma").get<double>();
  m.states = j.at("states").get<int>();
  m.actions = j.at("actions").get<int>();
  for (const auto& sets : j.at("action_sets")) {
    std::vector<ActionSet> v;
    for (const auto& s : sets) v.push_back({s.at("actions").get<std::vector<int>>(), s.at("prob").get<double>()});
    m.action_sets.push_back(std::move(v));
  }
  m.reward = j.at("reward").get<std::vector<std::vector<double>>>();
  m.next = j.at("next").get<std::vector<std::vector<std::vector<double>>>>();
  m.initial = j.at("initial").get<std::vector<double>>();
  const auto n = static_cast<std::size_t>(m.states);
  if (m.action_sets.size() != n || m.reward.size() != n || m.next.size() != n || m.initial.size() != n)
    throw std::invalid_argument("toy MDP: per-state tables must have one row per state");
  for (std::size_t x = 0; x < n; ++x) {
    double total = 0;
    for (const auto& s : m.action_sets[x]) total += s.prob;
    if (std::abs(total - 1) > 1e-12) throw std::invalid_argument("toy MDP: action-set probabilities must sum to 1");
    for (const auto& row : m.next[x]) {
      double t = 0;
      for (double p : row) t += p;
      if (std::abs(t - 1) > 1e-12) throw std::invalid_argument("toy MDP: transition rows must sum to 1");
    }
  }
  return m;
}

VectorXr ToyMdp::state_features(int x) const {
  VectorXr v = VectorXr::Zero(state_width());
  v[x] = 1;
  return v;
}

VectorXr ToyMdp::action_features(int x, int a) const {
  VectorXr v = VectorXr::Zero(action_width());
  v[static_cast<Index>(x) * actions + a] = 1;
  return v;
}

MatrixXr ToyMdp::set_features(int x, const std::vector<int>& set) const {
  MatrixXr m(action_width(), static_cast<Index>(set.size()));
  for (std::size_t i = 0; i < set.size(); ++i) m.col(static_cast<Index>(i)) = action_features(x, set[i]);
  return m;
}

Batch exact_batch(const ToyMdp& mdp, ToyBehavior behavior, int resolution) {
  Batch out;
  const double unit = std::pow(static_cast<double>(resolution), 3);
  for (int x = 0; x < mdp.states; ++x)
    for (const auto& set : mdp.action_sets[x])
      for (std::size_t slot = 0; slot < set.actions.size(); ++slot) {
        const int a = set.actions[slot];
        if (behavior == ToyBehavior::FirstAvailable && a != *std::min_element(set.actions.begin(), set.actions.end()))
          continue;
        for (int y = 0; y < mdp.states; ++y) {
          const double py = mdp.next[x][a][y];
          if (py == 0) continue;
          for (const auto& nset : mdp.action_sets[y]) {
            const double w = set.prob * py * nset.prob * unit;
            const auto copies = static_cast<long>(std::llround(w));
            if (std::abs(w - static_cast<double>(copies)) > 1e-9)
              throw std::invalid_argument("toy MDP: probabilities are not multiples of 1/resolution");
            Transition t;
            t.state = mdp.state_features(x);
            t.action = mdp.action_features(x, a);
            t.reward = mdp.reward[x][a];
            t.next_state = mdp.state_features(y);
            t.next_candidates = mdp.set_features(y, nset.actions);
            t.candidates = mdp.set_features(x, set.actions);
            t.behavior_slot = static_cast<Index>(slot);
            for (long c = 0; c < copies; ++c) out.push_back(t);
          }
        }
      }
  return out;
}

}  // namespace dcrl::rl
