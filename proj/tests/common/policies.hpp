#pragma once

#include "dcrl/rl/policy.hpp"

namespace dcrl::testing {

// Linear Q-head that rates Sound candidates 5.5 and everything else 0.5, over a small
// random GRU. Enough to drive live sessions without training.
inline rl::Policy sound_loving_policy(nn::Index hidden = 8) {
  rl::Policy p;
  p.kind = PolicyKind::Saql;
  p.threshold = 0;
  Rng rng(1);
  const auto input = p.embedder.dim + static_cast<nn::Index>(kCandidateFeatureWidth);
  p.cell = nn::GruCell<double>::random(input, hidden, rng);
  const nn::Index state = encoder::StateLayout{hidden, p.embedder.dim}.width();
  p.head = rl::Net(state + input, {1}, {nn::Activation::Identity});
  p.head.layers()[0].weight(0, state + p.embedder.dim + static_cast<nn::Index>(ActKind::Sound)) = 5;
  p.head.layers()[0].bias[0] = 0.5;
  return p;
}

}  // namespace dcrl::testing
