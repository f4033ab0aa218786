#pragma once

#include "dcrl/core/types.hpp"
#include "dcrl/nlu/nlu.hpp"
#include "dcrl/providers/knowledge_base.hpp"

#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace dcrl::providers {

using CandidateSet = std::vector<Candidate>;

/// Thrown when no provider has anything left to say; the DM must end the conversation.
class EmptyCandidateSet : public std::runtime_error {
 public:
  EmptyCandidateSet() : std::runtime_error("no candidates available") {}
};

struct CompositionContext {
  nlu::FocusState focus;
  std::vector<Candidate> utterances_this_turn;
  std::size_t step_index = 0;
  std::size_t turn_index = 0;
  std::set<std::string> used_content_ids;
  /// The user's last reply answered the bot's question cooperatively.
  bool after_cooperative_answer = false;
};

/// Per-provider subsample caps applied on every call.
struct ProviderCaps {
  std::size_t facts = 5;
  std::size_t focus_change = 3;
  std::size_t questions = 2;  // per question provider
  std::size_t total = 30;
};

/// Union of all providers' template-filled candidates for the current focus.
/// Each provider subsamples its own pool with the seeded generator, so two calls
/// on the same context with different seeds realize different action sets.
CandidateSet generate_candidates(const CompositionContext& ctx, const KnowledgeBase& kb, std::uint64_t seed,
                                 const ProviderCaps& caps = {});

namespace content {
std::string fact(const EntityId& e, std::size_t i);
std::string sound(const EntityId& e);
std::string quiz(const EntityId& e);
}  // namespace content

}  // namespace dcrl::providers
