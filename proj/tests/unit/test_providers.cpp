#include "doctest.h"

#include "dcrl/providers/knowledge_base.hpp"
#include "dcrl/providers/providers.hpp"

#include <filesystem>

using namespace dcrl;
using namespace dcrl::providers;

namespace {

const KnowledgeBase& kb() {
  static const KnowledgeBase k = KnowledgeBase::load(std::filesystem::path(DCRL_SOURCE_DIR) / "data" / "kb.jsonl");
  return k;
}

CompositionContext focused(const EntityId& e) {
  CompositionContext ctx;
  ctx.focus.move_to(e);
  return ctx;
}

std::size_t count_kind(const CandidateSet& s, ActKind k) {
  std::size_t n = 0;
  for (const auto& c : s) n += c.act.kind == k;
  return n;
}

}  // namespace

TEST_CASE("shipped knowledge base is valid") {
  CHECK(kb().lint().empty());
  CHECK(kb().size() >= 10);
  CHECK(kb().contains("polar bear"));
}

TEST_CASE("lint reports broken entries") {
  const auto bad = KnowledgeBase::parse(
      R"({"id":"lion","plural":"lions","pronoun":"they","aliases":["lion"],"facts":[{"text":"a","source":""}],)"
      R"("sound_line":"roar","quiz":{"prompt":"?","options":["lion"],"answer":"tiger"},"related":["unicorn"]})");
  const auto problems = bad.lint();
  CHECK(problems.size() >= 3);
}

TEST_CASE("polar bear candidate set at step 0") {
  const auto set = generate_candidates(focused("polar bear"), kb(), 3);
  CHECK(count_kind(set, ActKind::Sound) == 1);
  CHECK(count_kind(set, ActKind::Fact) >= 3);
  CHECK(count_kind(set, ActKind::YesNoQuestion) >= 1);
  bool penguin = false, sound_text = false;
  for (const auto& c : set) {
    penguin = penguin || (c.act.kind == ActKind::FocusChange && c.target_entity == std::optional<EntityId>("penguin"));
    sound_text = sound_text || (c.act.kind == ActKind::Sound && c.text.find("polar bear") != std::string::npos);
  }
  CHECK(penguin);
  CHECK(sound_text);
  CHECK(set.size() <= ProviderCaps{}.total);
}

TEST_CASE("candidate generation is seeded") {
  const auto a = generate_candidates(focused("lion"), kb(), 7);
  CHECK(a == generate_candidates(focused("lion"), kb(), 7));
  bool differs = false;
  for (std::uint64_t s = 8; s < 20 && !differs; ++s) differs = !(a == generate_candidates(focused("lion"), kb(), s));
  CHECK(differs);
}

TEST_CASE("used content is never proposed again") {
  auto ctx = focused("lion");
  for (const auto& c : generate_candidates(ctx, kb(), 1))
    if (!c.content_id.empty()) ctx.used_content_ids.insert(c.content_id);
  for (const auto& c : generate_candidates(ctx, kb(), 1))
    if (!c.content_id.empty()) CHECK(ctx.used_content_ids.count(c.content_id) == 0);
}

TEST_CASE("exhausted isolated entity throws") {
  const auto solo = kb().subset({"lion"});
  auto ctx = focused("lion");
  for (int round = 0; round < 50; ++round) {
    CandidateSet set;
    try {
      set = generate_candidates(ctx, solo, static_cast<std::uint64_t>(round));
    } catch (const EmptyCandidateSet&) {
      CHECK(round > 0);
      return;
    }
    for (const auto& c : set) ctx.used_content_ids.insert(c.content_id.empty() ? c.text : c.content_id);
    ctx.step_index = 1;
  }
  FAIL("candidate set never ran out");
}
