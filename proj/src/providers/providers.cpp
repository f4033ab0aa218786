#include "dcrl/providers/providers.hpp"

#include "dcrl/core/random.hpp"

#include <array>

namespace dcrl::providers {

namespace content {
std::string fact(const EntityId& e, std::size_t i) { return "fact:" + e + ":" + std::to_string(i); }
std::string sound(const EntityId& e) { return "sound:" + e; }
std::string quiz(const EntityId& e) { return "quiz:" + e; }
}  // namespace content

namespace {

constexpr std::array<const char*, 3> kAcks = {"Great.", "Cool.", "Awesome."};

bool used(const CompositionContext& ctx, const std::string& id) { return ctx.used_content_ids.count(id) != 0; }

bool has_unused_facts(const CompositionContext& ctx, const EntityEntry& e) {
  for (std::size_t i = 0; i < e.facts.size(); ++i)
    if (!used(ctx, content::fact(e.id, i))) return true;
  return false;
}

void take_subsample(CandidateSet& out, CandidateSet pool, std::size_t cap, Rng& rng) {
  for (std::size_t i : sample_sorted(rng, pool.size(), cap)) out.push_back(std::move(pool[i]));
}

void ack_provider(const CompositionContext& ctx, CandidateSet& out, Rng& rng) {
  const std::size_t pick = uniform_index(rng, kAcks.size());
  if (ctx.step_index == 0 && ctx.after_cooperative_answer)
    out.push_back(Candidate::make(kAcks[pick], DialogueAct(ActKind::Ack), "ack"));
}

void sound_provider(const CompositionContext& ctx, const EntityEntry& focus, CandidateSet& out) {
  if (!used(ctx, content::sound(focus.id)))
    out.push_back(Candidate::make(focus.sound_line, DialogueAct(ActKind::Sound, focus.id), "sound", content::sound(focus.id)));
}

void fact_provider(const CompositionContext& ctx, const EntityEntry& focus, CandidateSet& out, std::size_t cap, Rng& rng) {
  CandidateSet pool;
  for (std::size_t i = 0; i < focus.facts.size(); ++i) {
    const auto id = content::fact(focus.id, i);
    if (!used(ctx, id))
      pool.push_back(Candidate::make(render_fact(focus.facts[i]), DialogueAct(ActKind::Fact, focus.id),
                                     focus.facts[i].source == "structured" ? "facts_kg" : "facts_web", id));
  }
  take_subsample(out, std::move(pool), cap, rng);
}

void quiz_provider(const CompositionContext& ctx, const KnowledgeBase& kb, const EntityEntry& focus, CandidateSet& out,
                   std::size_t cap, Rng& rng) {
  CandidateSet pool;
  std::vector<EntityId> subjects{focus.id};
  subjects.insert(subjects.end(), focus.related.begin(), focus.related.end());
  for (const auto& s : subjects) {
    const auto& entry = kb.at(s);
    const auto id = content::quiz(entry.quiz.answer);
    if (!used(ctx, id))
      pool.push_back(Candidate::make(entry.quiz.prompt, DialogueAct(ActKind::Quiz, entry.quiz.answer), "quiz", id));
  }
  take_subsample(out, std::move(pool), cap, rng);
}

void focus_change_provider(const CompositionContext& ctx, const KnowledgeBase& kb, const EntityEntry& focus,
                           CandidateSet& out, std::size_t cap, Rng& rng) {
  CandidateSet pool;
  for (const auto& r : focus.related) {
    const auto& entry = kb.at(r);
    if (!used(ctx, content::sound(r)) && !used(ctx, "offer_sound:" + r))
      pool.push_back(Candidate::make("Hey, do you want to hear the sound of a " + entry.id + "?",
                                     DialogueAct(ActKind::FocusChange, r), "focus_change", "offer_sound:" + r));
    if (has_unused_facts(ctx, entry) && !used(ctx, "offer_facts:" + r))
      pool.push_back(Candidate::make("Do you want to learn about " + entry.plural + "?",
                                     DialogueAct(ActKind::FocusChange, r), "focus_change", "offer_facts:" + r));
  }
  take_subsample(out, std::move(pool), cap, rng);
}

void yes_no_provider(const CompositionContext& ctx, const EntityEntry& focus, CandidateSet& out, std::size_t cap,
                     Rng& rng) {
  if (!has_unused_facts(ctx, focus)) return;
  CandidateSet pool;
  const std::array<std::string, 2> texts = {"Do you want to hear more about " + focus.plural + "?",
                                            "Would you like another fact about " + focus.plural + "?"};
  for (std::size_t k = 0; k < texts.size(); ++k) {
    const auto id = "more:" + focus.id + ":" + std::to_string(k);
    if (!used(ctx, id)) pool.push_back(Candidate::make(texts[k], DialogueAct(ActKind::YesNoQuestion, focus.id), "yes_no", id));
  }
  take_subsample(out, std::move(pool), cap, rng);
}

void list_provider(const CompositionContext& ctx, const EntityEntry& focus, CandidateSet& out, std::size_t cap, Rng& rng) {
  CandidateSet pool;
  for (std::size_t a = 0; a < focus.related.size(); ++a)
    for (std::size_t b = a + 1; b < focus.related.size(); ++b) {
      const auto& x = focus.related[a];
      const auto& y = focus.related[b];
      const auto id = "list:" + x + "|" + y;
      if (!used(ctx, id))
        pool.push_back(Candidate::make("Which animal do you want to hear about next, the " + x + " or the " + y + "?",
                                       DialogueAct(ActKind::ListQuestion), "list_question", id));
    }
  take_subsample(out, std::move(pool), cap, rng);
}

void open_provider(const CompositionContext& ctx, CandidateSet& out, std::size_t cap, Rng& rng) {
  CandidateSet pool;
  const std::array<const char*, 2> texts = {"Which animal do you want to learn about next?",
                                            "What animal should we talk about next?"};
  for (std::size_t k = 0; k < texts.size(); ++k) {
    const auto id = "open:" + std::to_string(k);
    if (!used(ctx, id)) pool.push_back(Candidate::make(texts[k], DialogueAct(ActKind::OpenQuestion), "open_question", id));
  }
  take_subsample(out, std::move(pool), cap, rng);
}

}  // namespace

CandidateSet generate_candidates(const CompositionContext& ctx, const KnowledgeBase& kb, std::uint64_t seed,
                                 const ProviderCaps& caps) {
  Rng rng(seed);
  CandidateSet out;
  ack_provider(ctx, out, rng);
  const EntityEntry* focus = nullptr;
  if (ctx.focus.current && kb.contains(*ctx.focus.current)) focus = &kb.at(*ctx.focus.current);
  if (focus) {
    sound_provider(ctx, *focus, out);
    fact_provider(ctx, *focus, out, caps.facts, rng);
    quiz_provider(ctx, kb, *focus, out, caps.questions, rng);
    focus_change_provider(ctx, kb, *focus, out, caps.focus_change, rng);
    yes_no_provider(ctx, *focus, out, caps.questions, rng);
    list_provider(ctx, *focus, out, caps.questions, rng);
  }
  open_provider(ctx, out, caps.questions, rng);
  if (out.size() > caps.total) out.resize(caps.total);
  // An acknowledgement alone carries no content.
  if (out.empty() || (out.size() == 1 && out[0].act.kind == ActKind::Ack)) throw EmptyCandidateSet();
  return out;
}

}  // namespace dcrl::providers
