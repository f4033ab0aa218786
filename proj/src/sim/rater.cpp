#include "dcrl/sim/sim.hpp"

#include <algorithm>
#include <cmath>

namespace dcrl::sim {

namespace {

bool starts_with(const std::string& s, std::string_view prefix) { return s.rfind(prefix, 0) == 0; }

}  // namespace

RatingContext rating_context(const Composer& c, const SimUserProfile& profile) {
  RatingContext ctx;
  ctx.step_index = c.step_index();
  ctx.after_cooperative_answer = c.after_cooperative_answer();
  ctx.request = c.request();
  ctx.request_pending = c.request() != Request::None && !c.served_content();
  ctx.prefers_facts = profile.prefers_facts;
  ctx.used = &c.used_content();
  return ctx;
}

double base_score(const Candidate& cand, const RatingContext& ctx) {
  const ActKind kind = cand.act.kind;
  if (kind == ActKind::Ack) return ctx.step_index == 0 && ctx.after_cooperative_answer ? 3 : -1;
  if (!cand.content_id.empty() && ctx.used && ctx.used->count(cand.content_id)) return -2;
  if (ctx.request_pending) {
    const bool answers = (ctx.request == Request::Sound && kind == ActKind::Sound) ||
                         (ctx.request == Request::Facts && kind == ActKind::Fact);
    if (!answers) return -2;
  }
  const double lover = ctx.prefers_facts ? 1 : 0;
  switch (kind) {
    case ActKind::Sound: return 6 + (ctx.request == Request::Sound ? 1 : 0);
    case ActKind::Fact: return 4 + lover + (ctx.request == Request::Facts ? 1 : 0);
    case ActKind::Quiz: return 5;
    case ActKind::FocusChange: return starts_with(cand.content_id, "offer_sound:") ? 5 : 4 + lover;
    case ActKind::YesNoQuestion: return 4;
    case ActKind::OpenQuestion:
    case ActKind::ListQuestion: return 3;
    case ActKind::Ack: break;
  }
  return 0;
}

int discretize_rating(double raw) {
  double r = std::round(raw);
  if (r == 0) r = raw < 0 ? -1 : 1;
  return static_cast<int>(std::clamp(r, -3.0, 7.0));
}

int rate_utterance(const Candidate& cand, const RatingContext& ctx, double sigma, Rng& rng) {
  const double noise = sigma > 0 ? sigma * standard_normal(rng) : 0.0;
  return discretize_rating(base_score(cand, ctx) + noise);
}

}  // namespace dcrl::sim
