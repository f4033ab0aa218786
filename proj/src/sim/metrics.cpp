#include "dcrl/sim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <set>
#include <sstream>
#include <stdexcept>

namespace dcrl::sim {

ConversationCounts count(const Conversation& conv, const nlu::Nlu& nlu) {
  ConversationCounts c;
  c.length = conv.turns.size();
  std::set<std::string> providers;
  const Turn* previous_bot = nullptr;
  for (std::size_t t = 0; t < conv.turns.size(); ++t) {
    const Turn& turn = conv.turns[t];
    if (turn.speaker == Speaker::User) {
      const auto& text = turn.utterances.at(0).text;
      switch (nlu.feedback(text)) {
        case nlu::Feedback::Positive: ++c.positive_feedback; break;
        case nlu::Feedback::Negative: ++c.negative_feedback; break;
        case nlu::Feedback::None: break;
      }
      if (previous_bot) {
        if (const auto q = nlu::closing_question(*previous_bot)) {
          switch (nlu.interpret_answer(*q, text).cooperation) {
            case nlu::Cooperation::Cooperative: ++c.cooperative; break;
            case nlu::Cooperation::NonCooperative: ++c.non_cooperative; break;
            case nlu::Cooperation::Ignored: ++c.ignored; break;
          }
        }
      }
      continue;
    }
    ++c.bot_turns;
    if (nlu::closing_question(turn)) ++c.question_turns;
    for (const auto& u : turn.utterances) {
      ++c.bot_utterances;
      if (u.act && u.act->kind == ActKind::Fact) ++c.fact_utterances;
      if (u.rating) c.ret += *u.rating;
      providers.insert(u.provider_id);
    }
    if (previous_bot) {
      ++c.pivot_opportunities;
      if (turn.focus_after != previous_bot->focus_after) ++c.pivots;
    }
    previous_bot = &turn;
  }
  c.unique_providers = providers.size();
  return c;
}

std::vector<std::pair<std::string, double>> MetricsReport::fields() const {
  return {{"conversation_length", conversation_length},
          {"return", mean_return},
          {"cooperative_responses", cooperative},
          {"non_cooperative_responses", non_cooperative},
          {"explicit_positive_feedback", positive_feedback},
          {"explicit_negative_feedback", negative_feedback},
          {"question_ending_turn_rate", question_ending_rate},
          {"unique_providers", unique_providers},
          {"fact_fraction", fact_fraction},
          {"focus_pivot_rate", focus_pivot_rate}};
}

nlohmann::json MetricsReport::to_json() const {
  nlohmann::json j = {{"conversations", conversations}};
  for (const auto& [k, v] : fields()) j[k] = v;
  return j;
}

MetricsReport aggregate(const std::vector<ConversationCounts>& counts) {
  MetricsReport r;
  r.conversations = counts.size();
  if (counts.empty()) return r;
  double qt = 0, bt = 0, fu = 0, bu = 0, pv = 0, po = 0;
  for (const auto& c : counts) {
    r.conversation_length += static_cast<double>(c.length);
    r.mean_return += c.ret;
    r.cooperative += static_cast<double>(c.cooperative);
    r.non_cooperative += static_cast<double>(c.non_cooperative);
    r.positive_feedback += static_cast<double>(c.positive_feedback);
    r.negative_feedback += static_cast<double>(c.negative_feedback);
    r.unique_providers += static_cast<double>(c.unique_providers);
    qt += static_cast<double>(c.question_turns);
    bt += static_cast<double>(c.bot_turns);
    fu += static_cast<double>(c.fact_utterances);
    bu += static_cast<double>(c.bot_utterances);
    pv += static_cast<double>(c.pivots);
    po += static_cast<double>(c.pivot_opportunities);
  }
  const double n = static_cast<double>(counts.size());
  for (double* f : {&r.conversation_length, &r.mean_return, &r.cooperative, &r.non_cooperative, &r.positive_feedback,
                    &r.negative_feedback, &r.unique_providers})
    *f /= n;
  r.question_ending_rate = bt > 0 ? qt / bt : 0;
  r.fact_fraction = bu > 0 ? fu / bu : 0;
  r.focus_pivot_rate = po > 0 ? pv / po : 0;
  return r;
}

double percent_change(double arm, double control) {
  if (control == 0) return arm == 0 ? 0.0 : std::nan("");
  return 100.0 * (arm - control) / std::abs(control);
}

Interval bootstrap_mean_ci(const std::vector<double>& xs, std::uint64_t seed, std::size_t resamples, double level) {
  if (xs.empty()) return {};
  Rng rng(seed);
  std::vector<double> means;
  means.reserve(resamples);
  const std::size_t n = xs.size();
  for (std::size_t b = 0; b < resamples; ++b) {
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) s += xs[uniform_index(rng, n)];
    means.push_back(s / static_cast<double>(n));
  }
  std::sort(means.begin(), means.end());
  const double tail = (1 - level) / 2;
  const auto at = [&](double q) {
    const auto k = static_cast<std::size_t>(std::floor(q * static_cast<double>(resamples - 1) + 0.5));
    return means[std::min(k, resamples - 1)];
  };
  return {at(tail), at(1 - tail)};
}

AbReport ab_experiment(const std::vector<Arm>& arms, std::size_t control, const World& world, std::size_t n,
                       std::uint64_t seed) {
  if (arms.size() < 2) throw std::invalid_argument("an A/B experiment needs at least 2 arms");
  if (control >= arms.size()) throw std::invalid_argument("control arm index out of range");
  AbReport out;
  out.control = control;
  out.seed = seed;
  for (const auto& arm : arms) {
    ArmResult r;
    r.name = arm.name;
    std::vector<double> lengths, returns;
    for (std::size_t k = 0; k < n; ++k) {
      const auto profile = sample_profile(world, profile_seed(seed, k), k);
      const auto res = rollout_episode(*arm.dm, world, profile, episode_seed(seed, k));
      r.counts.push_back(count(res.conversation, world.nlu));
      r.conversation_ratings.push_back(res.conversation_rating);
      lengths.push_back(static_cast<double>(r.counts.back().length));
      returns.push_back(r.counts.back().ret);
    }
    r.report = aggregate(r.counts);
    r.length_ci = bootstrap_mean_ci(lengths, derive_seed(seed, 1001));
    r.return_ci = bootstrap_mean_ci(returns, derive_seed(seed, 1002));
    out.arms.push_back(std::move(r));
  }
  return out;
}

namespace {

std::string fixed(double v, int digits) {
  if (std::isnan(v)) return "n/a";
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

std::string signed_percent(double v) {
  if (std::isnan(v)) return "n/a";
  std::ostringstream s;
  s << std::showpos << std::fixed << std::setprecision(1) << (v == 0 ? 0.0 : v) << '%';
  return s.str();
}

}  // namespace

std::string AbReport::to_text() const {
  std::ostringstream o;
  const auto& ctrl = arms[control];
  const auto names = ctrl.report.fields();
  o << std::left << std::setw(30) << "metric";
  for (const auto& a : arms) o << std::setw(22) << a.name;
  o << '\n';
  for (std::size_t f = 0; f < names.size(); ++f) {
    o << std::setw(30) << names[f].first;
    for (std::size_t a = 0; a < arms.size(); ++a) {
      const double v = arms[a].report.fields()[f].second;
      std::string cell = fixed(v, 3);
      if (a != control) cell += " (" + signed_percent(percent_change(v, names[f].second)) + ")";
      o << std::setw(22) << cell;
    }
    o << '\n';
  }
  o << std::setw(30) << "length 95% CI";
  for (const auto& a : arms) o << std::setw(22) << ("[" + fixed(a.length_ci.lo, 3) + ", " + fixed(a.length_ci.hi, 3) + "]");
  o << '\n' << std::setw(30) << "return 95% CI";
  for (const auto& a : arms) o << std::setw(22) << ("[" + fixed(a.return_ci.lo, 3) + ", " + fixed(a.return_ci.hi, 3) + "]");
  o << "\nconversations per arm: " << ctrl.report.conversations << ", control: " << ctrl.name << ", seed: " << seed
    << '\n';
  return o.str();
}

nlohmann::json AbReport::to_json() const {
  nlohmann::json j = {{"control", arms[control].name}, {"seed", seed}, {"arms", nlohmann::json::array()}};
  const auto ctrl = arms[control].report.fields();
  for (std::size_t a = 0; a < arms.size(); ++a) {
    nlohmann::json arm = {{"name", arms[a].name}, {"metrics", arms[a].report.to_json()}};
    nlohmann::json change = nlohmann::json::object();
    const auto f = arms[a].report.fields();
    for (std::size_t k = 0; k < f.size(); ++k) {
      const double pc = percent_change(f[k].second, ctrl[k].second);
      change[f[k].first] = std::isnan(pc) ? nlohmann::json(nullptr) : nlohmann::json(pc);
    }
    arm["percent_change"] = change;
    arm["length_ci"] = {arms[a].length_ci.lo, arms[a].length_ci.hi};
    arm["return_ci"] = {arms[a].return_ci.lo, arms[a].return_ci.hi};
    j["arms"].push_back(arm);
  }
  return j;
}

}  // namespace dcrl::sim
