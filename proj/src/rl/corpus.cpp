#include "dcrl/rl/corpus.hpp"

#include "dcrl/core/conversation_io.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace dcrl::rl {

nlohmann::json to_json(const StepRecord& r) {
  nlohmann::json cands = nlohmann::json::array();
  for (std::size_t i = 0; i < r.candidates.size(); ++i) {
    auto c = dcrl::to_json(r.candidates[i]);
    c["rating"] = i < r.ratings.size() ? nlohmann::json(r.ratings[i]) : nlohmann::json(nullptr);
    cands.push_back(std::move(c));
  }
  return {{"conversation", r.conversation},
          {"turn", r.turn},
          {"step", r.step},
          {"candidates", std::move(cands)},
          {"selected", r.selected ? nlohmann::json(*r.selected) : nlohmann::json(nullptr)},
          {"behavior_prob", r.behavior_prob}};
}

StepRecord step_from_json(const nlohmann::json& j) {
  StepRecord r;
  r.conversation = j.at("conversation").get<std::size_t>();
  r.turn = j.at("turn").get<std::size_t>();
  r.step = j.at("step").get<std::size_t>();
  for (const auto& c : j.at("candidates")) {
    r.candidates.push_back(candidate_from_json(c));
    if (c.contains("rating") && !c.at("rating").is_null()) r.ratings.push_back(c.at("rating").get<int>());
  }
  if (!r.ratings.empty() && r.ratings.size() != r.candidates.size())
    throw std::invalid_argument("step record: ratings must cover every candidate or none");
  if (!j.at("selected").is_null()) r.selected = j.at("selected").get<std::size_t>();
  r.behavior_prob = j.value("behavior_prob", 1.0);
  return r;
}

void write_steps(std::ostream& out, const std::vector<StepRecord>& steps) {
  for (const auto& s : steps) out << to_json(s).dump() << '\n';
}

void write_steps(const std::filesystem::path& path, const std::vector<StepRecord>& steps) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_steps(out, steps);
}

std::vector<StepRecord> read_steps(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::vector<StepRecord> out;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) out.push_back(step_from_json(nlohmann::json::parse(line)));
  return out;
}

Corpus Corpus::build(const std::vector<Conversation>& conversations, const std::vector<StepRecord>& steps,
                     const encoder::SentenceEmbedder& embedder) {
  Corpus c;
  c.embedder = embedder;
  for (const auto& conv : conversations) c.inputs.push_back(encoder::conversation_inputs(embedder, conv));
  c.points_of.resize(conversations.size());

  // Utterance offsets per (conversation, turn).
  std::vector<std::vector<std::uint32_t>> offset(conversations.size());
  for (std::size_t i = 0; i < conversations.size(); ++i) {
    std::uint32_t n = 0;
    for (const auto& t : conversations[i].turns) {
      offset[i].push_back(n);
      n += static_cast<std::uint32_t>(t.utterances.size());
    }
    offset[i].push_back(n);
  }

  std::unordered_map<std::string, std::uint32_t> action_ids;
  std::vector<VectorXr> action_cols;
  std::vector<const StepRecord*> ordered;
  for (const auto& s : steps) ordered.push_back(&s);
  std::stable_sort(ordered.begin(), ordered.end(), [](const StepRecord* a, const StepRecord* b) {
    return std::tie(a->conversation, a->turn, a->step) < std::tie(b->conversation, b->turn, b->step);
  });

  for (const StepRecord* s : ordered) {
    if (s->conversation >= conversations.size()) throw std::invalid_argument("step record refers to a missing conversation");
    const auto& conv = conversations[s->conversation];
    // A declined first step leaves no bot turn behind, so it may point one past the end.
    const bool past_end = s->turn == conv.turns.size() && !s->selected && s->step == 0;
    if (!past_end && (s->turn >= conv.turns.size() || conv.turns[s->turn].speaker != Speaker::Bot))
      throw std::invalid_argument("step record does not point at a bot turn");
    CorpusPoint p;
    p.conversation = static_cast<std::uint32_t>(s->conversation);
    p.history = offset[s->conversation][s->turn] + static_cast<std::uint32_t>(s->step);
    p.turn = static_cast<std::uint32_t>(s->turn);
    p.step = static_cast<std::uint32_t>(s->step);
    if (s->turn > 0) p.user_column = static_cast<std::int32_t>(offset[s->conversation][s->turn - 1]);
    for (const auto& cand : s->candidates) {
      std::ostringstream key;
      key << cand.text << '\x1e' << static_cast<int>(cand.act.kind) << '\x1e' << cand.offers_focus_change << '\x1e'
          << s->turn << '\x1e' << s->step;
      auto [it, fresh] = action_ids.emplace(key.str(), static_cast<std::uint32_t>(action_cols.size()));
      if (fresh) action_cols.push_back(encoder::embed_action(embedder, cand, s->turn, s->step));
      p.actions.push_back(it->second);
    }
    for (int r : s->ratings) p.ratings.push_back(r);
    p.selected = s->selected ? static_cast<std::int32_t>(*s->selected) : -1;
    p.behavior_prob = s->behavior_prob;
    c.points_of[s->conversation].push_back(static_cast<std::uint32_t>(c.points.size()));
    c.points.push_back(std::move(p));
  }

  const Index width = embedder.dim + static_cast<Index>(kCandidateFeatureWidth);
  c.actions.resize(width, static_cast<Index>(action_cols.size()));
  for (std::size_t k = 0; k < action_cols.size(); ++k) c.actions.col(static_cast<Index>(k)) = action_cols[k];

  for (const auto& ids : c.points_of) {
    std::vector<std::uint32_t> acting;
    for (auto id : ids)
      if (c.points[id].selected >= 0) acting.push_back(id);
    for (std::size_t k = 0; k < acting.size(); ++k) {
      const auto& p = c.points[acting[k]];
      if (p.ratings.empty()) throw std::invalid_argument("selected step without ratings");
      CorpusTransition t;
      t.point = acting[k];
      t.slot = static_cast<std::uint32_t>(p.selected);
      t.reward = p.ratings[static_cast<std::size_t>(p.selected)];
      t.next = k + 1 < acting.size() ? static_cast<std::int64_t>(acting[k + 1]) : -1;
      c.transitions.push_back(t);
    }
  }
  return c;
}

std::size_t Corpus::supervised_labels() const {
  std::size_t n = 0;
  for (const auto& p : points) n += p.ratings.size();
  return n;
}

VectorXr Corpus::state(const CorpusPoint& point, const MatrixXr& conversation_states, Index hidden) const {
  VectorXr user = VectorXr::Zero(embedder.dim);
  if (point.user_column >= 0) user = inputs[point.conversation].col(point.user_column).head(embedder.dim);
  return encoder::build_state(encoder::StateLayout{hidden, embedder.dim}, conversation_states.col(point.history), user,
                              point.turn, point.step)
      .values();
}

Transition TransitionDataset::materialize(std::size_t k) const {
  const auto& ct = transitions.at(k);
  Transition t;
  t.state = states.col(ct.point);
  const auto& cands = candidates[ct.point];
  t.action = actions.col(cands.at(ct.slot));
  t.reward = ct.reward;
  t.terminal = ct.next < 0;
  t.candidates.resize(actions.rows(), static_cast<Index>(cands.size()));
  for (std::size_t i = 0; i < cands.size(); ++i) t.candidates.col(static_cast<Index>(i)) = actions.col(cands[i]);
  t.behavior_slot = static_cast<Index>(ct.slot);
  if (!t.terminal) {
    const auto next = static_cast<std::size_t>(ct.next);
    t.next_state = states.col(static_cast<Index>(next));
    const auto& nc = candidates[next];
    t.next_candidates.resize(actions.rows(), static_cast<Index>(nc.size()));
    for (std::size_t i = 0; i < nc.size(); ++i) t.next_candidates.col(static_cast<Index>(i)) = actions.col(nc[i]);
    if (selected[next] >= 0) t.next_behavior_action = actions.col(nc[static_cast<std::size_t>(selected[next])]);
  } else {
    t.next_state = VectorXr::Zero(states.rows());
  }
  return t;
}

Batch TransitionDataset::batch(const std::vector<std::size_t>& ids) const {
  Batch b;
  b.reserve(ids.size());
  for (auto k : ids) b.push_back(materialize(k));
  return b;
}

TransitionDataset embed_corpus(const Corpus& corpus, const nn::GruCell<double>& cell) {
  TransitionDataset ds;
  const Index hidden = cell.hidden_width;
  const Index d = encoder::StateLayout{hidden, corpus.embedder.dim}.width();
  ds.states.resize(d, static_cast<Index>(corpus.points.size()));
  for (std::size_t c = 0; c < corpus.points_of.size(); ++c) {
    if (corpus.points_of[c].empty()) continue;
    const MatrixXr states = nn::gru_sequence(cell, corpus.inputs[c], VectorXr::Zero(hidden).eval());
    for (auto id : corpus.points_of[c]) ds.states.col(id) = corpus.state(corpus.points[id], states, hidden);
  }
  ds.actions = corpus.actions;
  for (const auto& p : corpus.points) {
    ds.candidates.push_back(p.actions);
    ds.selected.push_back(p.selected);
  }
  ds.transitions = corpus.transitions;
  return ds;
}

}  // namespace dcrl::rl
