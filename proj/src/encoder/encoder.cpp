#include "dcrl/encoder/encoder.hpp"

#include "dcrl/core/text.hpp"

namespace dcrl::encoder {

VectorXr SentenceEmbedder::embed(const std::string& text) const {
  VectorXr v = VectorXr::Zero(dim);
  const auto toks = text::words(text);
  const std::uint64_t basis = 0xcbf29ce484222325ULL ^ hash_seed;
  auto add = [&](const std::string& key) {
    const std::uint64_t h = text::fnv1a(key, basis);
    const auto bucket = static_cast<nn::Index>(h % static_cast<std::uint64_t>(dim));
    v[bucket] += ((h >> 32) & 1U) ? -1.0 : 1.0;
  };
  for (int n : ngram_orders) {
    for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= toks.size(); ++i) {
      std::string key = toks[i];
      for (int k = 1; k < n; ++k) key += "\x1f" + toks[i + static_cast<std::size_t>(k)];
      add(key);
    }
  }
  const double norm = v.norm();
  if (norm > 0) v /= norm;
  return v;
}

std::string_view to_string(Segment s) {
  switch (s) {
    case Segment::Hidden: return "hidden";
    case Segment::UserText: return "user_text";
    case Segment::Context: return "context";
  }
  return "hidden";
}

nn::Index StateLayout::width_of(Segment s) const {
  switch (s) {
    case Segment::Hidden: return hidden;
    case Segment::UserText: return sentence;
    case Segment::Context: return kContextWidth;
  }
  return 0;
}

EmbeddedState EmbeddedState::assemble(const StateLayout& layout,
                                      const std::vector<std::pair<Segment, VectorXr>>& parts) {
  if (parts.size() != 3) throw LayoutError("state needs exactly three segments");
  EmbeddedState s;
  s.layout_ = layout;
  s.values_.resize(layout.width());
  nn::Index off = 0;
  for (std::size_t k = 0; k < 3; ++k) {
    const auto expected = StateLayout::kOrder[k];
    if (parts[k].first != expected)
      throw LayoutError("segment " + std::to_string(k) + " must be " + std::string(to_string(expected)) + ", got " +
                        std::string(to_string(parts[k].first)));
    if (parts[k].second.size() != layout.width_of(expected))
      throw LayoutError("segment " + std::string(to_string(expected)) + " has width " +
                        std::to_string(parts[k].second.size()) + ", expected " +
                        std::to_string(layout.width_of(expected)));
    s.values_.segment(off, parts[k].second.size()) = parts[k].second;
    off += parts[k].second.size();
  }
  return s;
}

VectorXr context_features(std::size_t turn_index, std::size_t step_index) {
  VectorXr c(kContextWidth);
  c << static_cast<double>(turn_index) / FeatureScales::kTurnIndex,
      static_cast<double>(step_index) / FeatureScales::kStepIndex;
  return c;
}

EmbeddedState build_state(const StateLayout& layout, const VectorXr& hidden, const VectorXr& user_text_embedding,
                          std::size_t turn_index, std::size_t step_index) {
  return EmbeddedState::assemble(layout, {{Segment::Hidden, hidden},
                                          {Segment::UserText, user_text_embedding},
                                          {Segment::Context, context_features(turn_index, step_index)}});
}

EmbeddedState build_state(const SentenceEmbedder& e, const VectorXr& hidden, const std::string& last_user_text,
                          std::size_t turn_index, std::size_t step_index) {
  return build_state(StateLayout{hidden.size(), e.dim}, hidden, e.embed(last_user_text), turn_index, step_index);
}

VectorXr embed_action(const SentenceEmbedder& e, const Candidate& cand, std::size_t turn_index,
                      std::size_t step_index) {
  VectorXr out(e.dim + static_cast<nn::Index>(kCandidateFeatureWidth));
  out << e.embed(cand.text), candidate_features(cand, turn_index, step_index);
  return out;
}

VectorXr utterance_input(const SentenceEmbedder& e, const Utterance& u, std::size_t turn_index,
                         std::size_t step_index) {
  VectorXr out(e.dim + static_cast<nn::Index>(kCandidateFeatureWidth));
  out << e.embed(u.text), utterance_features(u, turn_index, step_index);
  return out;
}

MatrixXr conversation_inputs(const SentenceEmbedder& e, const Conversation& conv) {
  std::size_t n = 0;
  for (const auto& t : conv.turns) n += t.utterances.size();
  MatrixXr x(e.dim + static_cast<nn::Index>(kCandidateFeatureWidth), static_cast<nn::Index>(n));
  nn::Index col = 0;
  for (std::size_t t = 0; t < conv.turns.size(); ++t)
    for (std::size_t s = 0; s < conv.turns[t].utterances.size(); ++s)
      x.col(col++) = utterance_input(e, conv.turns[t].utterances[s], t, s);
  return x;
}

VectorXr encode_history(const nn::GruCell<double>& cell, const SentenceEmbedder& e, const Conversation& conv) {
  const MatrixXr x = conversation_inputs(e, conv);
  const MatrixXr states = nn::gru_sequence(cell, x, VectorXr::Zero(cell.hidden_width).eval());
  return states.col(states.cols() - 1);
}

HistoryCursor::HistoryCursor(const nn::GruCell<double>* cell, const SentenceEmbedder* embedder)
    : cell_(cell), embedder_(embedder), hidden_(VectorXr::Zero(cell->hidden_width)) {}

void HistoryCursor::push(const Utterance& u, std::size_t turn_index, std::size_t step_index) {
  hidden_ = nn::gru_step(*cell_, hidden_, utterance_input(*embedder_, u, turn_index, step_index));
}

ModelManifest ModelManifest::make(const SentenceEmbedder& e, nn::Index gru_hidden) {
  ModelManifest m;
  m.sentence_dim = e.dim;
  m.hash_seed = e.hash_seed;
  m.ngram_orders = e.ngram_orders;
  m.gru_hidden = gru_hidden;
  m.gru_input = e.dim + static_cast<nn::Index>(kCandidateFeatureWidth);
  m.state_width = StateLayout{gru_hidden, e.dim}.width();
  m.action_width = m.gru_input;
  m.feature_layout = "act_onehot[8]|offers_focus_change|tokens/40|turn/20|step/4";
  return m;
}

SentenceEmbedder ModelManifest::embedder() const { return {sentence_dim, hash_seed, ngram_orders}; }

nlohmann::json ModelManifest::to_json() const {
  return {{"sentence_dim", sentence_dim}, {"hash_seed", hash_seed},     {"ngram_orders", ngram_orders},
          {"gru_hidden", gru_hidden},     {"gru_input", gru_input},     {"state_width", state_width},
          {"action_width", action_width}, {"feature_layout", feature_layout}};
}

ModelManifest ModelManifest::from_json(const nlohmann::json& j) {
  ModelManifest m;
  m.sentence_dim = j.at("sentence_dim").get<nn::Index>();
  m.hash_seed = j.at("hash_seed").get<std::uint64_t>();
  m.ngram_orders = j.at("ngram_orders").get<std::vector<int>>();
  m.gru_hidden = j.at("gru_hidden").get<nn::Index>();
  m.gru_input = j.at("gru_input").get<nn::Index>();
  m.state_width = j.at("state_width").get<nn::Index>();
  m.action_width = j.at("action_width").get<nn::Index>();
  m.feature_layout = j.at("feature_layout").get<std::string>();
  return m;
}

std::string ModelManifest::id() const { return text::hash_hex(to_json().dump()); }

void require_compatible(const ModelManifest& expected, const ModelManifest& actual) {
  const auto a = expected.to_json();
  const auto b = actual.to_json();
  for (auto it = a.begin(); it != a.end(); ++it)
    if (!b.contains(it.key()) || b.at(it.key()) != it.value())
      throw ManifestMismatch("manifest mismatch on '" + it.key() + "': expected " + it.value().dump() + ", got " +
                             (b.contains(it.key()) ? b.at(it.key()).dump() : std::string("nothing")));
}

}  // namespace dcrl::encoder
