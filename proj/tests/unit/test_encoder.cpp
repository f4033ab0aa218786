#include "doctest.h"

#include "dcrl/encoder/encoder.hpp"

using namespace dcrl;
using namespace dcrl::encoder;
using nn::Index;

TEST_CASE("sentence embedding") {
  const SentenceEmbedder e;
  CHECK(e.embed("").isZero());
  const auto a = e.embed("polar bear");
  CHECK(a == e.embed("polar bear"));
  CHECK(a.norm() == doctest::Approx(1.0));
  CHECK(a != e.embed("bear polar"));
  CHECK(a == e.embed("Polar  BEAR"));
  CHECK(a.size() == 64);
}

TEST_CASE("unigram-only embedding is order free") {
  SentenceEmbedder e;
  e.ngram_orders = {1};
  CHECK(e.embed("polar bear") == e.embed("bear polar"));
}

TEST_CASE("state assembly") {
  const StateLayout layout{5, 64};
  const auto s = build_state(layout, VectorXr::Zero(5), VectorXr::Zero(64), 0, 0);
  CHECK(s.values().isZero());
  CHECK(s.values().size() == 71);

  const SentenceEmbedder e;
  VectorXr h(5);
  h << 1, 2, 3, 4, 5;
  const auto x = build_state(e, h, "lions", 4, 2);
  VectorXr expected(71);
  expected << h, e.embed("lions"), 4.0 / 20.0, 2.0 / 4.0;
  CHECK(x.values() == expected);
  CHECK(x.segment(Segment::Hidden) == h);
  CHECK(x.segment(Segment::Context)[1] == 0.5);
}

TEST_CASE("segments out of order are rejected") {
  const StateLayout layout{2, 3};
  CHECK_THROWS_AS(EmbeddedState::assemble(layout, {{Segment::UserText, VectorXr::Zero(3)},
                                                   {Segment::Hidden, VectorXr::Zero(2)},
                                                   {Segment::Context, VectorXr::Zero(2)}}),
                  LayoutError);
  CHECK_THROWS_AS(EmbeddedState::assemble(layout, {{Segment::Hidden, VectorXr::Zero(3)},
                                                   {Segment::UserText, VectorXr::Zero(3)},
                                                   {Segment::Context, VectorXr::Zero(2)}}),
                  LayoutError);
}

TEST_CASE("action embedding is text then candidate features") {
  const SentenceEmbedder e;
  const auto c = Candidate::make("Lions roar.", DialogueAct(ActKind::Sound, std::string("lion")), "sounds");
  const auto a = embed_action(e, c, 1, 0);
  VectorXr expected(64 + static_cast<Index>(kCandidateFeatureWidth));
  expected << e.embed("Lions roar."), candidate_features(c, 1, 0);
  CHECK(a == expected);
}

TEST_CASE("history encoding") {
  const SentenceEmbedder e;
  Rng rng(3);
  const auto cell = nn::GruCell<double>::random(64 + static_cast<Index>(kCandidateFeatureWidth), 6, rng);
  CHECK(encode_history(cell, e, Conversation{}).isZero());

  Conversation c;
  c.turns = {{Speaker::User, {Utterance{"hello lions", std::nullopt, "user", std::nullopt, ""}}, std::nullopt},
             {Speaker::Bot,
              {Utterance{"Lions roar.", DialogueAct(ActKind::Sound, std::string("lion")), "sounds", 6, "s"},
               Utterance{"Want more?", DialogueAct(ActKind::YesNoQuestion, std::string("lion")), "q", 4, "q"}},
              std::string("lion")}};
  // Step-by-step trace against the incremental cursor.
  VectorXr h = VectorXr::Zero(6);
  h = nn::gru_step(cell, h, utterance_input(e, c.turns[0].utterances[0], 0, 0));
  h = nn::gru_step(cell, h, utterance_input(e, c.turns[1].utterances[0], 1, 0));
  h = nn::gru_step(cell, h, utterance_input(e, c.turns[1].utterances[1], 1, 1));
  CHECK((encode_history(cell, e, c) - h).norm() < 1e-12);
  HistoryCursor cursor(&cell, &e);
  cursor.push(c.turns[0].utterances[0], 0, 0);
  cursor.push(c.turns[1].utterances[0], 1, 0);
  cursor.push(c.turns[1].utterances[1], 1, 1);
  CHECK((cursor.hidden() - h).norm() < 1e-12);
  CHECK(conversation_inputs(e, c).cols() == 3);
}

TEST_CASE("manifest compatibility") {
  const auto m = ModelManifest::make(SentenceEmbedder{}, 200);
  CHECK(m.state_width == 266);
  CHECK(m.action_width == 76);
  CHECK(ModelManifest::from_json(m.to_json()).id() == m.id());
  auto other = m;
  other.sentence_dim = 32;
  CHECK_THROWS_AS(require_compatible(m, other), ManifestMismatch);
  CHECK_NOTHROW(require_compatible(m, m));
  CHECK(other.id() != m.id());
}
