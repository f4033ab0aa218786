#include "dcrl/rl/train.hpp"

#include <map>
#include <ostream>

namespace dcrl::rl {

namespace {

template <typename Model>
void scale(Model& m, double k) {
  m.for_each_parameter([&](const std::string&, auto& a) { a *= k; });
}

std::vector<std::size_t> sample_ids(Rng& rng, std::size_t n, std::size_t k) {
  std::vector<std::size_t> ids(k);
  for (auto& i : ids) i = uniform_index(rng, n);
  return ids;
}

MatrixXr gather(const MatrixXr& actions, const std::vector<std::uint32_t>& cols) {
  MatrixXr out(actions.rows(), static_cast<Index>(cols.size()));
  for (std::size_t i = 0; i < cols.size(); ++i) out.col(static_cast<Index>(i)) = actions.col(cols[i]);
  return out;
}

}  // namespace

void TrainingCurve::write_csv(std::ostream& out) const {
  out << "step";
  for (const auto& c : columns) out << ',' << c;
  out << '\n';
  for (const auto& [step, values] : rows) {
    out << step;
    for (double v : values) out << ',' << v;
    out << '\n';
  }
}

Net make_head(Index input_width, const HeadShape& shape, Rng& rng) {
  return Net::mlp(input_width, static_cast<Index>(shape.layers), shape.width, rng);
}

std::pair<double, std::size_t> supervised_loss(const Corpus& corpus, std::size_t c, const nn::GruCell<double>& cell,
                                               const Net& head, nn::GruCell<double>* cell_grad, Net* head_grad) {
  const auto& ids = corpus.points_of.at(c);
  Index total = 0;
  for (auto id : ids) total += static_cast<Index>(corpus.points[id].ratings.size());
  if (total == 0) return {0.0, 0};
  const Index hidden = cell.hidden_width;
  const bool grads = cell_grad && head_grad;

  nn::GruTape<double> gtape;
  const MatrixXr states =
      nn::gru_sequence(cell, corpus.inputs[c], VectorXr::Zero(hidden).eval(), grads ? &gtape : nullptr);
  const Index d = encoder::StateLayout{hidden, corpus.embedder.dim}.width();
  MatrixXr x(d + corpus.actions.rows(), total);
  VectorXr y(total);
  Index col = 0;
  for (auto id : ids) {
    const auto& p = corpus.points[id];
    if (p.ratings.empty()) continue;
    const VectorXr phi = corpus.state(p, states, hidden);
    for (std::size_t k = 0; k < p.ratings.size(); ++k, ++col) {
      x.col(col) << phi, corpus.actions.col(p.actions[k]);
      y[col] = p.ratings[k];
    }
  }
  nn::DenseTape<double> htape;
  const MatrixXr q = nn::dense_forward(head, x, grads ? &htape : nullptr);
  const VectorXr err = q.row(0).transpose() - y;
  if (grads) {
    const MatrixXr dx = nn::dense_backward(head, htape, MatrixXr((2.0 * err).transpose()), *head_grad);
    MatrixXr d_states = MatrixXr::Zero(hidden, states.cols());
    col = 0;
    for (auto id : ids) {
      const auto& p = corpus.points[id];
      const auto n = static_cast<Index>(p.ratings.size());
      if (n == 0) continue;
      d_states.col(p.history) += dx.block(0, col, hidden, n).rowwise().sum();
      col += n;
    }
    nn::gru_backward(cell, gtape, d_states, *cell_grad);
  }
  return {err.squaredNorm(), static_cast<std::size_t>(total)};
}

Policy train_supervised(const Corpus& corpus, const SupervisedConfig& cfg, TrainingCurve* curve) {
  Rng rng(cfg.seed);
  Policy p;
  p.kind = PolicyKind::Supervised;
  p.embedder = corpus.embedder;
  p.threshold = cfg.threshold;
  const Index input = corpus.embedder.dim + static_cast<Index>(kCandidateFeatureWidth);
  p.cell = nn::GruCell<double>::random(input, cfg.hidden, rng);
  p.head = make_head(encoder::StateLayout{cfg.hidden, corpus.embedder.dim}.width() + input, cfg.head, rng);
  nn::AdamState<double> adam_cell(p.cell, {cfg.learning_rate});
  nn::AdamState<double> adam_head(p.head, {cfg.learning_rate});
  if (curve) curve->columns = {"mse"};
  const std::size_t n = corpus.points_of.size();
  double window = 0;
  std::size_t window_labels = 0;
  for (std::size_t step = 1; step <= cfg.steps && n > 0; ++step) {
    auto gc = p.cell.zeros_like();
    auto gh = p.head.zeros_like();
    double loss = 0;
    std::size_t labels = 0;
    for (auto c : sample_ids(rng, n, cfg.conversations_per_step)) {
      const auto [l, k] = supervised_loss(corpus, c, p.cell, p.head, &gc, &gh);
      loss += l;
      labels += k;
    }
    if (labels == 0) continue;
    scale(gc, 1.0 / static_cast<double>(labels));
    scale(gh, 1.0 / static_cast<double>(labels));
    nn::adam_step(adam_cell, p.cell, gc);
    nn::adam_step(adam_head, p.head, gh);
    window += loss;
    window_labels += labels;
    if (curve && (step % cfg.log_every == 0 || step == cfg.steps)) {
      curve->add(step, {window / static_cast<double>(window_labels)});
      window = 0;
      window_labels = 0;
    }
  }
  return p;
}

QTrainConfig QTrainConfig::defaults_for(PolicyKind kind) {
  QTrainConfig c;
  c.kind = kind;
  c.gamma = MdpConfig::defaults_for(kind).gamma;
  c.alpha = kind == PolicyKind::SaqlReg || kind == PolicyKind::CaqlReg ? 0.1 : 0.0;
  if (kind == PolicyKind::E2eReg) c.alpha = 0.01;
  return c;
}

QNetwork train_q(const TransitionDataset& data, const QTrainConfig& cfg, TrainingCurve* curve) {
  Rng rng(cfg.seed);
  QNetwork q(make_head(data.states.rows() + data.actions.rows(), cfg.head, rng), cfg.target_period);
  nn::AdamState<double> adam(q.online, {cfg.learning_rate});
  QUpdateOptions opts;
  opts.gamma = cfg.gamma;
  opts.alpha = cfg.alpha;
  opts.continuous = cfg.kind == PolicyKind::Caql || cfg.kind == PolicyKind::CaqlReg;
  opts.ga = cfg.ga;
  if (opts.continuous) opts.box = data.action_box();
  if (curve) curve->columns = {"bellman", "cql"};
  const std::size_t n = data.transitions.size();
  double bellman = 0, cql = 0;
  std::size_t window = 0;
  for (std::size_t step = 1; step <= cfg.steps && n > 0; ++step) {
    const auto s = q_update(q, adam, data.batch(sample_ids(rng, n, cfg.batch_size)), opts);
    bellman += s.bellman;
    cql += s.cql;
    ++window;
    if (curve && (step % cfg.log_every == 0 || step == cfg.steps)) {
      const double w = static_cast<double>(window * cfg.batch_size);
      curve->add(step, {bellman / w, cql / w});
      bellman = cql = 0;
      window = 0;
    }
  }
  return q;
}

E2eLoss e2e_loss(const E2eModel& model, const E2eModel& target, const Corpus& corpus,
                 const std::vector<std::size_t>& ids, double gamma, double alpha, E2eModel* grad) {
  const Index hidden = model.cell.hidden_width;
  struct Encoded {
    nn::GruTape<double> tape;
    MatrixXr states;
    MatrixXr target_states;
  };
  std::map<std::uint32_t, Encoded> enc;
  for (auto id : ids) {
    const auto conv = corpus.points[corpus.transitions.at(id).point].conversation;
    if (enc.count(conv)) continue;
    auto& e = enc[conv];
    const VectorXr h0 = VectorXr::Zero(hidden);
    e.states = nn::gru_sequence(model.cell, corpus.inputs[conv], h0, grad ? &e.tape : nullptr);
    e.target_states = nn::gru_sequence(target.cell, corpus.inputs[conv], h0);
  }

  Batch batch;
  for (auto id : ids) {
    const auto& ct = corpus.transitions[id];
    const auto& p = corpus.points[ct.point];
    const auto& e = enc.at(p.conversation);
    Transition t;
    t.state = corpus.state(p, e.states, hidden);
    t.action = corpus.actions.col(p.actions[ct.slot]);
    t.reward = ct.reward;
    t.terminal = ct.next < 0;
    t.candidates = gather(corpus.actions, p.actions);
    t.behavior_slot = static_cast<Index>(ct.slot);
    if (!t.terminal) {
      const auto& np = corpus.points[static_cast<std::size_t>(ct.next)];
      t.next_state = corpus.state(np, e.target_states, hidden);
      t.next_candidates = gather(corpus.actions, np.actions);
    }
    batch.push_back(std::move(t));
  }

  const QNetwork frozen(target.head);
  const VectorXr y = saql_targets(frozen, batch, gamma);
  E2eLoss out;
  MatrixXr d_bellman, d_cql;
  out.bellman = bellman_loss(model.head, batch, y, grad ? &grad->head : nullptr, &d_bellman);
  if (alpha != 0) {
    const auto c = cql_term(model.head, batch, alpha, grad ? &grad->head : nullptr, &d_cql);
    out.cql_value = c.value;
    out.cql_surrogate = c.surrogate;
  }
  if (grad) {
    std::map<std::uint32_t, MatrixXr> d_states;
    for (const auto& [conv, e] : enc) d_states[conv] = MatrixXr::Zero(hidden, e.states.cols());
    for (std::size_t i = 0; i < ids.size(); ++i) {
      const auto& p = corpus.points[corpus.transitions[ids[i]].point];
      VectorXr g = d_bellman.col(static_cast<Index>(i)).head(hidden);
      if (alpha != 0) g += d_cql.col(static_cast<Index>(i)).head(hidden);
      d_states[p.conversation].col(p.history) += g;
    }
    for (const auto& [conv, e] : enc) nn::gru_backward(model.cell, e.tape, d_states[conv], grad->cell);
  }
  return out;
}

E2eModel train_e2e(const Corpus& corpus, E2eModel init, const E2eConfig& cfg, TrainingCurve* curve) {
  Rng rng(cfg.seed);
  E2eModel model = std::move(init);
  E2eModel target = model;
  nn::AdamState<double> adam(model, {cfg.learning_rate});
  if (curve) curve->columns = {"bellman", "cql"};
  const std::size_t n = corpus.transitions.size();
  double bellman = 0, cql = 0;
  std::size_t window = 0;
  for (std::size_t step = 1; step <= cfg.steps && n > 0; ++step) {
    auto grad = model.zeros_like();
    const auto l = e2e_loss(model, target, corpus, sample_ids(rng, n, cfg.batch_size), cfg.gamma, cfg.alpha, &grad);
    nn::adam_step(adam, model, grad);
    if (step % cfg.target_period == 0) target = model;
    bellman += l.bellman;
    cql += l.cql_value;
    ++window;
    if (curve && (step % cfg.log_every == 0 || step == cfg.steps)) {
      const double w = static_cast<double>(window * cfg.batch_size);
      curve->add(step, {bellman / w, cql / w});
      bellman = cql = 0;
      window = 0;
    }
  }
  return model;
}

}  // namespace dcrl::rl
