#include "dcrl/ope/ope.hpp"

#include "dcrl/nn/adam.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

namespace dcrl::ope {

namespace {

VectorXr one_hot_argmax(const VectorXr& q) {
  VectorXr pi = VectorXr::Zero(q.size());
  pi[static_cast<Index>(rl::argmax_stable(q))] = 1;
  return pi;
}

std::vector<std::size_t> all(std::size_t n) {
  std::vector<std::size_t> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = i;
  return ids;
}

}  // namespace

double dualdice_objective(const NuNetwork& nu, const DiceDataset& data, const std::vector<std::size_t>& samples,
                          const std::vector<std::size_t>& initial, double gamma, Net* grad) {
  if (samples.empty()) return 0;
  const Index width = data.samples.at(samples.front()).sa.size();
  Index total = 0;
  for (auto i : samples) total += 1 + (data.samples[i].terminal ? 0 : data.samples[i].next_sa.cols());
  for (auto k : initial) total += data.initial.at(k).sa.cols();
  MatrixXr x(width, total);
  Index col = 0;
  for (auto i : samples) {
    const auto& s = data.samples[i];
    x.col(col++) = s.sa;
    if (!s.terminal) {
      if (s.next_sa.cols() == 0) throw rl::MissingCandidates("DualDICE sample without next candidates");
      x.middleCols(col, s.next_sa.cols()) = s.next_sa;
      col += s.next_sa.cols();
    }
  }
  for (auto k : initial) {
    x.middleCols(col, data.initial[k].sa.cols()) = data.initial[k].sa;
    col += data.initial[k].sa.cols();
  }

  nn::DenseTape<double> tape;
  const MatrixXr v = nn::dense_forward(nu.net, x, grad ? &tape : nullptr);
  MatrixXr d_out(1, total);
  const double nb = static_cast<double>(samples.size());
  const double ni = static_cast<double>(initial.size());
  double loss = 0;
  col = 0;
  for (auto i : samples) {
    const auto& s = data.samples[i];
    const Index self = col++;
    double next = 0;
    const Index n = s.terminal ? 0 : s.next_sa.cols();
    if (n > 0) next = s.next_pi.dot(v.row(0).segment(col, n).transpose());
    const double delta = v(0, self) - gamma * next;
    loss += 0.5 * delta * delta / nb;
    d_out(0, self) = delta / nb;
    if (n > 0) d_out.block(0, col, 1, n) = (-gamma * delta / nb) * s.next_pi.transpose();
    col += n;
  }
  for (auto k : initial) {
    const auto& s = data.initial[k];
    const Index n = s.sa.cols();
    loss -= (1 - gamma) * s.pi.dot(v.row(0).segment(col, n).transpose()) / ni;
    d_out.block(0, col, 1, n) = (-(1 - gamma) / ni) * s.pi.transpose();
    col += n;
  }
  if (grad) nn::dense_backward(nu.net, tape, d_out, *grad);
  return loss;
}

NuNetwork dualdice_train(const DiceDataset& data, double gamma, const DualDiceConfig& cfg) {
  if (data.samples.empty()) throw std::invalid_argument("DualDICE needs at least one sample");
  Rng rng(cfg.seed);
  std::vector<Index> widths = cfg.hidden;
  std::vector<nn::Activation> acts(widths.size(), nn::Activation::ReLU);
  widths.push_back(1);
  acts.push_back(nn::Activation::Identity);
  return dualdice_train(data, gamma, cfg,
                        NuNetwork{Net::random(data.samples.front().sa.size(), widths, acts, rng)});
}

NuNetwork dualdice_train(const DiceDataset& data, double gamma, const DualDiceConfig& cfg, NuNetwork nu) {
  Rng rng(derive_seed(cfg.seed, 1));
  nn::AdamState<double> adam(nu.net, {cfg.learning_rate});
  const bool full = cfg.batch_size == 0;
  const auto every_sample = all(data.samples.size());
  const auto every_initial = all(data.initial.size());
  for (std::size_t step = 1; step <= cfg.steps; ++step) {
    std::vector<std::size_t> s = every_sample, b = every_initial;
    if (!full) {
      s.assign(cfg.batch_size, 0);
      for (auto& i : s) i = uniform_index(rng, data.samples.size());
      b.assign(data.initial.empty() ? 0 : cfg.batch_size, 0);
      for (auto& i : b) i = uniform_index(rng, data.initial.size());
    }
    Net grad = nu.net.zeros_like();
    const double loss = dualdice_objective(nu, data, s, b, gamma, &grad);
    if (!std::isfinite(loss) || !nn::all_finite<double>(grad))
      throw Divergence("DualDICE diverged at step " + std::to_string(step) + " (loss " + std::to_string(loss) +
                       "); lower the learning rate");
    nn::adam_step(adam, nu.net, grad);
  }
  return nu;
}

VectorXr dualdice_ratios(const NuNetwork& nu, const DiceDataset& data, double gamma) {
  VectorXr w(static_cast<Index>(data.samples.size()));
  for (std::size_t i = 0; i < data.samples.size(); ++i) {
    const auto& s = data.samples[i];
    double next = 0;
    if (!s.terminal) {
      if (s.next_sa.cols() == 0) throw rl::MissingCandidates("DualDICE sample without next candidates");
      next = s.next_pi.dot(nn::dense_forward(nu.net, s.next_sa).row(0).transpose());
    }
    w[static_cast<Index>(i)] = nu.value(s.sa) - gamma * next;
  }
  return w;
}

double dualdice_estimate(const NuNetwork& nu, const DiceDataset& data, double gamma) {
  if (data.samples.empty()) return 0;
  const VectorXr w = dualdice_ratios(nu, data, gamma);
  double s = 0;
  for (std::size_t i = 0; i < data.samples.size(); ++i) s += w[static_cast<Index>(i)] * data.samples[i].reward;
  return s / static_cast<double>(data.samples.size());
}

double dualdice_bootstrap_std(const NuNetwork& nu, const DiceDataset& data, double gamma, std::uint64_t seed,
                              std::size_t resamples) {
  const std::size_t n = data.samples.size();
  if (n == 0) return 0;
  const VectorXr w = dualdice_ratios(nu, data, gamma);
  std::vector<double> wr(n);
  for (std::size_t i = 0; i < n; ++i) wr[i] = w[static_cast<Index>(i)] * data.samples[i].reward;
  Rng rng(seed);
  std::vector<double> means;
  for (std::size_t b = 0; b < resamples; ++b) {
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) s += wr[uniform_index(rng, n)];
    means.push_back(s / static_cast<double>(n));
  }
  return mean_std(means).stddev;
}

DiceDataset dice_dataset(const rl::Corpus& corpus, const rl::TransitionDataset& data, const Net& q_head) {
  DiceDataset out;
  const Index d = data.states.rows();
  auto pairs = [&](std::size_t point) {
    const auto& cands = data.candidates[point];
    MatrixXr a(data.actions.rows(), static_cast<Index>(cands.size()));
    for (std::size_t j = 0; j < cands.size(); ++j) a.col(static_cast<Index>(j)) = data.actions.col(cands[j]);
    return rl::pair_inputs(data.states.col(static_cast<Index>(point)), a);
  };
  auto greedy = [&](const MatrixXr& sa) { return one_hot_argmax(nn::dense_forward(q_head, sa).row(0).transpose()); };
  for (const auto& t : data.transitions) {
    DiceSample s;
    s.sa.resize(d + data.actions.rows());
    s.sa << data.states.col(t.point), data.actions.col(data.candidates[t.point].at(t.slot));
    s.reward = t.reward;
    s.terminal = t.next < 0;
    if (!s.terminal) {
      s.next_sa = pairs(static_cast<std::size_t>(t.next));
      s.next_pi = greedy(s.next_sa);
    }
    out.samples.push_back(std::move(s));
  }
  for (const auto& ids : corpus.points_of) {
    if (ids.empty() || data.candidates[ids.front()].empty()) continue;
    DiceInitial init;
    init.sa = pairs(ids.front());
    init.pi = greedy(init.sa);
    out.initial.push_back(std::move(init));
  }
  return out;
}

MeanStd mean_std(const std::vector<double>& xs) {
  if (xs.empty()) return {};
  double m = 0;
  for (double x : xs) m += x;
  m /= static_cast<double>(xs.size());
  double v = 0;
  for (double x : xs) v += (x - m) * (x - m);
  return {m, std::sqrt(v / static_cast<double>(xs.size()))};
}

OnPolicyReport onpolicy_eval(sim::DialogueManager& dm, const sim::World& world, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("on-policy evaluation needs at least one conversation");
  OnPolicyReport r;
  std::vector<double> xs;
  for (std::size_t k = 0; k < n; ++k) {
    const auto profile = sim::sample_profile(world, sim::profile_seed(seed, k), k);
    const auto res = sim::rollout_episode(dm, world, profile, sim::episode_seed(seed, k));
    r.ratings.push_back(res.conversation_rating);
    xs.push_back(res.conversation_rating);
  }
  r.summary = mean_std(xs);
  r.ci = sim::bootstrap_mean_ci(xs, derive_seed(seed, 1003));
  return r;
}

namespace {

std::string cell(const std::optional<MeanStd>& m) {
  if (!m) return "-";
  std::ostringstream s;
  s << std::fixed << std::setprecision(2) << m->mean << " ± " << m->stddev;
  return s.str();
}

}  // namespace

std::string eval_table_text(const std::vector<EvalRow>& rows) {
  std::ostringstream o;
  o << std::left << std::setw(14) << "Model Type" << std::setw(14) << "Model" << std::setw(18) << "On-policy"
    << "Off-policy\n";
  for (const auto& r : rows)
    o << std::setw(14) << r.model_type << std::setw(14) << r.model << std::setw(18) << cell(r.on_policy)
      << cell(r.off_policy) << '\n';
  return o.str();
}

nlohmann::json eval_table_json(const std::vector<EvalRow>& rows) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& r : rows) {
    auto cell_json = [](const std::optional<MeanStd>& m) {
      return m ? nlohmann::json{{"mean", m->mean}, {"stddev", m->stddev}} : nlohmann::json(nullptr);
    };
    j.push_back({{"model_type", r.model_type},
                 {"model", r.model},
                 {"on_policy", cell_json(r.on_policy)},
                 {"off_policy", cell_json(r.off_policy)}});
  }
  return j;
}

}  // namespace dcrl::ope
