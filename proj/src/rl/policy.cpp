#include "dcrl/rl/policy.hpp"

#include "dcrl/nn/checkpoint.hpp"

namespace dcrl::rl {

namespace {

nlohmann::json head_shape(const Net& head) {
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& l : head.layers()) layers.push_back({{"width", l.weight.rows()}, {"activation", nn::to_string(l.activation)}});
  return {{"input", head.input_width()}, {"layers", layers}};
}

Net head_from_shape(const nlohmann::json& j) {
  std::vector<Index> widths;
  std::vector<nn::Activation> acts;
  for (const auto& l : j.at("layers")) {
    widths.push_back(l.at("width").get<Index>());
    acts.push_back(nn::activation_from_string(l.at("activation").get<std::string>()));
  }
  return Net(j.at("input").get<Index>(), widths, acts);
}

}  // namespace

void Policy::save(const std::filesystem::path& path) const {
  nn::Checkpoint ck;
  ck.meta() = meta;
  ck.meta()["kind"] = std::string(to_string(kind));
  ck.meta()["threshold"] = threshold;
  ck.meta()["manifest"] = manifest().to_json();
  ck.meta()["manifest_id"] = manifest().id();
  ck.meta()["head"] = head_shape(head);
  auto c = cell;
  auto h = head;
  ck.add("gru", c);
  ck.add("head", h);
  ck.save(path);
}

Policy Policy::load(const std::filesystem::path& path) {
  const auto ck = nn::Checkpoint::load(path);
  Policy p;
  p.meta = ck.meta();
  p.kind = policy_kind_from_string(p.meta.at("kind").get<std::string>());
  p.threshold = p.meta.at("threshold").get<double>();
  const auto manifest = encoder::ModelManifest::from_json(p.meta.at("manifest"));
  p.embedder = manifest.embedder();
  p.cell = nn::GruCell<double>(manifest.gru_input, manifest.gru_hidden);
  p.head = head_from_shape(p.meta.at("head"));
  ck.restore("gru", p.cell);
  ck.restore("head", p.head);
  encoder::require_compatible(manifest, p.manifest());
  return p;
}

Selection select_action(const VectorXr& scores) {
  const auto i = argmax_stable(scores);
  return {i, scores[static_cast<Index>(i)]};
}

Selection select_action(const Policy& policy, const encoder::EmbeddedState& state, const MatrixXr& actions) {
  return select_action(policy.score(state.values(), actions));
}

}  // namespace dcrl::rl
