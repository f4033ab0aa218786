#include "dcrl/cli/commands.hpp"

#include "dcrl/cli/config.hpp"
#include "dcrl/core/conversation_io.hpp"
#include "dcrl/core/text.hpp"
#include "dcrl/ope/ope.hpp"
#include "dcrl/rl/corpus.hpp"
#include "dcrl/rl/policy.hpp"
#include "dcrl/rl/train.hpp"
#include "dcrl/serve/serve.hpp"
#include "dcrl/sim/metrics.hpp"
#include "dcrl/sim/sim.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>

namespace dcrl::cli {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path default_data_dir() {
  if (const char* d = std::getenv("DCRL_DATA_DIR"); d && *d) return d;
  return fs::path(DCRL_SOURCE_DIR) / "data";
}

json DatasetManifest::to_json() const {
  return {{"format", "dcrl-dataset"},
          {"version", 1},
          {"config_hash", config_hash},
          {"config", config},
          {"encoder", encoder.to_json()},
          {"encoder_id", encoder.id()},
          {"conversations", conversations},
          {"steps", steps},
          {"files", {{"conversations", "conversations.jsonl"}, {"steps", "steps.jsonl"}}}};
}

DatasetManifest DatasetManifest::from_json(const json& j) {
  if (j.value("format", "") != "dcrl-dataset") throw ConfigError("not a dataset manifest");
  DatasetManifest m;
  m.config_hash = j.at("config_hash").get<std::string>();
  m.config = j.at("config");
  m.encoder = encoder::ModelManifest::from_json(j.at("encoder"));
  m.conversations = j.at("conversations").get<std::size_t>();
  m.steps = j.at("steps").get<std::size_t>();
  return m;
}

DatasetManifest DatasetManifest::load(const fs::path& dir) {
  const auto path = dir / "manifest.json";
  std::ifstream in(path);
  if (!in) throw MissingFile("missing dataset manifest " + path.string());
  return from_json(json::parse(in));
}

namespace {

void require_file(const fs::path& p) {
  if (!fs::exists(p)) throw MissingFile("missing file " + p.string());
}

void write_json(const fs::path& path, const json& j) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

/// Sidecar manifest for every artifact a command writes.
void write_run_manifest(const fs::path& artifact, const std::string& command, const ExperimentConfig& cfg,
                        const json& extra = json::object()) {
  json j = {{"format", "dcrl-artifact"},
            {"version", 1},
            {"command", command},
            {"artifact", artifact.filename().string()},
            {"config_hash", cfg.hash()},
            {"config", cfg.resolved().to_json()}};
  j.update(extra);
  write_json(fs::path(artifact.string() + ".manifest.json"), j);
}

rl::Policy load_policy(const fs::path& path) {
  require_file(path);
  return rl::Policy::load(path);
}

struct LoadedDataset {
  DatasetManifest manifest;
  std::vector<Conversation> conversations;
  std::vector<rl::StepRecord> steps;
};

LoadedDataset load_dataset(const fs::path& dir) {
  LoadedDataset d;
  d.manifest = DatasetManifest::load(dir);
  require_file(dir / "conversations.jsonl");
  require_file(dir / "steps.jsonl");
  d.conversations = read_conversations(dir / "conversations.jsonl");
  d.steps = rl::read_steps(dir / "steps.jsonl");
  return d;
}

/// The model must embed text exactly as the dataset's encoder did.
void require_same_embedding(const DatasetManifest& data, const rl::Policy& model) {
  encoder::require_compatible(encoder::ModelManifest::make(data.encoder.embedder(), model.cell.hidden_width),
                              model.manifest());
}

sim::World load_world(const fs::path& data_dir) {
  for (const char* f : {"kb.jsonl", "lexicons"}) require_file(data_dir / f);
  return sim::World::load(data_dir);
}

struct Overrides {
  std::string config_path;
  std::vector<std::string> sets;
  std::map<std::string, std::string> flags;  // key -> raw value

  ExperimentConfig resolve() const {
    ExperimentConfig c;
    if (!config_path.empty()) {
      require_file(config_path);
      c = ExperimentConfig::load(config_path);
    }
    json j = json::object();
    auto parse_value = [](const std::string& raw) {
      try {
        return json::parse(raw);
      } catch (const json::parse_error&) {
        return json(raw);
      }
    };
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw ConfigError("--set expects key=value, got " + s);
      j[s.substr(0, eq)] = parse_value(s.substr(eq + 1));
    }
    for (const auto& [k, v] : flags) j[k] = parse_value(v);
    if (j.contains("kind") && j["kind"].is_number()) j["kind"] = j["kind"].dump();
    return c.merged(j);
  }
};

void add_config_options(CLI::App* cmd, Overrides& o, const std::vector<std::string>& shortcuts) {
  cmd->add_option("--config", o.config_path, "JSON experiment config");
  cmd->add_option("--set", o.sets, "config override key=value (repeatable)");
  for (const auto& key : shortcuts) {
    std::string flag = "--" + key;
    for (auto& ch : flag)
      if (ch == '_') ch = '-';
    cmd->add_option_function<std::string>(flag, [&o, key](const std::string& v) { o.flags[key] = v; },
                                          "override config " + key);
  }
}

// ---- commands ----

int cmd_kb_lint(const fs::path& kb_path, std::ostream& out, std::ostream& err) {
  require_file(kb_path);
  const auto kb = providers::KnowledgeBase::load(kb_path);
  const auto problems = kb.lint();
  for (const auto& p : problems) err << p << '\n';
  out << kb_path.string() << ": " << kb.entries().size() << " entities, " << problems.size() << " problems\n";
  return problems.empty() ? kOk : kConfig;
}

int cmd_gen_data(const ExperimentConfig& cfg, const fs::path& data_dir, const fs::path& out_dir, std::ostream& out) {
  const auto world = load_world(data_dir);
  const encoder::SentenceEmbedder embedder;
  sim::UniformDm uniform;
  const auto boot = sim::generate_dataset(uniform, world, cfg.bootstrap_conversations, derive_seed(cfg.seed, 1), 1.0);
  auto sc = cfg.merged({{"kind", "supervised"}, {"learning_rate", nullptr}}).supervised();
  sc.steps = cfg.bootstrap_steps;
  rl::TrainingCurve curve;
  auto behavior = rl::train_supervised(rl::Corpus::build(boot.conversations, boot.steps, embedder), sc, &curve);
  behavior.meta["config_hash"] = cfg.hash();
  sim::PolicyDm dm(&behavior);
  const auto data = sim::generate_dataset(dm, world, cfg.conversations, derive_seed(cfg.seed, 2), cfg.behavior_epsilon);

  fs::create_directories(out_dir);
  write_conversations(out_dir / "conversations.jsonl", data.conversations);
  rl::write_steps(out_dir / "steps.jsonl", data.steps);
  behavior.save(out_dir / "behavior.ckpt");
  std::ofstream(out_dir / "behavior_curve.csv") << [&] {
    std::ostringstream s;
    curve.write_csv(s);
    return s.str();
  }();
  DatasetManifest m{cfg.hash(), cfg.resolved().to_json(), behavior.manifest(), data.conversations.size(),
                    data.steps.size()};
  write_json(out_dir / "manifest.json", m.to_json());
  out << "wrote " << data.conversations.size() << " conversations (" << data.steps.size() << " steps) to "
      << out_dir.string() << ", config " << m.config_hash << '\n';
  return kOk;
}

int cmd_train(const ExperimentConfig& cfg, const fs::path& data_dir, fs::path out_path, fs::path curve_path,
              fs::path encoder_path, std::ostream& out) {
  const auto data = load_dataset(data_dir);
  const auto kind = cfg.policy_kind();
  if (out_path.empty()) out_path = data_dir / (std::string(to_string(kind)) + ".ckpt");
  if (curve_path.empty()) curve_path = fs::path(out_path.string() + ".curve.csv");
  const auto embedder = data.manifest.encoder.embedder();
  const auto corpus = rl::Corpus::build(data.conversations, data.steps, embedder);
  rl::TrainingCurve curve;
  rl::Policy policy;
  json inputs = {{"dataset", data_dir.string()}, {"dataset_config_hash", data.manifest.config_hash}};

  if (kind == PolicyKind::Supervised) {
    policy = rl::train_supervised(corpus, cfg.supervised(), &curve);
  } else {
    if (encoder_path.empty()) encoder_path = data_dir / "supervised.ckpt";
    if (!fs::exists(encoder_path))
      throw MissingFile("missing encoder checkpoint " + encoder_path.string() +
                        " (train --kind supervised first, or pass --encoder)");
    const auto enc = rl::Policy::load(encoder_path);
    require_same_embedding(data.manifest, enc);
    inputs["encoder"] = encoder_path.string();
    inputs["encoder_manifest_id"] = enc.manifest().id();
    policy = enc;
    if (kind == PolicyKind::E2eReg) {
      Rng rng(derive_seed(cfg.seed, 7));
      const auto q = cfg.q_training();
      rl::E2eModel init{enc.cell, rl::make_head(enc.head.input_width(), q.head, rng)};
      const auto m = rl::train_e2e(corpus, std::move(init), cfg.e2e(), &curve);
      policy.cell = m.cell;
      policy.head = m.head;
    } else {
      const auto ds = rl::embed_corpus(corpus, enc.cell);
      policy.head = rl::train_q(ds, cfg.q_training(), &curve).online;
    }
  }
  policy.kind = kind;
  policy.threshold = MdpConfig::defaults_for(kind).dm_score_threshold;
  policy.meta = {{"config_hash", cfg.hash()}, {"config", cfg.resolved().to_json()}, {"inputs", inputs}};
  if (out_path.has_parent_path()) fs::create_directories(out_path.parent_path());
  policy.save(out_path);
  std::ostringstream csv;
  curve.write_csv(csv);
  write_text(curve_path, csv.str());
  write_run_manifest(out_path, "train", cfg,
                     {{"inputs", inputs}, {"manifest_id", policy.manifest().id()}, {"curve", curve_path.string()}});
  out << "trained " << to_string(kind) << " -> " << out_path.string() << " (manifest " << policy.manifest().id()
      << ", config " << cfg.hash() << ")\n";
  return kOk;
}

std::string model_type(PolicyKind k) {
  switch (k) {
    case PolicyKind::Supervised: return "Supervised";
    case PolicyKind::Saql:
    case PolicyKind::SaqlReg: return "SAQL";
    case PolicyKind::Caql:
    case PolicyKind::CaqlReg: return "CAQL";
    case PolicyKind::E2eReg: return "E2E";
  }
  return "";
}

double policy_gamma(const rl::Policy& p, const ExperimentConfig& cfg) {
  if (p.meta.contains("config") && p.meta["config"].contains("gamma") && p.meta["config"]["gamma"].is_number())
    return p.meta["config"]["gamma"].get<double>();
  return *cfg.merged({{"kind", std::string(to_string(p.kind))}}).resolved().gamma;
}

void emit_table(const std::vector<ope::EvalRow>& rows, const fs::path& json_path, std::ostream& out,
                const ExperimentConfig& cfg, const std::string& command) {
  out << ope::eval_table_text(rows);
  if (!json_path.empty()) {
    write_json(json_path, {{"config_hash", cfg.hash()}, {"rows", ope::eval_table_json(rows)}});
    write_run_manifest(json_path, command, cfg);
  }
}

int cmd_eval_ope(const ExperimentConfig& cfg, const fs::path& data_dir, const std::vector<std::string>& models,
                 const fs::path& json_path, std::ostream& out) {
  const auto data = load_dataset(data_dir);
  const auto corpus = rl::Corpus::build(data.conversations, data.steps, data.manifest.encoder.embedder());
  std::vector<ope::EvalRow> rows;
  for (const auto& path : models) {
    const auto p = load_policy(path);
    require_same_embedding(data.manifest, p);
    const double gamma = policy_gamma(p, cfg);
    const auto dice = ope::dice_dataset(corpus, rl::embed_corpus(corpus, p.cell), p.head);
    const auto nu = ope::dualdice_train(dice, gamma, cfg.dualdice());
    const double est = ope::dualdice_estimate(nu, dice, gamma);
    const double sd = ope::dualdice_bootstrap_std(nu, dice, gamma, derive_seed(cfg.seed, 5));
    rows.push_back({model_type(p.kind), std::string(to_string(p.kind)), std::nullopt, ope::MeanStd{est, sd}});
  }
  emit_table(rows, json_path, out, cfg, "eval-ope");
  return kOk;
}

int cmd_eval_onpolicy(const ExperimentConfig& cfg, const fs::path& data_dir, const std::vector<std::string>& models,
                      const fs::path& dataset_dir, const fs::path& json_path, std::ostream& out) {
  const auto world = load_world(data_dir);
  std::optional<DatasetManifest> dm;
  if (!dataset_dir.empty()) dm = DatasetManifest::load(dataset_dir);
  std::vector<ope::EvalRow> rows;
  for (const auto& path : models) {
    const auto p = load_policy(path);
    if (dm) require_same_embedding(*dm, p);
    sim::PolicyDm agent(&p);
    const auto r = ope::onpolicy_eval(agent, world, cfg.eval_conversations, cfg.seed);
    rows.push_back({model_type(p.kind), std::string(to_string(p.kind)), r.summary, std::nullopt});
  }
  emit_table(rows, json_path, out, cfg, "eval-onpolicy");
  return kOk;
}

int cmd_ab_sim(const ExperimentConfig& cfg, const fs::path& data_dir, const std::vector<std::string>& arm_specs,
               std::string control, const fs::path& text_path, const fs::path& json_path, std::ostream& out) {
  if (arm_specs.empty()) throw ConfigError("ab-sim needs at least one --arm");
  const auto world = load_world(data_dir);
  std::vector<std::unique_ptr<rl::Policy>> policies;
  std::vector<std::unique_ptr<sim::DialogueManager>> dms;
  std::vector<sim::Arm> arms;
  for (const auto& spec : arm_specs) {
    const auto eq = spec.find('=');
    const std::string name = eq == std::string::npos ? spec : spec.substr(0, eq);
    const std::string source = eq == std::string::npos ? spec : spec.substr(eq + 1);
    if (source == "myopic") {
      dms.push_back(std::make_unique<sim::MyopicOracleDm>());
    } else if (source == "planner") {
      dms.push_back(std::make_unique<sim::PlannerDm>());
    } else {
      policies.push_back(std::make_unique<rl::Policy>(load_policy(source)));
      dms.push_back(std::make_unique<sim::PolicyDm>(policies.back().get()));
    }
    arms.push_back({name, dms.back().get()});
  }
  // A single arm is compared against itself.
  if (arms.size() == 1) arms.push_back(arms.front());
  if (control.empty()) control = arms.front().name;
  std::size_t ci = arms.size();
  for (std::size_t i = 0; i < arms.size(); ++i)
    if (arms[i].name == control) {
      ci = i;
      break;
    }
  if (ci == arms.size()) throw ConfigError("control arm not found: " + control);
  const auto report = sim::ab_experiment(arms, ci, world, cfg.eval_conversations, cfg.seed);
  const std::string text = report.to_text();
  out << text;
  if (!text_path.empty()) {
    write_text(text_path, text);
    write_run_manifest(text_path, "ab-sim", cfg);
  }
  if (!json_path.empty()) {
    auto j = report.to_json();
    j["config_hash"] = cfg.hash();
    write_json(json_path, j);
    write_run_manifest(json_path, "ab-sim", cfg);
  }
  return kOk;
}

int cmd_dataset_stats(const fs::path& data_dir, bool as_json, std::ostream& out) {
  const auto data = load_dataset(data_dir);
  std::map<int, std::size_t> rewards;
  std::map<std::size_t, std::size_t> set_sizes;
  std::map<std::string, std::size_t> endings;
  std::size_t turns = 0, selected = 0;
  for (const auto& s : data.steps) {
    ++set_sizes[s.candidates.size()];
    if (s.selected) {
      ++selected;
      ++rewards[s.ratings.at(*s.selected)];
    }
  }
  for (const auto& c : data.conversations) {
    turns += c.turns.size();
    ++endings[std::string(to_string(c.ended_reason))];
  }
  const auto corpus = rl::Corpus::build(data.conversations, data.steps, data.manifest.encoder.embedder());
  json j = {{"conversations", data.conversations.size()},
            {"steps", data.steps.size()},
            {"transitions", corpus.rl_labels()},
            {"supervised_labels", corpus.supervised_labels()},
            {"mean_turns", data.conversations.empty() ? 0.0 : double(turns) / double(data.conversations.size())},
            {"config_hash", data.manifest.config_hash}};
  json rh = json::object(), sh = json::object(), eh = json::object();
  for (const auto& [r, n] : rewards) rh[std::to_string(r)] = n;
  for (const auto& [k, n] : set_sizes) sh[std::to_string(k)] = n;
  for (const auto& [k, n] : endings) eh[k] = n;
  j["reward_histogram"] = rh;
  j["candidate_set_sizes"] = sh;
  j["ended_reasons"] = eh;
  if (as_json) {
    out << j.dump(2) << '\n';
    return kOk;
  }
  out << "conversations      " << j["conversations"] << "\nsteps              " << j["steps"]
      << "\ntransitions        " << j["transitions"] << "\nsupervised labels  " << j["supervised_labels"]
      << "\nmean turns         " << std::fixed << std::setprecision(3) << j["mean_turns"].get<double>()
      << "\nreward histogram\n";
  for (const auto& [r, n] : rewards) out << "  " << std::setw(3) << r << "  " << n << '\n';
  out << "candidate set sizes\n";
  for (const auto& [k, n] : set_sizes) out << "  " << std::setw(3) << k << "  " << n << '\n';
  out << "ended reasons\n";
  for (const auto& [k, n] : endings) out << "  " << k << "  " << n << '\n';
  return kOk;
}

int cmd_chat(const fs::path& data_dir, const fs::path& model, std::uint64_t seed, std::istream& in,
             std::ostream& out) {
  const auto world = load_world(data_dir);
  auto policy = std::make_shared<const rl::Policy>(load_policy(model));
  serve::SessionManager sessions(&world, policy, seed);
  const auto id = sessions.create()["session_id"].get<std::string>();
  out << "model " << sessions.manifest_id() << "; type a message, empty line to quit\n";
  std::string line;
  while (out << "> " << std::flush, std::getline(in, line)) {
    if (text::trim(line).empty()) break;
    const auto r = sessions.message(id, line);
    if (!r["response"].is_null()) out << "bot: " << r["response"].get<std::string>() << '\n';
    if (r["ended"].get<bool>()) {
      out << "[conversation ended: " << r["ended_reason"].get<std::string>() << "]\n";
      break;
    }
  }
  return kOk;
}

int cmd_serve(const fs::path& data_dir, const fs::path& model, std::uint64_t seed, const std::string& host, int port,
              std::ostream& out) {
  const auto world = load_world(data_dir);
  std::shared_ptr<const rl::Policy> policy;
  if (!model.empty()) policy = std::make_shared<const rl::Policy>(load_policy(model));
  serve::SessionManager sessions(&world, policy, seed);
  out << "serving " << (policy ? sessions.manifest_id() : std::string("no model")) << " on " << host << ':' << port
      << std::endl;
  serve::run_server(sessions, host, port);
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, std::istream& in) {
  CLI::App app{"Dialogue-manager training, evaluation and serving"};
  app.require_subcommand(1);
  std::string data_dir = default_data_dir().string();
  app.add_option("--data-dir", data_dir, "KB, lexicons and simulator profiles (env DCRL_DATA_DIR)");

  Overrides o;
  std::string kb, dataset, out_path, curve, encoder_path, control, text_path, json_path, host = "127.0.0.1";
  std::vector<std::string> models, arms;
  int port = 8080;
  std::uint64_t seed = 1;
  bool as_json = false;

  auto* lint = app.add_subcommand("kb-lint", "validate the knowledge base");
  lint->add_option("--kb", kb, "KB file (default <data-dir>/kb.jsonl)");

  auto* gen = app.add_subcommand("gen-data", "simulate a logged dataset with a supervised behavior policy");
  gen->add_option("--out", out_path, "dataset directory")->required();
  add_config_options(gen, o, {"seed", "conversations", "bootstrap_conversations", "bootstrap_steps", "behavior_epsilon"});

  auto* train = app.add_subcommand("train", "train a policy of any kind on a dataset");
  train->add_option("--data", dataset, "dataset directory")->required();
  train->add_option("--out", out_path, "checkpoint path (default <data>/<kind>.ckpt)");
  train->add_option("--curve", curve, "training-curve CSV (default <out>.curve.csv)");
  train->add_option("--encoder", encoder_path, "supervised checkpoint whose encoder is reused");
  add_config_options(train, o, {"kind", "seed", "steps", "gamma", "alpha", "learning_rate", "batch_size"});

  auto* ope_cmd = app.add_subcommand("eval-ope", "DualDICE off-policy estimates");
  ope_cmd->add_option("--data", dataset, "dataset directory")->required();
  ope_cmd->add_option("--model", models, "checkpoint (repeatable)")->required();
  ope_cmd->add_option("--json", json_path, "write the table as JSON");
  add_config_options(ope_cmd, o, {"seed", "dice_steps"});

  auto* onp = app.add_subcommand("eval-onpolicy", "simulated conversation-level ratings");
  onp->add_option("--model", models, "checkpoint (repeatable)")->required();
  onp->add_option("--data", dataset, "dataset whose encoder the models must match");
  onp->add_option("--json", json_path, "write the table as JSON");
  add_config_options(onp, o, {"seed", "eval_conversations"});

  auto* ab = app.add_subcommand("ab-sim", "matched-seed simulated A/B experiment");
  ab->add_option("--arm", arms, "name=checkpoint, name=myopic or name=planner (repeatable)")->required();
  ab->add_option("--control", control, "control arm name (default: first)");
  ab->add_option("--text", text_path, "write the text report");
  ab->add_option("--json", json_path, "write the JSON report");
  add_config_options(ab, o, {"seed", "eval_conversations"});

  auto* srv = app.add_subcommand("serve", "HTTP session API");
  srv->add_option("--model", out_path, "checkpoint (without one every session call returns 503)");
  srv->add_option("--host", host, "bind address");
  srv->add_option("--port", port, "port");
  srv->add_option("--seed", seed, "session seed");

  auto* chat = app.add_subcommand("chat", "terminal conversation against a checkpoint");
  chat->add_option("--model", out_path, "checkpoint")->required();
  chat->add_option("--seed", seed, "session seed");

  auto* ds = app.add_subcommand("dataset", "dataset utilities");
  ds->require_subcommand(1);
  auto* stats = ds->add_subcommand("stats", "counts, reward histogram, candidate-set sizes");
  stats->add_option("--data", dataset, "dataset directory")->required();
  stats->add_flag("--json", as_json, "machine-readable output");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kOk;
    }
    err << "usage error: " << e.what() << '\n' << app.help();
    return kUsage;
  }

  try {
    const fs::path data(data_dir);
    if (*lint) return cmd_kb_lint(kb.empty() ? data / "kb.jsonl" : fs::path(kb), out, err);
    if (*gen) return cmd_gen_data(o.resolve(), data, out_path, out);
    if (*train) return cmd_train(o.resolve(), dataset, out_path, curve, encoder_path, out);
    if (*ope_cmd) return cmd_eval_ope(o.resolve(), dataset, models, json_path, out);
    if (*onp) return cmd_eval_onpolicy(o.resolve(), data, models, dataset, json_path, out);
    if (*ab) return cmd_ab_sim(o.resolve(), data, arms, control, text_path, json_path, out);
    if (*srv) return cmd_serve(data, out_path, seed, host, port, out);
    if (*chat) return cmd_chat(data, out_path, seed, in, out);
    if (*stats) return cmd_dataset_stats(dataset, as_json, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const MissingFile& e) {
    err << "missing file: " << e.what() << '\n';
    return kMissingFile;
  } catch (const encoder::ManifestMismatch& e) {
    err << "manifest mismatch: " << e.what() << '\n';
    return kManifestMismatch;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntime;
  }
  err << "no command\n";
  return kUsage;
}

}  // namespace dcrl::cli
