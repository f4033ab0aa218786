#include "dcrl/serve/serve.hpp"

#include "dcrl/core/conversation_io.hpp"
#include "dcrl/core/random.hpp"
#include "dcrl/core/text.hpp"

#include <httplib.h>

namespace dcrl::serve {

using nlohmann::json;
using nn::Index;
using nn::VectorXr;

SessionManager::SessionManager(const sim::World* world, std::shared_ptr<const rl::Policy> policy, std::uint64_t seed)
    : world_(world), policy_(std::move(policy)), seed_(seed) {}

std::string SessionManager::manifest_id() const { return policy_ ? policy_->manifest().id() : std::string{}; }

std::uint64_t SessionManager::session_seed(const std::string& id) const { return derive_seed(seed_, text::fnv1a(id)); }

json SessionManager::create() {
  if (!policy_) throw ModelNotLoaded("no model loaded");
  std::lock_guard lock(mutex_);
  const std::string id = "s" + std::to_string(next_id_++);
  sessions_.emplace(id, std::make_shared<Session>(world_, policy_.get(), session_seed(id)));
  return {{"session_id", id}, {"manifest_id", manifest_id()}};
}

std::shared_ptr<SessionManager::Session> SessionManager::find(const std::string& id) const {
  std::lock_guard lock(mutex_);
  const auto it = sessions_.find(id);
  if (it == sessions_.end()) throw SessionNotFound("unknown session " + id);
  return it->second;
}

json SessionManager::envelope(const std::string& id) const {
  return {{"session_id", id}, {"manifest_id", manifest_id()}};
}

json SessionManager::message(const std::string& id, const std::string& text, bool debug) {
  if (!policy_) throw ModelNotLoaded("no model loaded");
  const auto s = find(id);
  std::lock_guard lock(s->mutex);
  auto& c = s->composer;
  if (c.ended()) throw SessionEnded("session " + id + " has ended");
  if (text::trim(text).empty()) throw BadRequest("message text is empty");

  const std::size_t before = c.conversation().turns.size();
  c.user_says(text);
  json steps = json::array();
  while (!c.ended() && !c.awaiting_user()) {
    const auto& cands = c.candidates();
    const VectorXr q = cands.empty() ? VectorXr() : s->dm.scores(c, nullptr);
    const auto d = sim::greedy_decision(q, s->dm.threshold(), c.step_index());
    json step = {{"step", c.step_index()}, {"candidates", json::array()}, {"threshold", s->dm.threshold()}};
    for (std::size_t i = 0; i < cands.size(); ++i)
      step["candidates"].push_back({{"text", cands[i].text},
                                    {"act", std::string(to_string(cands[i].act.kind))},
                                    {"provider", cands[i].provider_id},
                                    {"q", q[static_cast<Index>(i)]}});
    step["selected"] = d.kind == sim::Decision::Kind::Decline ? json(nullptr) : json(d.index);
    step["decision"] = d.kind == sim::Decision::Kind::Select        ? "select"
                       : d.kind == sim::Decision::Kind::SelectFinal ? "final"
                                                                    : "end_turn";
    steps.push_back(std::move(step));
    switch (d.kind) {
      case sim::Decision::Kind::Select: c.select(d.index); break;
      case sim::Decision::Kind::SelectFinal: c.select_final(d.index); break;
      case sim::Decision::Kind::Decline: c.decline(); break;
    }
  }

  json out = envelope(id);
  const auto& turns = c.conversation().turns;
  const bool spoke = turns.size() > before + 1 && turns.back().speaker == Speaker::Bot;
  out["response"] = spoke ? json(c.last_response()) : json(nullptr);
  out["utterances"] = json::array();
  if (spoke)
    for (const auto& u : turns.back().utterances) out["utterances"].push_back(u.text);
  out["ended"] = c.ended();
  out["ended_reason"] = c.ended() ? json(std::string(to_string(*c.end_reason()))) : json(nullptr);
  if (debug) out["debug"] = {{"steps", std::move(steps)}};
  return out;
}

json SessionManager::transcript(const std::string& id) const {
  const auto s = find(id);
  std::lock_guard lock(s->mutex);
  json out = envelope(id);
  out["conversation"] = to_json(s->composer.conversation());
  out["ended"] = s->composer.ended();
  out["ended_reason"] =
      s->composer.ended() ? json(std::string(to_string(*s->composer.end_reason()))) : json(nullptr);
  return out;
}

void SessionManager::remove(const std::string& id) {
  std::lock_guard lock(mutex_);
  if (sessions_.erase(id) == 0) throw SessionNotFound("unknown session " + id);
}

std::size_t SessionManager::size() const {
  std::lock_guard lock(mutex_);
  return sessions_.size();
}

namespace {

void reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

template <typename F>
void guarded(httplib::Response& res, F&& f) {
  try {
    f();
  } catch (const SessionNotFound& e) {
    reply(res, 404, {{"error", "not_found"}, {"message", e.what()}});
  } catch (const SessionEnded& e) {
    reply(res, 409, {{"error", "session_ended"}, {"message", e.what()}});
  } catch (const ModelNotLoaded& e) {
    reply(res, 503, {{"error", "model_not_loaded"}, {"message", e.what()}});
  } catch (const BadRequest& e) {
    reply(res, 400, {{"error", "bad_request"}, {"message", e.what()}});
  } catch (const json::exception& e) {
    reply(res, 400, {{"error", "bad_request"}, {"message", e.what()}});
  } catch (const std::exception& e) {
    reply(res, 500, {{"error", "internal"}, {"message", e.what()}});
  }
}

}  // namespace

void install_routes(httplib::Server& server, SessionManager& sessions) {
  server.Post("/v1/session", [&](const httplib::Request&, httplib::Response& res) {
    guarded(res, [&] { reply(res, 201, sessions.create()); });
  });
  server.Post(R"(/v1/session/([^/]+)/message)", [&](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto body = json::parse(req.body);
      if (!body.is_object() || !body.contains("text") || !body["text"].is_string())
        throw BadRequest("body must be {\"text\": string}");
      const bool debug = req.has_param("debug") && req.get_param_value("debug") != "0";
      reply(res, 200, sessions.message(req.matches[1], body["text"].get<std::string>(), debug));
    });
  });
  server.Get(R"(/v1/session/([^/]+))", [&](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { reply(res, 200, sessions.transcript(req.matches[1])); });
  });
  server.Delete(R"(/v1/session/([^/]+))", [&](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      sessions.remove(req.matches[1]);
      reply(res, 200, {{"session_id", std::string(req.matches[1])}, {"deleted", true}});
    });
  });
  server.Get("/v1/health", [&](const httplib::Request&, httplib::Response& res) {
    reply(res, sessions.ready() ? 200 : 503, {{"ready", sessions.ready()}, {"manifest_id", sessions.manifest_id()}});
  });
}

void run_server(SessionManager& sessions, const std::string& host, int port) {
  httplib::Server server;
  install_routes(server, sessions);
  if (!server.listen(host, port)) throw std::runtime_error("cannot listen on " + host + ":" + std::to_string(port));
}

}  // namespace dcrl::serve
