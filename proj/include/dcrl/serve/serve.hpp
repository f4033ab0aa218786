#pragma once

#include "dcrl/rl/policy.hpp"
#include "dcrl/sim/sim.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>

namespace httplib {
class Server;
}

namespace dcrl::serve {

class SessionNotFound : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class SessionEnded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class BadRequest : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};
class ModelNotLoaded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Live conversations against one frozen policy. The policy and world are shared
/// read-only; each session has its own composer, encoder cursor and lock.
class SessionManager {
 public:
  SessionManager(const sim::World* world, std::shared_ptr<const rl::Policy> policy, std::uint64_t seed = 1);

  bool ready() const { return policy_ != nullptr; }
  std::string manifest_id() const;

  /// {"session_id", "manifest_id"}
  nlohmann::json create();
  /// Runs the user turn and the full bot turn. The reply always carries the per-step
  /// debug trace; `debug` only controls whether it is included.
  nlohmann::json message(const std::string& id, const std::string& text, bool debug = false);
  nlohmann::json transcript(const std::string& id) const;
  void remove(const std::string& id);
  std::size_t size() const;

  /// Per-session seed, a pure function of the manager seed and the id.
  std::uint64_t session_seed(const std::string& id) const;

 private:
  struct Session {
    explicit Session(const sim::World* world, const rl::Policy* policy, std::uint64_t seed)
        : composer(world, seed), dm(policy) {}
    std::mutex mutex;
    sim::Composer composer;
    sim::PolicyDm dm;
  };

  std::shared_ptr<Session> find(const std::string& id) const;
  nlohmann::json envelope(const std::string& id) const;

  const sim::World* world_;
  std::shared_ptr<const rl::Policy> policy_;
  std::uint64_t seed_;
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::uint64_t next_id_ = 1;
};

/// Registers the /v1 routes on `server`.
void install_routes(httplib::Server& server, SessionManager& sessions);

/// Blocks serving on host:port until the server is stopped.
void run_server(SessionManager& sessions, const std::string& host, int port);

}  // namespace dcrl::serve
