#pragma once

#include <atomic>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "msvis/api.hpp"
#include "msvis/simulation.hpp"

namespace httplib {
class Server;
}

namespace msvis {

inline constexpr int kDefaultPort = 7400;

// In-memory registry of systems. Readers take a shared_ptr to an immutable
// snapshot; writers to one system are serialized and publish a new snapshot
// only after the whole mutation succeeded.
class Registry {
 public:
  // Throws DuplicateSystem when the slug is taken.
  std::string AddSystem(ServiceManifest manifest);
  // Throws UnknownSystem.
  std::shared_ptr<const api::SystemSnapshot> Get(const std::string& system_id) const;
  std::vector<std::shared_ptr<const api::SystemSnapshot>> List() const;

  IngestReport IngestTraces(const std::string& system_id, std::string_view jsonl);

  // Plans and completes a run against the current snapshot; returns its id.
  std::string CreateSimulation(const std::string& system_id,
                               const SimulationConfig& config);
  std::shared_ptr<const SimulationRun> GetSimulation(const std::string& system_id,
                                                     const std::string& sim_id) const;

  nlohmann::json SaveSnapshot() const;
  void LoadSnapshot(const nlohmann::json& doc);

 private:
  struct Entry {
    mutable std::mutex write_mu;  // serializes mutations of this system
    mutable std::mutex ptr_mu;    // guards the pointers below
    std::shared_ptr<const api::SystemSnapshot> snapshot;
    std::map<std::string, std::shared_ptr<const SimulationRun>> simulations;
    int next_sim = 1;
  };

  std::shared_ptr<Entry> Find(const std::string& system_id) const;

  mutable std::shared_mutex mu_;
  std::map<std::string, std::shared_ptr<Entry>> systems_;
};

struct ServerOptions {
  std::string host = "127.0.0.1";
  int port = kDefaultPort;  // 0 binds any free port
  std::optional<std::string> ui_origin;
  std::optional<std::string> snapshot_path;
};

class Server {
 public:
  explicit Server(ServerOptions options);
  ~Server();

  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  Registry& registry() { return registry_; }

  // Loads the snapshot file when configured and present.
  void Restore();
  // Writes the snapshot file when configured.
  void Persist() const;

  // Returns false when the port cannot be bound.
  bool Bind();
  int port() const { return port_; }
  // Blocks until Stop().
  bool Run();
  void Stop();

 private:
  void Routes();

  ServerOptions options_;
  Registry registry_;
  std::unique_ptr<httplib::Server> http_;
  std::atomic<bool> stopping_{false};
  int port_ = 0;
};

}  // namespace msvis
