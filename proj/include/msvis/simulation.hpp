#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "msvis/graph.hpp"
#include "msvis/trace.hpp"

namespace msvis {

enum class StartMode { kMock, kTrace };
enum class FailureTarget { kNode, kEdge };
enum class FailureKind { kError, kTimeout };
enum class SimStatus { kEntered, kOk, kFailed, kNotReached };
enum class RunState { kPending, kRunning, kCompleted, kFailed };
enum class SubjectKind { kNode, kEdge };

std::string_view ToString(StartMode mode) noexcept;
std::string_view ToString(FailureKind kind) noexcept;
std::string_view ToString(SimStatus status) noexcept;
std::string_view ToString(RunState state) noexcept;
std::string_view ToString(SubjectKind kind) noexcept;

struct FailureSpec {
  FailureTarget target = FailureTarget::kNode;
  std::string node;  // node target
  std::string from;  // edge target
  std::string to;
  FailureKind kind = FailureKind::kError;

  static FailureSpec Node(std::string id, FailureKind kind = FailureKind::kError);
  static FailureSpec Edge(std::string from, std::string to,
                          FailureKind kind = FailureKind::kError);

  bool operator==(const FailureSpec&) const = default;
};

inline constexpr int kDefaultTickMs = 250;
inline constexpr std::string_view kAutoTrace = "auto";

struct SimulationConfig {
  StartMode start_mode = StartMode::kMock;
  std::optional<ServicePath> path;          // mock mode
  std::optional<std::string> mock_payload;  // mock mode, opaque
  std::optional<std::string> trace_ref;     // trace mode: trace id or "auto"
  std::vector<FailureSpec> failures;
  int tick_ms = kDefaultTickMs;             // pacing for streaming only

  bool operator==(const SimulationConfig&) const = default;
};

struct SimEvent {
  int step = 0;
  SubjectKind subject_kind = SubjectKind::kNode;
  std::string subject;  // node id, or "from>to" for edges
  SimStatus status = SimStatus::kOk;
  std::string detail;

  bool operator==(const SimEvent&) const = default;
};

// A planned path replay. The run is driven by a single writer through Step();
// once finished it is immutable and may be shared with readers.
class SimulationRun {
 public:
  SimulationRun(std::string id, SimulationConfig config, ServicePath resolved,
                std::vector<SimEvent> planned);

  const std::string& id() const { return id_; }
  const SimulationConfig& config() const { return config_; }
  const ServicePath& resolved_path() const { return resolved_; }
  const std::vector<SimEvent>& events() const { return events_; }
  RunState state() const { return state_; }
  bool finished() const {
    return state_ == RunState::kCompleted || state_ == RunState::kFailed;
  }

  // Emits the next planned event; nullopt once the run is finished.
  std::optional<SimEvent> Step();

 private:
  std::string id_;
  SimulationConfig config_;
  ServicePath resolved_;
  std::vector<SimEvent> planned_;
  std::vector<SimEvent> events_;
  RunState state_ = RunState::kPending;
  bool failed_seen_ = false;
};

// Resolves the path, validates failures against the service-level graph and
// precomputes the first failure point. Side-effect free on its inputs.
SimulationRun Plan(const SimulationConfig& config, const DependencyGraph& graph,
                   const TraceSet& traces, std::string run_id = "sim-1");

SimulationRun RunToCompletion(SimulationRun run);

nlohmann::json SimEventToJson(const SimEvent& event);

// Parses the HTTP body form of a config. Throws InvalidConfig.
SimulationConfig SimulationConfigFromJson(const nlohmann::json& body);

}  // namespace msvis
