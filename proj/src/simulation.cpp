#include "msvis/simulation.hpp"

#include <utility>

#include "msvis/error.hpp"
#include "msvis/metrics.hpp"

namespace msvis {

using nlohmann::json;

std::string_view ToString(StartMode mode) noexcept {
  return mode == StartMode::kMock ? "mock" : "trace";
}

std::string_view ToString(FailureKind kind) noexcept {
  return kind == FailureKind::kError ? "error" : "timeout";
}

std::string_view ToString(SimStatus status) noexcept {
  switch (status) {
    case SimStatus::kEntered: return "entered";
    case SimStatus::kOk: return "ok";
    case SimStatus::kFailed: return "failed";
    case SimStatus::kNotReached: return "not_reached";
  }
  return "ok";
}

std::string_view ToString(RunState state) noexcept {
  switch (state) {
    case RunState::kPending: return "pending";
    case RunState::kRunning: return "running";
    case RunState::kCompleted: return "completed";
    case RunState::kFailed: return "failed";
  }
  return "pending";
}

std::string_view ToString(SubjectKind kind) noexcept {
  return kind == SubjectKind::kNode ? "node" : "edge";
}

FailureSpec FailureSpec::Node(std::string id, FailureKind kind) {
  FailureSpec f;
  f.target = FailureTarget::kNode;
  f.node = std::move(id);
  f.kind = kind;
  return f;
}

FailureSpec FailureSpec::Edge(std::string from, std::string to, FailureKind kind) {
  FailureSpec f;
  f.target = FailureTarget::kEdge;
  f.from = std::move(from);
  f.to = std::move(to);
  f.kind = kind;
  return f;
}

SimulationRun::SimulationRun(std::string id, SimulationConfig config,
                             ServicePath resolved, std::vector<SimEvent> planned)
    : id_(std::move(id)),
      config_(std::move(config)),
      resolved_(std::move(resolved)),
      planned_(std::move(planned)) {}

std::optional<SimEvent> SimulationRun::Step() {
  if (finished()) return std::nullopt;
  if (events_.size() == planned_.size()) {
    state_ = RunState::kCompleted;
    return std::nullopt;
  }
  state_ = RunState::kRunning;
  const SimEvent& next = events_.emplace_back(planned_[events_.size()]);
  if (next.status == SimStatus::kFailed) failed_seen_ = true;
  if (events_.size() == planned_.size()) {
    state_ = failed_seen_ ? RunState::kFailed : RunState::kCompleted;
  }
  return next;
}

namespace {

[[noreturn]] void Invalid(const std::string& what) {
  throw Error(ErrorCode::kInvalidConfig, {}, what);
}

void RequirePathInGraph(const DependencyGraph& graph, const ServicePath& path) {
  if (path.hops.empty()) Invalid("path has no hops");
  for (std::size_t i = 0; i < path.hops.size(); ++i) {
    const std::string& cur = path.hops[i].service;
    if (!graph.FindNode(cur)) {
      throw Error(ErrorCode::kPathNotInGraph, cur, "path node not in graph");
    }
    if (i > 0) {
      const std::string& prev = path.hops[i - 1].service;
      const GraphEdge* e = graph.FindEdge(prev, cur);
      if (!e || !e->Carries(prev, cur)) {
        throw Error(ErrorCode::kPathNotInGraph, prev + ">" + cur,
                    "no edge for path hop");
      }
    }
  }
}

void ValidateFailures(const SimulationConfig& config, const DependencyGraph& graph) {
  for (const auto& f : config.failures) {
    if (f.target == FailureTarget::kNode) {
      if (!graph.FindNode(f.node)) Invalid("failure targets unknown node '" + f.node + "'");
    } else {
      const GraphEdge* e = graph.FindEdge(f.from, f.to);
      if (!graph.FindNode(f.from) || !graph.FindNode(f.to) || !e ||
          !e->Carries(f.from, f.to)) {
        Invalid("failure targets unknown edge '" + f.from + ">" + f.to + "'");
      }
    }
  }
}

ServicePath ResolvePath(const SimulationConfig& config, const TraceSet& traces) {
  if (config.start_mode == StartMode::kMock) return *config.path;
  if (*config.trace_ref == kAutoTrace) {
    if (traces.paths.empty()) {
      throw Error(ErrorCode::kEmptyTraceSet, {}, "no traces to pick a path from");
    }
    return PathHits(traces).entries.front().path;
  }
  auto it = traces.traces.find(*config.trace_ref);
  if (it == traces.traces.end() || it->second.paths.empty()) {
    throw Error(ErrorCode::kUnknownTrace, *config.trace_ref, "no such trace");
  }
  return it->second.paths.front();
}

const FailureSpec* NodeFailure(const SimulationConfig& c, const std::string& id) {
  for (const auto& f : c.failures) {
    if (f.target == FailureTarget::kNode && f.node == id) return &f;
  }
  return nullptr;
}

const FailureSpec* EdgeFailure(const SimulationConfig& c, const std::string& from,
                               const std::string& to) {
  for (const auto& f : c.failures) {
    if (f.target == FailureTarget::kEdge && f.from == from && f.to == to) return &f;
  }
  return nullptr;
}

std::string InjectedDetail(const FailureSpec& f, const std::string& where) {
  return std::string(ToString(f.kind)) + " injected at " + where;
}

}  // namespace

SimulationRun Plan(const SimulationConfig& config, const DependencyGraph& graph,
                   const TraceSet& traces, std::string run_id) {
  if (config.start_mode == StartMode::kMock) {
    if (!config.path) Invalid("mock mode requires a path");
    if (!config.mock_payload) Invalid("mock mode requires a mock payload");
  } else if (!config.trace_ref || config.trace_ref->empty()) {
    Invalid("trace mode requires a trace reference");
  }
  if (config.tick_ms < 0) Invalid("tick must be non-negative");
  if (graph.level != GraphLevel::kService) Invalid("simulation needs a service-level graph");
  ValidateFailures(config, graph);

  ServicePath path = ResolvePath(config, traces);
  RequirePathInGraph(graph, path);

  std::vector<SimEvent> events;
  auto emit = [&](SubjectKind kind, std::string subject, SimStatus status,
                  std::string detail) {
    events.push_back({static_cast<int>(events.size()) + 1, kind,
                      std::move(subject), status, std::move(detail)});
  };

  std::optional<int> failed_step;
  for (std::size_t i = 0; i < path.hops.size(); ++i) {
    const Hop& hop = path.hops[i];
    if (failed_step) {
      emit(SubjectKind::kNode, hop.service, SimStatus::kNotReached,
           "upstream failure at step " + std::to_string(*failed_step));
      continue;
    }
    if (const FailureSpec* f = NodeFailure(config, hop.service)) {
      emit(SubjectKind::kNode, hop.service, SimStatus::kFailed,
           InjectedDetail(*f, hop.service));
      failed_step = events.back().step;
      continue;
    }
    std::string detail = hop.endpoint.empty() ? hop.service : hop.endpoint;
    if (i == 0) {
      detail += config.start_mode == StartMode::kMock
                    ? " with mock payload " + *config.mock_payload
                    : " from trace " + *config.trace_ref;
    }
    emit(SubjectKind::kNode, hop.service, SimStatus::kOk, std::move(detail));
    if (i + 1 < path.hops.size()) {
      const std::string& next = path.hops[i + 1].service;
      if (const FailureSpec* f = EdgeFailure(config, hop.service, next)) {
        const std::string edge = hop.service + ">" + next;
        emit(SubjectKind::kEdge, edge, SimStatus::kFailed, InjectedDetail(*f, edge));
        failed_step = events.back().step;
      }
    }
  }
  return SimulationRun(std::move(run_id), config, std::move(path), std::move(events));
}

SimulationRun RunToCompletion(SimulationRun run) {
  while (run.Step()) {
  }
  return run;
}

json SimEventToJson(const SimEvent& event) {
  return {{"step", event.step},
          {"subject_kind", ToString(event.subject_kind)},
          {"subject", event.subject},
          {"status", ToString(event.status)},
          {"detail", event.detail}};
}

SimulationConfig SimulationConfigFromJson(const json& body) {
  if (!body.is_object()) Invalid("config must be a JSON object");
  SimulationConfig c;
  auto get_string = [&](const json& obj, const char* key) -> std::optional<std::string> {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) Invalid(std::string(key) + " must be a string");
    return it->get<std::string>();
  };

  const auto mode = get_string(body, "start_mode").value_or("mock");
  if (mode == "mock") {
    c.start_mode = StartMode::kMock;
  } else if (mode == "trace") {
    c.start_mode = StartMode::kTrace;
  } else {
    Invalid("start_mode must be mock or trace");
  }

  if (auto it = body.find("path"); it != body.end() && !it->is_null()) {
    if (it->is_string()) {
      c.path = ServicePath::FromKey(it->get<std::string>());
    } else if (it->is_array()) {
      ServicePath p;
      for (const auto& hop : *it) {
        if (!hop.is_string() || hop.get<std::string>().empty()) {
          Invalid("path entries must be service names");
        }
        p.hops.push_back({hop.get<std::string>(), {}});
      }
      c.path = std::move(p);
    } else {
      Invalid("path must be a string or an array");
    }
  }
  c.mock_payload = get_string(body, "mock_payload");
  c.trace_ref = get_string(body, "trace_ref");

  if (auto it = body.find("tick"); it != body.end() && !it->is_null()) {
    if (!it->is_number_integer()) Invalid("tick must be an integer");
    c.tick_ms = it->get<int>();
  }

  if (auto it = body.find("failures"); it != body.end() && !it->is_null()) {
    if (!it->is_array()) Invalid("failures must be an array");
    for (const auto& f : *it) {
      if (!f.is_object()) Invalid("failure must be an object");
      const auto kind_name = get_string(f, "kind").value_or("error");
      FailureKind kind;
      if (kind_name == "error") {
        kind = FailureKind::kError;
      } else if (kind_name == "timeout") {
        kind = FailureKind::kTimeout;
      } else {
        Invalid("failure kind must be error or timeout");
      }
      const auto target = get_string(f, "target").value_or("");
      if (target == "node") {
        auto node = get_string(f, "node");
        if (!node) Invalid("node failure needs 'node'");
        c.failures.push_back(FailureSpec::Node(*node, kind));
      } else if (target == "edge") {
        auto from = get_string(f, "from");
        auto to = get_string(f, "to");
        if (!from || !to) Invalid("edge failure needs 'from' and 'to'");
        c.failures.push_back(FailureSpec::Edge(*from, *to, kind));
      } else {
        Invalid("failure target must be node or edge");
      }
    }
  }
  return c;
}

}  // namespace msvis
