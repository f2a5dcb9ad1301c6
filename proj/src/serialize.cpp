#include "msvis/serialize.hpp"

#include <algorithm>

namespace msvis {

using nlohmann::json;

namespace {

template <typename T>
json OrNull(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

std::size_t Limit(std::size_t size, std::optional<std::size_t> top) {
  return top ? std::min(size, *top) : size;
}

}  // namespace

json ToJson(const GraphNode& node) {
  return {{"id", node.id},
          {"kind", ToString(node.kind)},
          {"controller_key", node.controller_key},
          {"in_degree", node.in_degree},
          {"out_degree", node.out_degree},
          {"size", node.size},
          {"color", node.color.token()},
          {"hue", node.color.hue},
          {"self_calls", node.self_calls}};
}

json ToJson(const GraphEdge& edge) {
  return {{"a", edge.a},
          {"b", edge.b},
          {"direction", ToString(edge.direction)},
          {"dependency_count", edge.dependency_count},
          {"cross_lines", edge.cross_lines}};
}

json ToJson(const ControllerGroup& group) {
  return {{"key", group.key},
          {"members", group.members},
          {"color", group.color.token()},
          {"hue", group.color.hue}};
}

json ToJson(const DependencyGraph& graph) {
  json nodes = json::array();
  for (const auto& n : graph.nodes) nodes.push_back(ToJson(n));
  json edges = json::array();
  for (const auto& e : graph.edges) edges.push_back(ToJson(e));
  json controllers = json::array();
  for (const auto& g : graph.controllers) controllers.push_back(ToJson(g));
  return {{"level", ToString(graph.level)},
          {"nodes", std::move(nodes)},
          {"edges", std::move(edges)},
          {"controllers", std::move(controllers)}};
}

json ToJson(const LayoutResult& layout) {
  json positions = json::object();
  for (const auto& [id, p] : layout.positions) {
    positions[id] = {p[0], p[1], p[2]};
  }
  return {{"seed", layout.seed},
          {"iterations", layout.iterations},
          {"positions", std::move(positions)}};
}

json ToJson(const View& view) {
  json nodes = json::array();
  for (const auto& n : view.nodes) {
    json j = ToJson(n.node);
    j["dimmed"] = n.dimmed;
    j["on_path"] = n.on_path;
    nodes.push_back(std::move(j));
  }
  json edges = json::array();
  for (const auto& e : view.edges) edges.push_back(ToJson(e));

  json highlight = nullptr;
  if (view.highlight) {
    json hl_edges = json::array();
    for (const auto& e : view.highlight->edges) {
      hl_edges.push_back({{"from", e.from}, {"to", e.to}});
    }
    highlight = {{"path", view.highlight->path_key},
                 {"nodes", view.highlight->nodes},
                 {"edges", std::move(hl_edges)}};
  }
  return {{"level", ToString(view.level)},
          {"nodes", std::move(nodes)},
          {"edges", std::move(edges)},
          {"highlight", std::move(highlight)},
          {"focus", OrNull(view.focus)},
          {"layout", view.layout ? ToJson(*view.layout) : json(nullptr)}};
}

json ToJson(const FunctionView& view) {
  json messages = json::array();
  for (const auto& m : view.messages) {
    messages.push_back(
        {{"seq", m.seq}, {"from", m.from}, {"to", m.to}, {"endpoint", m.endpoint}});
  }
  return {{"level", "function"},
          {"service", view.service},
          {"endpoint", OrNull(view.endpoint)},
          {"participants", view.participants},
          {"messages", std::move(messages)}};
}

json ToJson(const IngestReport& report) {
  return {{"traces", report.traces},
          {"paths", report.paths},
          {"malformed_count", report.malformed_count},
          {"orphan_count", report.orphan_count},
          {"skipped_traces", report.skipped_traces}};
}

json ToJson(const SimulationConfig& config) {
  json failures = json::array();
  for (const auto& f : config.failures) {
    json j = {{"target", f.target == FailureTarget::kNode ? "node" : "edge"},
              {"kind", ToString(f.kind)}};
    if (f.target == FailureTarget::kNode) {
      j["node"] = f.node;
    } else {
      j["from"] = f.from;
      j["to"] = f.to;
    }
    failures.push_back(std::move(j));
  }
  return {{"start_mode", ToString(config.start_mode)},
          {"path", config.path ? json(config.path->key()) : json(nullptr)},
          {"mock_payload", OrNull(config.mock_payload)},
          {"trace_ref", OrNull(config.trace_ref)},
          {"failures", std::move(failures)},
          {"tick", config.tick_ms}};
}

json ToJson(const SimulationRun& run) {
  json events = json::array();
  for (const auto& e : run.events()) events.push_back(SimEventToJson(e));
  return {{"id", run.id()},
          {"state", ToString(run.state())},
          {"resolved_path", run.resolved_path().key()},
          {"config", ToJson(run.config())},
          {"events", std::move(events)}};
}

json ToJson(const RankedPaths& ranking, std::optional<std::size_t> top) {
  json entries = json::array();
  const std::size_t n = Limit(ranking.entries.size(), top);
  for (std::size_t i = 0; i < n; ++i) {
    entries.push_back({{"rank", i + 1},
                       {"key", ranking.entries[i].path.key()},
                       {"score", ranking.entries[i].score}});
  }
  return {{"metric", ToString(ranking.metric)}, {"entries", std::move(entries)}};
}

json ToJson(const DependencyRank& ranking, std::optional<std::size_t> top) {
  json entries = json::array();
  const std::size_t n = Limit(ranking.entries.size(), top);
  for (std::size_t i = 0; i < n; ++i) {
    entries.push_back({{"rank", i + 1},
                       {"id", ranking.entries[i].id},
                       {"score", ranking.entries[i].dependents}});
  }
  return {{"metric", ToString(Metric::kServiceDependency)},
          {"entries", std::move(entries)}};
}

std::string Render(const json& value) {
  return value.dump(2) + "\n";
}

}  // namespace msvis
