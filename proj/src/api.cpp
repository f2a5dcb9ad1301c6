#include "msvis/api.hpp"

#include <cctype>

#include "msvis/error.hpp"
#include "msvis/layout.hpp"
#include "msvis/serialize.hpp"
#include "msvis/view.hpp"

namespace msvis::api {

using nlohmann::json;

std::string Slug(std::string_view name) {
  std::string out;
  bool dash = false;
  for (char ch : name) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c)) {
      if (dash && !out.empty()) out += '-';
      out += static_cast<char>(std::tolower(c));
      dash = false;
    } else {
      dash = true;
    }
  }
  return out.empty() ? "system" : out;
}

namespace {

void Rank(SystemSnapshot& s) {
  s.path_hits = PathHits(s.traces);
  s.path_length = PathLengthRank(s.traces);
  s.service_dependency = ServiceDependencyRank(s.service_graph);
}

View LevelView(const SystemSnapshot& s, GraphLevel level) {
  return level == GraphLevel::kSystem ? SystemView(s.system_graph)
                                       : ServiceView(s.service_graph);
}

void AttachLayout(View& view, std::uint64_t seed) {
  if (!view.nodes.empty()) view.layout = Layout3d(view, seed);
}

}  // namespace

std::shared_ptr<const SystemSnapshot> SystemSnapshot::Create(ServiceManifest manifest) {
  auto s = std::make_shared<SystemSnapshot>();
  s->system_id = Slug(manifest.system_name);
  s->system_graph = BuildGraph(manifest, GraphLevel::kSystem);
  s->service_graph = BuildGraph(manifest, GraphLevel::kService);
  s->manifest = std::move(manifest);
  Rank(*s);
  return s;
}

std::shared_ptr<const SystemSnapshot> SystemSnapshot::WithSpans(
    const ParsedSpans& batch, IngestReport* report) const {
  if (report) *report = BuildTraceSet(batch.spans, batch.malformed_count).report;
  auto next = std::make_shared<SystemSnapshot>(*this);
  next->spans.insert(next->spans.end(), batch.spans.begin(), batch.spans.end());
  next->malformed_total += batch.malformed_count;
  next->traces = BuildTraceSet(next->spans, next->malformed_total);
  Rank(*next);
  return next;
}

std::optional<GraphLevel> ParseLevel(std::string_view name) noexcept {
  if (name == "system") return GraphLevel::kSystem;
  if (name == "service") return GraphLevel::kService;
  return std::nullopt;
}

json SystemSummary(const SystemSnapshot& s) {
  return {{"system_id", s.system_id},
          {"system_name", s.manifest.system_name},
          {"services", s.manifest.services.size()},
          {"controllers", s.system_graph.controllers.size()},
          {"traces", s.traces.traces.size()}};
}

std::string ViewBody(const SystemSnapshot& s, GraphLevel level, std::uint64_t seed) {
  View view = LevelView(s, level);
  AttachLayout(view, seed);
  return Render(ToJson(view));
}

std::string FunctionViewBody(const SystemSnapshot& s, const std::string& service,
                             const std::optional<std::string>& endpoint) {
  return Render(ToJson(BuildFunctionView(s.manifest, service, endpoint)));
}

std::string NodeFilterBody(const SystemSnapshot& s, GraphLevel level,
                           const std::string& node, std::uint64_t seed) {
  View view = NodeFilter(LevelView(s, level), node);
  AttachLayout(view, seed);
  return Render(ToJson(view));
}

std::string PathFilterBody(const SystemSnapshot& s, std::string_view path_key,
                           std::uint64_t seed) {
  View base = ServiceView(s.service_graph);
  View view = PathFilter(base, ServicePath::FromKey(path_key));
  AttachLayout(view, seed);
  return Render(ToJson(view));
}

std::string MetricBody(const SystemSnapshot& s, Metric metric,
                       std::optional<std::size_t> top) {
  switch (metric) {
    case Metric::kPathHits: return Render(ToJson(s.path_hits, top));
    case Metric::kPathLength: return Render(ToJson(s.path_length, top));
    case Metric::kServiceDependency:
      return Render(ToJson(s.service_dependency, top));
  }
  return {};
}

SimulationRun PlanAndRun(const SystemSnapshot& s, const SimulationConfig& config,
                         std::string run_id) {
  return RunToCompletion(Plan(config, s.service_graph, s.traces, std::move(run_id)));
}

json ErrorJson(const std::exception& e) {
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    json j = {{"error", ToString(err->code())}, {"message", err->what()}};
    if (!err->subject().empty()) j["subject"] = err->subject();
    if (!err->json_path().empty()) j["json_path"] = err->json_path();
    return j;
  }
  return {{"error", "InternalError"}, {"message", e.what()}};
}

}  // namespace msvis::api
