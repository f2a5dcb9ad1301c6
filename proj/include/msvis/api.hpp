#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "msvis/graph.hpp"
#include "msvis/manifest.hpp"
#include "msvis/metrics.hpp"
#include "msvis/simulation.hpp"
#include "msvis/trace.hpp"

// Request-level operations shared by the CLI and the HTTP server. Every body
// function returns the exact text both front ends emit.
namespace msvis::api {

// "TrainTicket System" -> "trainticket-system".
std::string Slug(std::string_view name);

// Immutable state of one registered system. Mutations produce a new snapshot.
struct SystemSnapshot {
  std::string system_id;
  ServiceManifest manifest;
  DependencyGraph system_graph;
  DependencyGraph service_graph;
  std::vector<Span> spans;  // every accepted span, across ingests
  std::uint64_t malformed_total = 0;
  TraceSet traces;
  RankedPaths path_hits;
  RankedPaths path_length;
  DependencyRank service_dependency;

  static std::shared_ptr<const SystemSnapshot> Create(ServiceManifest manifest);

  // New snapshot with `batch` merged in. `report` receives the batch's own
  // ingest report.
  std::shared_ptr<const SystemSnapshot> WithSpans(const ParsedSpans& batch,
                                                  IngestReport* report) const;
};

std::optional<GraphLevel> ParseLevel(std::string_view name) noexcept;

nlohmann::json SystemSummary(const SystemSnapshot& snapshot);

std::string ViewBody(const SystemSnapshot& snapshot, GraphLevel level,
                     std::uint64_t seed);
std::string FunctionViewBody(const SystemSnapshot& snapshot,
                             const std::string& service,
                             const std::optional<std::string>& endpoint);
std::string NodeFilterBody(const SystemSnapshot& snapshot, GraphLevel level,
                           const std::string& node, std::uint64_t seed);
std::string PathFilterBody(const SystemSnapshot& snapshot,
                           std::string_view path_key, std::uint64_t seed);
std::string MetricBody(const SystemSnapshot& snapshot, Metric metric,
                       std::optional<std::size_t> top);

SimulationRun PlanAndRun(const SystemSnapshot& snapshot,
                         const SimulationConfig& config, std::string run_id);

// Error payload: {"error": code, "subject": ..., "message": ..., "json_path": ...}.
nlohmann::json ErrorJson(const std::exception& e);

}  // namespace msvis::api
