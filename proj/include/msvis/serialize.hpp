#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include <json.hpp>

#include "msvis/graph.hpp"
#include "msvis/metrics.hpp"
#include "msvis/simulation.hpp"
#include "msvis/trace.hpp"
#include "msvis/view.hpp"

// JSON forms of engine values. Objects use sorted keys and arrays keep the
// engine's deterministic order, so equal values always render to equal bytes.
// docs/formats.md describes every shape.
namespace msvis {

nlohmann::json ToJson(const GraphNode& node);
nlohmann::json ToJson(const GraphEdge& edge);
nlohmann::json ToJson(const ControllerGroup& group);
nlohmann::json ToJson(const DependencyGraph& graph);
nlohmann::json ToJson(const LayoutResult& layout);
nlohmann::json ToJson(const View& view);
nlohmann::json ToJson(const FunctionView& view);
nlohmann::json ToJson(const IngestReport& report);
nlohmann::json ToJson(const SimulationConfig& config);
nlohmann::json ToJson(const SimulationRun& run);

// Rankings keep the first `top` entries when given.
nlohmann::json ToJson(const RankedPaths& ranking,
                      std::optional<std::size_t> top = std::nullopt);
nlohmann::json ToJson(const DependencyRank& ranking,
                      std::optional<std::size_t> top = std::nullopt);

// Canonical text form: two-space indent plus a trailing newline.
std::string Render(const nlohmann::json& value);

}  // namespace msvis
