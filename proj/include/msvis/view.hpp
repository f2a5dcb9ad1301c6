#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "msvis/graph.hpp"
#include "msvis/manifest.hpp"
#include "msvis/trace.hpp"

namespace msvis {

enum class ViewLevel { kSystem, kService, kFunction };

std::string_view ToString(ViewLevel level) noexcept;

using Position = std::array<double, 3>;

struct LayoutResult {
  std::map<std::string, Position> positions;
  std::uint64_t seed = 0;
  int iterations = 0;

  bool operator==(const LayoutResult&) const = default;
};

struct ViewNode {
  GraphNode node;
  bool dimmed = false;   // outside the highlighted path
  bool on_path = false;

  bool operator==(const ViewNode&) const = default;
};

struct HighlightEdge {
  std::string from;
  std::string to;

  bool operator==(const HighlightEdge&) const = default;
};

struct PathHighlight {
  std::string path_key;
  std::vector<std::string> nodes;     // in path order
  std::vector<HighlightEdge> edges;   // in path order, size == nodes - 1

  bool operator==(const PathHighlight&) const = default;
};

struct View {
  ViewLevel level = ViewLevel::kService;
  std::vector<ViewNode> nodes;  // sorted by id
  std::vector<GraphEdge> edges; // sorted by (a, b)
  std::optional<PathHighlight> highlight;
  std::optional<std::string> focus;
  std::optional<LayoutResult> layout;

  const ViewNode* FindNode(std::string_view id) const;
  const GraphEdge* FindEdge(std::string_view u, std::string_view v) const;

  bool operator==(const View&) const = default;
};

struct FunctionMessage {
  int seq = 0;
  std::string from;
  std::string to;
  std::string endpoint;  // endpoint block the message belongs to

  bool operator==(const FunctionMessage&) const = default;
};

struct FunctionView {
  std::string service;
  std::optional<std::string> endpoint;
  std::vector<std::string> participants;  // order of first appearance
  std::vector<FunctionMessage> messages;

  bool operator==(const FunctionView&) const = default;
};

View SystemView(const DependencyGraph& graph);
View ServiceView(const DependencyGraph& graph);

// Communication diagram of a service's internal flow. Without an endpoint,
// per-endpoint blocks are concatenated in declaration order.
FunctionView BuildFunctionView(const ServiceManifest& manifest,
                               const std::string& service,
                               const std::optional<std::string>& endpoint = {});

// Focus node, its direct neighbors in both directions, and incident edges.
View NodeFilter(const View& view, const std::string& node_id);

// Highlights the path's edge chain and dims every other node. Each
// consecutive hop pair needs an edge carrying calls in that direction.
View PathFilter(const View& view, const ServicePath& path);

}  // namespace msvis
