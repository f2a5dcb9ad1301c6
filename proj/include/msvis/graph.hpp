#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "msvis/manifest.hpp"

namespace msvis {

inline constexpr std::uint64_t kNodeSizeCap = 1'000'000;
inline constexpr int kMaxCrossLines = 3;

enum class GraphLevel { kSystem, kService };
enum class NodeKind { kService, kController };
enum class Direction { kAToB, kBToA, kBidirectional };

std::string_view ToString(GraphLevel level) noexcept;
std::string_view ToString(NodeKind kind) noexcept;
std::string_view ToString(Direction direction) noexcept;

// Controller color as an evenly spaced hue; saturation and lightness fixed.
struct Color {
  int hue = 0;

  std::string token() const;
  bool operator==(const Color&) const = default;
};

struct ControllerGroup {
  std::string key;
  std::vector<std::string> members;  // service names, sorted
  Color color;

  bool operator==(const ControllerGroup&) const = default;
};

struct GraphNode {
  std::string id;
  NodeKind kind = NodeKind::kService;
  std::string controller_key;
  std::uint64_t in_degree = 0;   // nodes depending on this one
  std::uint64_t out_degree = 0;  // nodes this one depends on
  std::uint64_t size = 1;
  Color color;
  std::uint64_t self_calls = 0;  // calls a node makes to itself; never edges

  bool operator==(const GraphNode&) const = default;
};

struct GraphEdge {
  std::string a;  // a < b lexicographically
  std::string b;
  Direction direction = Direction::kAToB;
  std::uint64_t dependency_count = 0;
  int cross_lines = 0;

  // True when the edge carries calls from `from` to `to`.
  bool Carries(std::string_view from, std::string_view to) const;

  bool operator==(const GraphEdge&) const = default;
};

struct DependencyGraph {
  GraphLevel level = GraphLevel::kService;
  std::vector<GraphNode> nodes;               // sorted by id
  std::vector<GraphEdge> edges;               // sorted by (a, b)
  std::vector<ControllerGroup> controllers;   // sorted by key

  const GraphNode* FindNode(std::string_view id) const;
  const GraphEdge* FindEdge(std::string_view u, std::string_view v) const;
  const ControllerGroup* FindController(std::string_view key) const;

  bool operator==(const DependencyGraph&) const = default;
};

// max(x^y, x, y). A zero operand defers to the other; both zero gives 1.
// Saturates at kNodeSizeCap.
std::uint64_t NodeSize(std::uint64_t x, std::uint64_t y) noexcept;

// Number of cross-line ticks drawn for an edge; suppressed above three.
int CrossLines(std::uint64_t dependency_count) noexcept;

// Groups services by controller key, sorted by key. Colors are left at the
// default; see AssignColors.
std::vector<ControllerGroup> DeriveControllers(const ServiceManifest& manifest);

std::vector<ControllerGroup> AssignColors(std::vector<ControllerGroup> groups);

DependencyGraph BuildGraph(const ServiceManifest& manifest, GraphLevel level);

}  // namespace msvis
