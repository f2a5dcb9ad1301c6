#include "msvis/graph.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>
#include <unordered_map>

#include "msvis/error.hpp"

namespace msvis {

std::string_view ToString(GraphLevel level) noexcept {
  return level == GraphLevel::kSystem ? "system" : "service";
}

std::string_view ToString(NodeKind kind) noexcept {
  return kind == NodeKind::kService ? "service" : "controller";
}

std::string_view ToString(Direction direction) noexcept {
  switch (direction) {
    case Direction::kAToB: return "a_to_b";
    case Direction::kBToA: return "b_to_a";
    case Direction::kBidirectional: return "bidirectional";
  }
  return "a_to_b";
}

std::string Color::token() const {
  return "hsl(" + std::to_string(hue) + ",70%,50%)";
}

bool GraphEdge::Carries(std::string_view from, std::string_view to) const {
  if (from == a && to == b) return direction != Direction::kBToA;
  if (from == b && to == a) return direction != Direction::kAToB;
  return false;
}

const GraphNode* DependencyGraph::FindNode(std::string_view id) const {
  auto it = std::lower_bound(
      nodes.begin(), nodes.end(), id,
      [](const GraphNode& n, std::string_view key) { return n.id < key; });
  return it != nodes.end() && it->id == id ? &*it : nullptr;
}

const GraphEdge* DependencyGraph::FindEdge(std::string_view u,
                                           std::string_view v) const {
  if (v < u) std::swap(u, v);
  auto it = std::lower_bound(edges.begin(), edges.end(), std::pair{u, v},
                             [](const GraphEdge& e, const auto& key) {
                               return std::tie(e.a, e.b) < std::tie(key.first, key.second);
                             });
  return it != edges.end() && it->a == u && it->b == v ? &*it : nullptr;
}

const ControllerGroup* DependencyGraph::FindController(std::string_view key) const {
  for (const auto& g : controllers) {
    if (g.key == key) return &g;
  }
  return nullptr;
}

std::uint64_t NodeSize(std::uint64_t x, std::uint64_t y) noexcept {
  if (x == 0 && y == 0) return 1;
  if (x == 0) return std::min(y, kNodeSizeCap);
  if (y == 0) return std::min(x, kNodeSizeCap);
  // x^y by repeated multiplication, stopping once past the cap.
  std::uint64_t power = 1;
  if (x > kNodeSizeCap) {
    power = x;
  } else if (x > 1) {
    for (std::uint64_t i = 0; i < y && power <= kNodeSizeCap; ++i) power *= x;
  }
  return std::min(std::max({power, x, y}), kNodeSizeCap);
}

int CrossLines(std::uint64_t dependency_count) noexcept {
  return dependency_count <= kMaxCrossLines ? static_cast<int>(dependency_count) : 0;
}

std::vector<ControllerGroup> DeriveControllers(const ServiceManifest& manifest) {
  std::map<std::string, std::vector<std::string>> by_key;
  for (const auto& svc : manifest.services) {
    by_key[svc.controller_key()].push_back(svc.name);
  }
  std::vector<ControllerGroup> groups;
  groups.reserve(by_key.size());
  for (auto& [key, members] : by_key) {
    std::sort(members.begin(), members.end());
    groups.push_back({key, std::move(members), {}});
  }
  return groups;
}

std::vector<ControllerGroup> AssignColors(std::vector<ControllerGroup> groups) {
  const auto n = static_cast<long>(groups.size());
  for (long i = 0; i < n; ++i) {
    groups[i].color.hue = static_cast<int>(i * 360 / n);
  }
  return groups;
}

namespace {

struct PairAccumulator {
  bool a_to_b = false;
  bool b_to_a = false;
  std::set<std::tuple<std::string, std::string, std::string, std::string>> deps;
};

// Accumulates directed dependencies between distinct node ids into
// undirected edges with per-direction flags.
class EdgeBuilder {
 public:
  void Add(const std::string& from, const std::string& to,
           std::tuple<std::string, std::string, std::string, std::string> dep) {
    const bool forward = from < to;
    auto& acc = pairs_[forward ? std::pair{from, to} : std::pair{to, from}];
    (forward ? acc.a_to_b : acc.b_to_a) = true;
    acc.deps.insert(std::move(dep));
  }

  std::vector<GraphEdge> Build() const {
    std::vector<GraphEdge> edges;
    edges.reserve(pairs_.size());
    for (const auto& [key, acc] : pairs_) {
      GraphEdge e;
      e.a = key.first;
      e.b = key.second;
      e.direction = acc.a_to_b && acc.b_to_a ? Direction::kBidirectional
                    : acc.a_to_b            ? Direction::kAToB
                                            : Direction::kBToA;
      e.dependency_count = acc.deps.size();
      e.cross_lines = CrossLines(e.dependency_count);
      edges.push_back(std::move(e));
    }
    return edges;
  }

 private:
  std::map<std::pair<std::string, std::string>, PairAccumulator> pairs_;
};

void FillDegrees(DependencyGraph& graph) {
  std::unordered_map<std::string, GraphNode*> index;
  for (auto& n : graph.nodes) index[n.id] = &n;
  for (const auto& e : graph.edges) {
    GraphNode* a = index.at(e.a);
    GraphNode* b = index.at(e.b);
    if (e.direction != Direction::kBToA) {
      ++a->out_degree;
      ++b->in_degree;
    }
    if (e.direction != Direction::kAToB) {
      ++b->out_degree;
      ++a->in_degree;
    }
  }
  for (auto& n : graph.nodes) n.size = NodeSize(n.in_degree, n.out_degree);
}

}  // namespace

DependencyGraph BuildGraph(const ServiceManifest& manifest, GraphLevel level) {
  DependencyGraph graph;
  graph.level = level;
  graph.controllers = AssignColors(DeriveControllers(manifest));

  std::unordered_map<std::string, const ControllerGroup*> controller_of;
  for (const auto& g : graph.controllers) {
    for (const auto& m : g.members) controller_of[m] = &g;
  }

  EdgeBuilder builder;
  std::map<std::string, std::uint64_t> self_calls;
  // Distinct intra-controller service pairs, recorded as controller metadata.
  std::set<std::pair<std::string, std::string>> intra_pairs;

  for (const auto& svc : manifest.services) {
    for (const auto& ep : svc.endpoints) {
      for (const auto& call : ep.calls) {
        if (!controller_of.contains(call.service)) {
          throw Error(ErrorCode::kDanglingCallTarget, call.service,
                      "call targets an undeclared service");
        }
        if (level == GraphLevel::kService) {
          if (call.service == svc.name) {
            ++self_calls[svc.name];
            continue;
          }
          builder.Add(svc.name, call.service,
                      {svc.name, ep.id(), call.service, call.endpoint});
        } else {
          const std::string& from = controller_of.at(svc.name)->key;
          const std::string& to = controller_of.at(call.service)->key;
          if (from == to) {
            if (call.service != svc.name &&
                intra_pairs.emplace(svc.name, call.service).second) {
              ++self_calls[from];
            }
            continue;
          }
          builder.Add(from, to, {svc.name, {}, call.service, {}});
        }
      }
    }
  }

  if (level == GraphLevel::kService) {
    for (const auto& svc : manifest.services) {
      const ControllerGroup* group = controller_of.at(svc.name);
      GraphNode node;
      node.id = svc.name;
      node.kind = NodeKind::kService;
      node.controller_key = group->key;
      node.color = group->color;
      if (auto it = self_calls.find(svc.name); it != self_calls.end()) {
        node.self_calls = it->second;
      }
      graph.nodes.push_back(std::move(node));
    }
  } else {
    for (const auto& g : graph.controllers) {
      GraphNode node;
      node.id = g.key;
      node.kind = NodeKind::kController;
      node.controller_key = g.key;
      node.color = g.color;
      if (auto it = self_calls.find(g.key); it != self_calls.end()) {
        node.self_calls = it->second;
      }
      graph.nodes.push_back(std::move(node));
    }
  }
  std::sort(graph.nodes.begin(), graph.nodes.end(),
            [](const GraphNode& l, const GraphNode& r) { return l.id < r.id; });
  graph.edges = builder.Build();
  FillDegrees(graph);
  return graph;
}

}  // namespace msvis
