#include "msvis/view.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>
#include <tuple>

#include "msvis/error.hpp"

namespace msvis {

std::string_view ToString(ViewLevel level) noexcept {
  switch (level) {
    case ViewLevel::kSystem: return "system";
    case ViewLevel::kService: return "service";
    case ViewLevel::kFunction: return "function";
  }
  return "service";
}

const ViewNode* View::FindNode(std::string_view id) const {
  auto it = std::lower_bound(
      nodes.begin(), nodes.end(), id,
      [](const ViewNode& n, std::string_view key) { return n.node.id < key; });
  return it != nodes.end() && it->node.id == id ? &*it : nullptr;
}

const GraphEdge* View::FindEdge(std::string_view u, std::string_view v) const {
  if (v < u) std::swap(u, v);
  for (const auto& e : edges) {
    if (e.a == u && e.b == v) return &e;
  }
  return nullptr;
}

namespace {

View Project(const DependencyGraph& graph, ViewLevel level) {
  View view;
  view.level = level;
  view.nodes.reserve(graph.nodes.size());
  for (const auto& n : graph.nodes) view.nodes.push_back({n});
  view.edges = graph.edges;
  return view;
}

}  // namespace

View SystemView(const DependencyGraph& graph) {
  if (graph.level != GraphLevel::kSystem) {
    throw std::invalid_argument("system view needs a system-level graph");
  }
  return Project(graph, ViewLevel::kSystem);
}

View ServiceView(const DependencyGraph& graph) {
  if (graph.level != GraphLevel::kService) {
    throw std::invalid_argument("service view needs a service-level graph");
  }
  return Project(graph, ViewLevel::kService);
}

FunctionView BuildFunctionView(const ServiceManifest& manifest,
                               const std::string& service,
                               const std::optional<std::string>& endpoint) {
  const ServiceDecl* svc = manifest.FindService(service);
  if (!svc) throw Error(ErrorCode::kUnknownService, service, "no such service");

  std::vector<const EndpointDecl*> blocks;
  if (endpoint) {
    const EndpointDecl* ep = svc->FindEndpoint(*endpoint);
    if (!ep) {
      throw Error(ErrorCode::kUnknownEndpoint, *endpoint,
                  "no such endpoint on " + service);
    }
    blocks.push_back(ep);
  } else {
    for (const auto& ep : svc->endpoints) blocks.push_back(&ep);
  }

  FunctionView fv;
  fv.service = service;
  fv.endpoint = endpoint;
  std::set<std::string> seen;
  auto participant = [&](const std::string& name) {
    if (seen.insert(name).second) fv.participants.push_back(name);
  };
  int seq = 0;
  for (const EndpointDecl* ep : blocks) {
    for (const auto& step : ep->flow) {
      participant(step.function);
      for (const auto& callee : step.calls) {
        participant(callee);
        fv.messages.push_back({++seq, step.function, callee, ep->id()});
      }
    }
  }
  return fv;
}

View NodeFilter(const View& view, const std::string& node_id) {
  if (!view.FindNode(node_id)) {
    throw Error(ErrorCode::kUnknownNode, node_id, "node not in view");
  }
  std::set<std::string> keep{node_id};
  View out;
  out.level = view.level;
  out.focus = node_id;
  for (const auto& e : view.edges) {
    if (e.a == node_id || e.b == node_id) {
      out.edges.push_back(e);
      keep.insert(e.a);
      keep.insert(e.b);
    }
  }
  for (const auto& n : view.nodes) {
    if (keep.contains(n.node.id)) out.nodes.push_back({n.node});
  }
  return out;
}

View PathFilter(const View& view, const ServicePath& path) {
  if (path.hops.empty()) {
    throw Error(ErrorCode::kInvalidConfig, {}, "path has no hops");
  }
  PathHighlight hl;
  hl.path_key = path.key();
  for (std::size_t i = 0; i < path.hops.size(); ++i) {
    const std::string& cur = path.hops[i].service;
    if (i == 0) {
      if (!view.FindNode(cur)) {
        throw Error(ErrorCode::kPathNotInGraph, cur, "path node not in view");
      }
    } else {
      const std::string& prev = path.hops[i - 1].service;
      const GraphEdge* e = view.FindEdge(prev, cur);
      if (!e || !e->Carries(prev, cur)) {
        throw Error(ErrorCode::kPathNotInGraph, prev + ">" + cur,
                    "no edge for path hop");
      }
      hl.edges.push_back({prev, cur});
    }
    hl.nodes.push_back(cur);
  }

  View out = view;
  out.focus.reset();
  const std::set<std::string> on_path(hl.nodes.begin(), hl.nodes.end());
  for (auto& n : out.nodes) {
    n.on_path = on_path.contains(n.node.id);
    n.dimmed = !n.on_path;
  }
  out.highlight = std::move(hl);
  return out;
}

}  // namespace msvis
