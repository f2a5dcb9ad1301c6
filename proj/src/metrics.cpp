#include "msvis/metrics.hpp"

#include <algorithm>
#include <unordered_map>

namespace msvis {

std::string_view ToString(Metric metric) noexcept {
  switch (metric) {
    case Metric::kPathHits: return "path-hits";
    case Metric::kPathLength: return "path-length";
    case Metric::kServiceDependency: return "service-dependency";
  }
  return "path-hits";
}

std::optional<Metric> ParseMetric(std::string_view name) noexcept {
  for (Metric m : {Metric::kPathHits, Metric::kPathLength,
                   Metric::kServiceDependency}) {
    if (ToString(m) == name) return m;
  }
  return std::nullopt;
}

namespace {

// Distinct service-level keys in first-seen order, paired with their keys.
struct Distinct {
  std::vector<RankedPath> entries;
  std::vector<std::string> keys;
  std::unordered_map<std::string, std::size_t> index;

  RankedPath& Add(const ServicePath& path) {
    std::string key = path.key();
    auto [it, inserted] = index.try_emplace(key, entries.size());
    if (inserted) {
      entries.push_back({path, 0});
      keys.push_back(std::move(key));
    }
    return entries[it->second];
  }
};

RankedPaths Finish(Metric metric, Distinct d) {
  std::vector<std::size_t> order(d.entries.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) {
    if (d.entries[l].score != d.entries[r].score) {
      return d.entries[l].score > d.entries[r].score;
    }
    return d.keys[l] < d.keys[r];
  });
  RankedPaths out;
  out.metric = metric;
  out.entries.reserve(order.size());
  for (std::size_t i : order) out.entries.push_back(std::move(d.entries[i]));
  return out;
}

}  // namespace

RankedPaths PathHits(const TraceSet& traces) {
  Distinct d;
  for (const auto& p : traces.paths) ++d.Add(p).score;
  return Finish(Metric::kPathHits, std::move(d));
}

RankedPaths PathLengthRank(const TraceSet& traces) {
  Distinct d;
  for (const auto& p : traces.paths) d.Add(p).score = p.size();
  return Finish(Metric::kPathLength, std::move(d));
}

DependencyRank ServiceDependencyRank(const DependencyGraph& graph) {
  DependencyRank rank;
  rank.entries.reserve(graph.nodes.size());
  for (const auto& n : graph.nodes) rank.entries.push_back({n.id, n.in_degree});
  std::sort(rank.entries.begin(), rank.entries.end(),
            [](const DependencyRankEntry& l, const DependencyRankEntry& r) {
              if (l.dependents != r.dependents) return l.dependents > r.dependents;
              return l.id < r.id;
            });
  return rank;
}

}  // namespace msvis
