#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "msvis/graph.hpp"
#include "msvis/trace.hpp"

namespace msvis {

enum class Metric { kPathHits, kPathLength, kServiceDependency };

std::string_view ToString(Metric metric) noexcept;
// "path-hits" | "path-length" | "service-dependency"
std::optional<Metric> ParseMetric(std::string_view name) noexcept;

struct RankedPath {
  ServicePath path;  // first occurrence of the key in trace-set order
  std::uint64_t score = 0;

  bool operator==(const RankedPath&) const = default;
};

// Sorted by score descending, then path key ascending.
struct RankedPaths {
  Metric metric = Metric::kPathHits;
  std::vector<RankedPath> entries;

  bool operator==(const RankedPaths&) const = default;
};

struct DependencyRankEntry {
  std::string id;
  std::uint64_t dependents = 0;

  bool operator==(const DependencyRankEntry&) const = default;
};

// Sorted by dependents descending, then id ascending.
struct DependencyRank {
  std::vector<DependencyRankEntry> entries;

  bool operator==(const DependencyRank&) const = default;
};

RankedPaths PathHits(const TraceSet& traces);
RankedPaths PathLengthRank(const TraceSet& traces);
DependencyRank ServiceDependencyRank(const DependencyGraph& graph);

}  // namespace msvis
