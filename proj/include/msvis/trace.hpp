#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace msvis {

enum class SpanStatus { kOk, kError };

struct Span {
  std::string trace_id;
  std::string span_id;
  std::optional<std::string> parent_span_id;
  std::string service;
  std::string endpoint;
  std::int64_t start_time = 0;  // microseconds since epoch
  std::int64_t duration = 0;    // microseconds
  SpanStatus status = SpanStatus::kOk;

  bool operator==(const Span&) const = default;
};

struct Hop {
  std::string service;
  std::string endpoint;  // empty when the path was given by service names only

  bool operator==(const Hop&) const = default;
};

// Ordered service hops of one request branch. Consecutive hops never share a
// service.
struct ServicePath {
  std::vector<Hop> hops;

  // "svc1>svc2>..."; service-granular.
  std::string key() const;
  std::size_t size() const { return hops.size(); }

  // Parses "A>B>C". Empty segments are rejected with InvalidConfig.
  static ServicePath FromKey(std::string_view key);

  bool operator==(const ServicePath&) const = default;
};

// Single-root span tree. Spans are stored sorted by (start_time, span_id) so
// the tree is independent of input line order.
struct SpanTree {
  std::vector<Span> spans;
  std::size_t root = 0;
  std::vector<std::vector<std::size_t>> children;  // sibling order: start_time, span_id

  bool operator==(const SpanTree&) const = default;
};

struct Trace {
  std::string trace_id;
  SpanTree tree;
  std::vector<ServicePath> paths;

  bool operator==(const Trace&) const = default;
};

struct IngestReport {
  std::uint64_t traces = 0;           // well-formed traces kept
  std::uint64_t paths = 0;            // total path multiplicity
  std::uint64_t malformed_count = 0;  // unparsable or ill-typed lines, duplicate span ids
  std::uint64_t orphan_count = 0;     // spans dropped for an unresolvable parent
  std::uint64_t skipped_traces = 0;   // traces without exactly one root

  bool operator==(const IngestReport&) const = default;
};

struct TraceSet {
  std::map<std::string, Trace> traces;  // by trace id
  std::vector<ServicePath> paths;       // multiset, trace-id order then branch order
  IngestReport report;

  bool operator==(const TraceSet&) const = default;
};

// One path per root-to-leaf branch; consecutive same-service spans collapse.
std::vector<ServicePath> ExtractPaths(const SpanTree& tree);

// Parses one JSON-Lines record. Returns nullopt for malformed records.
std::optional<Span> ParseSpanLine(std::string_view line);

struct ParsedSpans {
  std::vector<Span> spans;
  std::uint64_t malformed_count = 0;
};

// Splits JSON Lines into spans, counting malformed lines. Throws EmptyInput
// when there is no non-blank line.
ParsedSpans ParseSpanLines(std::string_view text);
nlohmann::json SpanToJson(const Span& span);

// Groups spans into trees and extracts paths. Orphans are dropped and
// multi-root traces skipped, both counted in the report.
TraceSet BuildTraceSet(std::vector<Span> spans, std::uint64_t malformed_count = 0);

// Lenient JSON-Lines parse. Throws EmptyInput when no non-blank line exists.
TraceSet ParseTraces(std::string_view text);
TraceSet LoadTraceFile(const std::string& path);

}  // namespace msvis
