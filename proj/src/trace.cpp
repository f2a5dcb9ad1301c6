#include "msvis/trace.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

#include "msvis/error.hpp"

namespace msvis {

using nlohmann::json;

std::string ServicePath::key() const {
  std::string out;
  for (std::size_t i = 0; i < hops.size(); ++i) {
    if (i) out += '>';
    out += hops[i].service;
  }
  return out;
}

ServicePath ServicePath::FromKey(std::string_view key) {
  ServicePath path;
  std::size_t start = 0;
  while (true) {
    const std::size_t sep = key.find('>', start);
    std::string_view part = key.substr(start, sep == std::string_view::npos
                                                  ? std::string_view::npos
                                                  : sep - start);
    if (part.empty()) {
      throw Error(ErrorCode::kInvalidConfig, std::string(key),
                  "path has an empty hop");
    }
    path.hops.push_back({std::string(part), {}});
    if (sep == std::string_view::npos) break;
    start = sep + 1;
  }
  return path;
}

std::vector<ServicePath> ExtractPaths(const SpanTree& tree) {
  std::vector<ServicePath> out;
  if (tree.spans.empty()) return out;

  // Iterative DFS keeping the current root-to-node chain of hops.
  struct Frame {
    std::size_t span;
    std::size_t next_child = 0;
    bool pushed_hop = false;
  };
  std::vector<Frame> stack;
  std::vector<Hop> chain;

  auto enter = [&](std::size_t idx) {
    const Span& s = tree.spans[idx];
    Frame f{idx};
    if (chain.empty() || chain.back().service != s.service) {
      chain.push_back({s.service, s.endpoint});
      f.pushed_hop = true;
    }
    stack.push_back(f);
  };

  enter(tree.root);
  while (!stack.empty()) {
    Frame& top = stack.back();
    const auto& kids = tree.children[top.span];
    if (kids.empty()) {
      out.push_back({chain});
    }
    if (top.next_child < kids.size()) {
      enter(kids[top.next_child++]);
      continue;
    }
    if (top.pushed_hop) chain.pop_back();
    stack.pop_back();
  }
  return out;
}

namespace {

bool IsInteger(const json& v) {
  return v.is_number_integer();
}

}  // namespace

std::optional<Span> ParseSpanLine(std::string_view line) {
  json rec = json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (!rec.is_object()) return std::nullopt;

  auto str = [&](const char* key) -> const json* {
    auto it = rec.find(key);
    return it != rec.end() && it->is_string() ? &*it : nullptr;
  };
  const json* trace_id = str("trace_id");
  const json* span_id = str("span_id");
  const json* service = str("service");
  const json* endpoint = str("endpoint");
  const json* status = str("status");
  auto start = rec.find("start_time");
  auto duration = rec.find("duration");
  if (!trace_id || !span_id || !service || !endpoint || !status ||
      start == rec.end() || !IsInteger(*start) || duration == rec.end() ||
      !IsInteger(*duration)) {
    return std::nullopt;
  }

  Span span;
  span.trace_id = trace_id->get<std::string>();
  span.span_id = span_id->get<std::string>();
  span.service = service->get<std::string>();
  span.endpoint = endpoint->get<std::string>();
  span.start_time = start->get<std::int64_t>();
  span.duration = duration->get<std::int64_t>();
  const auto& st = status->get_ref<const std::string&>();
  if (st == "ok") {
    span.status = SpanStatus::kOk;
  } else if (st == "error") {
    span.status = SpanStatus::kError;
  } else {
    return std::nullopt;
  }
  if (span.trace_id.empty() || span.span_id.empty() || span.service.empty()) {
    return std::nullopt;
  }
  if (auto parent = rec.find("parent_span_id"); parent != rec.end()) {
    if (parent->is_string()) {
      span.parent_span_id = parent->get<std::string>();
    } else if (!parent->is_null()) {
      return std::nullopt;
    }
  }
  return span;
}

json SpanToJson(const Span& span) {
  json j = {{"trace_id", span.trace_id},
            {"span_id", span.span_id},
            {"service", span.service},
            {"endpoint", span.endpoint},
            {"start_time", span.start_time},
            {"duration", span.duration},
            {"status", span.status == SpanStatus::kOk ? "ok" : "error"}};
  if (span.parent_span_id) j["parent_span_id"] = *span.parent_span_id;
  return j;
}

namespace {

bool SpanOrder(const Span& l, const Span& r) {
  return std::tie(l.start_time, l.span_id) < std::tie(r.start_time, r.span_id);
}

// Builds a tree out of one trace's spans. Returns nullopt unless exactly one
// root survives orphan removal.
std::optional<SpanTree> MakeTree(std::vector<Span> spans, IngestReport& report) {
  std::sort(spans.begin(), spans.end(), SpanOrder);

  // Drop duplicate span ids (first in sorted order wins).
  {
    std::unordered_set<std::string> seen;
    std::vector<Span> unique;
    unique.reserve(spans.size());
    for (auto& s : spans) {
      if (seen.insert(s.span_id).second) {
        unique.push_back(std::move(s));
      } else {
        ++report.malformed_count;
      }
    }
    spans = std::move(unique);
  }

  // Iteratively remove spans whose parent is unresolvable; removing one can
  // orphan its descendants.
  while (true) {
    std::unordered_set<std::string> ids;
    for (const auto& s : spans) ids.insert(s.span_id);
    const auto before = spans.size();
    std::erase_if(spans, [&](const Span& s) {
      return s.parent_span_id && !ids.contains(*s.parent_span_id);
    });
    report.orphan_count += before - spans.size();
    if (spans.size() == before) break;
  }

  std::size_t roots = 0;
  SpanTree tree;
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < spans.size(); ++i) {
    index[spans[i].span_id] = i;
    if (!spans[i].parent_span_id) {
      ++roots;
      tree.root = i;
    }
  }
  if (roots != 1) return std::nullopt;

  tree.children.assign(spans.size(), {});
  // Spans are already in (start_time, span_id) order, so children inherit it.
  for (std::size_t i = 0; i < spans.size(); ++i) {
    if (spans[i].parent_span_id) {
      tree.children[index.at(*spans[i].parent_span_id)].push_back(i);
    }
  }

  // A cycle through parent links leaves spans unreachable from the root.
  std::vector<bool> reached(spans.size(), false);
  std::vector<std::size_t> todo{tree.root};
  std::size_t reached_count = 0;
  while (!todo.empty()) {
    const std::size_t i = todo.back();
    todo.pop_back();
    if (reached[i]) continue;
    reached[i] = true;
    ++reached_count;
    for (std::size_t c : tree.children[i]) todo.push_back(c);
  }
  if (reached_count != spans.size()) return std::nullopt;

  tree.spans = std::move(spans);
  return tree;
}

}  // namespace

TraceSet BuildTraceSet(std::vector<Span> spans, std::uint64_t malformed_count) {
  TraceSet set;
  set.report.malformed_count = malformed_count;

  std::map<std::string, std::vector<Span>> grouped;
  for (auto& s : spans) grouped[s.trace_id].push_back(std::move(s));

  for (auto& [trace_id, group] : grouped) {
    auto tree = MakeTree(std::move(group), set.report);
    if (!tree) {
      ++set.report.skipped_traces;
      continue;
    }
    Trace trace{trace_id, std::move(*tree), {}};
    trace.paths = ExtractPaths(trace.tree);
    set.paths.insert(set.paths.end(), trace.paths.begin(), trace.paths.end());
    set.traces.emplace(trace_id, std::move(trace));
  }
  set.report.traces = set.traces.size();
  set.report.paths = set.paths.size();
  return set;
}

ParsedSpans ParseSpanLines(std::string_view text) {
  ParsedSpans out;
  bool any_line = false;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    any_line = true;
    if (auto span = ParseSpanLine(line)) {
      out.spans.push_back(std::move(*span));
    } else {
      ++out.malformed_count;
    }
  }
  if (!any_line) {
    throw Error(ErrorCode::kEmptyInput, {}, "trace input has no records");
  }
  return out;
}

TraceSet ParseTraces(std::string_view text) {
  ParsedSpans parsed = ParseSpanLines(text);
  return BuildTraceSet(std::move(parsed.spans), parsed.malformed_count);
}

TraceSet LoadTraceFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, path, "cannot open trace file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return ParseTraces(buf.str());
}

}  // namespace msvis
