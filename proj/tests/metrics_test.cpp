#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "msvis/graph.hpp"
#include "msvis/metrics.hpp"
#include "msvis/serialize.hpp"
#include "test_support.hpp"

using namespace msvis;
using msvis::testing::ChainTrace;

namespace {

TraceSet FixtureTraces() {
  return LoadTraceFile(testing::FixturePath("trainticket_traces.jsonl"));
}

std::vector<std::pair<std::string, std::uint64_t>> Flatten(const RankedPaths& r) {
  std::vector<std::pair<std::string, std::uint64_t>> out;
  for (const auto& e : r.entries) out.emplace_back(e.path.key(), e.score);
  return out;
}

}  // namespace

TEST_CASE("metric names") {
  for (Metric m : {Metric::kPathHits, Metric::kPathLength, Metric::kServiceDependency}) {
    CHECK(ParseMetric(ToString(m)) == m);
  }
  CHECK_FALSE(ParseMetric("popularity"));
}

TEST_CASE("path hits small example") {
  std::string text;
  for (int i = 0; i < 3; ++i) text += ChainTrace("ab" + std::to_string(i), {"A", "B"});
  text += ChainTrace("ac", {"A", "C"});
  auto r = PathHits(ParseTraces(text));
  using Row = std::pair<std::string, std::uint64_t>;
  CHECK(Flatten(r) == std::vector<Row>{{"A>B", 3}, {"A>C", 1}});
}

TEST_CASE("empty trace set ranks nothing") {
  CHECK(PathHits(TraceSet{}).entries.empty());
  CHECK(PathLengthRank(TraceSet{}).entries.empty());
}

TEST_CASE("path hits equal the frozen group-and-count oracle") {
  const auto oracle = nlohmann::json::parse(
      testing::ReadFile(testing::FixturePath("trainticket_path_hits.oracle.json")));
  std::vector<std::pair<std::string, std::uint64_t>> expected;
  for (const auto& e : oracle["entries"]) {
    expected.emplace_back(e["key"].get<std::string>(), e["score"].get<std::uint64_t>());
  }
  const auto traces = FixtureTraces();
  const auto actual = Flatten(PathHits(traces));
  CHECK(actual.size() == 255);
  CHECK(actual == expected);

  std::uint64_t sum = 0;
  for (const auto& [k, s] : actual) sum += s;
  CHECK(sum == traces.paths.size());
  CHECK(sum == 2609);
}

TEST_CASE("path length scores hop count") {
  auto r = PathLengthRank(ParseTraces(ChainTrace("t", {"S2", "S1", "S4", "S6"}) +
                                      ChainTrace("u", {"S3"})));
  using Row = std::pair<std::string, std::uint64_t>;
  CHECK(Flatten(r) == std::vector<Row>{{"S2>S1>S4>S6", 4}, {"S3", 1}});
}

TEST_CASE("path length order matches a brute-force sort") {
  const auto traces = FixtureTraces();
  std::set<std::string> keys;
  for (const auto& p : traces.paths) keys.insert(p.key());
  std::vector<std::pair<std::string, std::uint64_t>> expected;
  for (const auto& k : keys) {
    expected.emplace_back(k, 1 + std::count(k.begin(), k.end(), '>'));
  }
  std::stable_sort(expected.begin(), expected.end(),
                   [](const auto& l, const auto& r) { return l.second > r.second; });
  CHECK(Flatten(PathLengthRank(traces)) == expected);
}

TEST_CASE("path length is invariant under trace duplication") {
  const std::string text = testing::ReadFile(testing::FixturePath("trainticket_traces.jsonl"));
  std::string doubled = text;
  // Second copy under fresh trace ids.
  for (const auto& span : ParseSpanLines(text).spans) {
    Span s = span;
    s.trace_id += "-copy";
    doubled += SpanToJson(s).dump() + "\n";
  }
  auto twice = ParseTraces(doubled);
  CHECK(twice.traces.size() == 2000);
  CHECK(Flatten(PathLengthRank(twice)) == Flatten(PathLengthRank(ParseTraces(text))));
}

TEST_CASE("service dependency rank") {
  SUBCASE("star") {
    testing::ManifestBuilder b;
    b.Service("H", "/h");
    for (int i = 0; i < 5; ++i) {
      b.Service("c" + std::to_string(i), "/c").Call("c" + std::to_string(i), "H");
    }
    auto r = ServiceDependencyRank(BuildGraph(b.Build(), GraphLevel::kService));
    CHECK(r.entries.front() == DependencyRankEntry{"H", 5});
  }
  SUBCASE("isolated") {
    auto m = testing::ManifestBuilder().Service("b", "/b").Service("a", "/a").Service("c", "/c").Build();
    auto r = ServiceDependencyRank(BuildGraph(m, GraphLevel::kService));
    CHECK(r.entries == std::vector<DependencyRankEntry>{{"a", 0}, {"b", 0}, {"c", 0}});
  }
  SUBCASE("fixture matches a raw call-list scan") {
    const auto m = testing::TrainTicket();
    std::map<std::string, std::set<std::string>> callers;
    for (const auto& s : m.services) {
      callers[s.name];
      for (const auto& ep : s.endpoints) {
        for (const auto& c : ep.calls) {
          if (c.service != s.name) callers[c.service].insert(s.name);
        }
      }
    }
    std::vector<DependencyRankEntry> expected;
    for (const auto& [id, set] : callers) expected.push_back({id, set.size()});
    std::stable_sort(expected.begin(), expected.end(),
                     [](const auto& l, const auto& r) { return l.dependents > r.dependents; });
    CHECK(ServiceDependencyRank(BuildGraph(m, GraphLevel::kService)).entries == expected);
  }
}

TEST_CASE("ranking JSON") {
  const auto r = PathHits(FixtureTraces());
  const auto j = ToJson(r, 3);
  CHECK(j["metric"] == "path-hits");
  REQUIRE(j["entries"].size() == 3);
  CHECK(j["entries"][0]["rank"] == 1);
  CHECK(j["entries"][0]["key"] == "ts-preserve-service>ts-assurance-service");
  CHECK(j["entries"][0]["score"] == 134);
  CHECK(ToJson(r)["entries"].size() == 255);
}
