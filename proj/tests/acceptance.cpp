// Acceptance run: one PASS/FAIL line per criterion; exit status is the number
// of failures.

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include <httplib.h>

#include "msvis/api.hpp"
#include "msvis/error.hpp"
#include "msvis/graph.hpp"
#include "msvis/layout.hpp"
#include "msvis/serialize.hpp"
#include "msvis/server.hpp"
#include "msvis/view.hpp"
#include "test_support.hpp"

using namespace msvis;
using nlohmann::json;

namespace {

struct Outcome {
  bool ok = true;
  std::ostringstream note;
};

// Records the first failing expectation.
#define EXPECT(cond)                                  \
  do {                                                \
    if (!(cond)) {                                    \
      if (out.ok) out.note << "expected: " #cond;     \
      out.ok = false;                                 \
    }                                                 \
  } while (0)

const std::string kTraces = testing::FixturePath("trainticket_traces.jsonl");

void ScaleCheck(Outcome& out) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto manifest = LoadManifestFile(testing::FixturePath("trainticket.json"));
  const auto traces = LoadTraceFile(kTraces);
  const auto graph = BuildGraph(manifest, GraphLevel::kService);
  auto view = ServiceView(graph);
  view.layout = Layout3d(view, kDefaultLayoutSeed);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  EXPECT(view.nodes.size() == 41);
  EXPECT(view.layout->positions.size() == 41);
  EXPECT(traces.traces.size() == 1000);
  EXPECT(secs < 2.0);
  out.note << (out.ok ? "" : "; ") << "41 nodes, " << secs << " s";
}

std::uint64_t SizeRule(unsigned x, unsigned y) {
  if (x == 0 && y == 0) return 1;
  if (x == 0) return y;
  if (y == 0) return x;
  unsigned __int128 p = 1;
  for (unsigned i = 0; i < y; ++i) p *= x;
  unsigned __int128 v = std::max<unsigned __int128>({p, x, y});
  return v > kNodeSizeCap ? kNodeSizeCap : static_cast<std::uint64_t>(v);
}

void SizeFormula(Outcome& out) {
  int agree = 0;
  for (unsigned x = 0; x <= 20; ++x) {
    for (unsigned y = 0; y <= 20; ++y) agree += NodeSize(x, y) == SizeRule(x, y);
  }
  EXPECT(agree == 441);
  out.note << (out.ok ? "" : "; ") << agree << "/441 agree";
}

void CrossLineRule(Outcome& out) {
  const std::pair<int, int> cases[] = {{1, 1}, {2, 2}, {3, 3}, {4, 0}, {10, 0}};
  for (auto [count, expected] : cases) {
    // One edge A->B carried by `count` endpoint pairs.
    testing::ManifestBuilder b;
    b.Service("A", "/a", count).Service("B", "/b", count);
    for (int i = 0; i < count; ++i) b.Call("A", "B", i, i);
    const auto g = BuildGraph(b.Build(), GraphLevel::kService);
    EXPECT(g.edges.size() == 1);
    EXPECT(g.edges[0].dependency_count == static_cast<std::uint64_t>(count));
    EXPECT(g.edges[0].cross_lines == expected);
    EXPECT(CrossLines(count) == expected);
  }
  out.note << (out.ok ? "" : "; ") << "counts 1,2,3,4,10 -> 1,2,3,0,0";
}

void PathHitsOracle(Outcome& out) {
  const auto oracle =
      json::parse(testing::ReadFile(testing::FixturePath("trainticket_path_hits.oracle.json")));
  const auto hits = PathHits(LoadTraceFile(kTraces));
  EXPECT(hits.entries.size() == oracle["entries"].size());
  std::size_t mismatches = 0;
  for (std::size_t i = 0; i < std::min(hits.entries.size(), oracle["entries"].size()); ++i) {
    const auto& o = oracle["entries"][i];
    if (hits.entries[i].path.key() != o["key"] || hits.entries[i].score != o["score"]) {
      ++mismatches;
    }
  }
  EXPECT(mismatches == 0);
  out.note << (out.ok ? "" : "; ") << hits.entries.size() << " keys, " << mismatches
           << " mismatches";
}

void PathFilterReproduction(Outcome& out) {
  const auto view = ServiceView(BuildGraph(testing::Figures(), GraphLevel::kService));
  const auto v = PathFilter(view, ServicePath::FromKey("S2>S1>S4>S6"));
  int marked = 0;
  for (const auto& n : v.nodes) marked += n.on_path;
  EXPECT(v.highlight.has_value());
  EXPECT(v.highlight->edges.size() == 3);
  EXPECT(marked == 4);
  EXPECT(v.nodes.size() == view.nodes.size());
  out.note << (out.ok ? "" : "; ") << v.highlight->edges.size() << " edges, " << marked
           << " path nodes, " << v.nodes.size() << "/" << view.nodes.size() << " nodes kept";
}

void SimulationPropagation(Outcome& out) {
  const auto g = BuildGraph(testing::TrainTicket(), GraphLevel::kService);
  const auto traces = LoadTraceFile(kTraces);
  std::vector<std::string> ids;
  for (const auto& [id, t] : traces.traces) ids.push_back(id);
  std::mt19937 rng(20221017);
  int violations = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::string& id = ids[rng() % ids.size()];
    const ServicePath& path = traces.traces.at(id).paths.front();
    std::vector<FailureSpec> failures;
    const auto kind = rng() % 2 ? FailureKind::kError : FailureKind::kTimeout;
    switch (rng() % 3) {
      case 0:
        failures.push_back(FailureSpec::Node(path.hops[rng() % path.size()].service, kind));
        break;
      case 1:
        if (path.size() > 1) {
          const std::size_t i = rng() % (path.size() - 1);
          failures.push_back(FailureSpec::Edge(path.hops[i].service, path.hops[i + 1].service, kind));
        }
        break;
      default:
        break;
    }
    SimulationConfig mock;
    mock.path = ServicePath::FromKey(path.key());
    mock.mock_payload = "{}";
    mock.failures = failures;
    SimulationConfig trace;
    trace.start_mode = StartMode::kTrace;
    trace.trace_ref = id;
    trace.failures = failures;
    const auto a = RunToCompletion(Plan(mock, g, traces));
    const auto b = RunToCompletion(Plan(trace, g, traces));

    int failed = 0;
    bool bad = a.resolved_path().key() != b.resolved_path().key() ||
               a.events().size() != b.events().size();
    for (std::size_t i = 0; !bad && i < a.events().size(); ++i) {
      const auto& e = a.events()[i];
      const auto& f = b.events()[i];
      if (e.step != f.step || e.subject_kind != f.subject_kind || e.subject != f.subject ||
          e.status != f.status) {
        bad = true;
      }
      if (failed && e.status != SimStatus::kNotReached) bad = true;
      failed += e.status == SimStatus::kFailed;
    }
    if (failed > 1) bad = true;
    violations += bad;
  }
  EXPECT(violations == 0);
  out.note << (out.ok ? "" : "; ") << "200 configurations, " << violations << " violations";
}

httplib::Result MustGet(httplib::Client& c, const std::string& path) {
  auto res = c.Get(path);
  if (!res) throw std::runtime_error("no response for " + path);
  return res;
}

// In-process server on an ephemeral port with both fixtures loaded.
class LiveServer {
 public:
  LiveServer() : server_(Options()) {
    server_.registry().AddSystem(testing::Figures());
    server_.registry().AddSystem(testing::TrainTicket());
    server_.registry().IngestTraces("trainticket", testing::ReadFile(kTraces));
    if (!server_.Bind()) throw std::runtime_error("cannot bind");
    thread_ = std::thread([this] { server_.Run(); });
    client_ = std::make_unique<httplib::Client>("127.0.0.1", server_.port());
    for (int i = 0; i < 200 && !client_->Get("/api/systems"); ++i) {
      std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
  }
  ~LiveServer() {
    server_.Stop();
    thread_.join();
  }
  httplib::Client& http() { return *client_; }

 private:
  static ServerOptions Options() {
    ServerOptions o;
    o.port = 0;
    return o;
  }
  Server server_;
  std::thread thread_;
  std::unique_ptr<httplib::Client> client_;
};

void Determinism(Outcome& out, LiveServer& live) {
  const auto view = ServiceView(BuildGraph(testing::TrainTicket(), GraphLevel::kService));
  const std::string a = Render(ToJson(Layout3d(view, 42)));
  const std::string b = Render(ToJson(Layout3d(view, 42)));
  EXPECT(a == b);

  auto created = live.http().Post(
      "/api/systems/figures/simulations",
      R"({"path": "S2>S1>S4>S6", "mock_payload": "{}", "tick": 0,
          "failures": [{"target": "node", "node": "S4"}]})",
      "application/json");
  EXPECT(created && created->status == 201);

  const std::vector<std::string> gets = {
      "/api/systems",
      "/api/systems/trainticket",
      "/api/systems/trainticket/graph/system",
      "/api/systems/trainticket/graph/service",
      "/api/systems/trainticket/views/system",
      "/api/systems/trainticket/views/service?layout_seed=7",
      "/api/systems/trainticket/views/function/ts-order-service",
      "/api/systems/trainticket/views/function/ts-order-service?endpoint=POST%20%2Forders",
      "/api/systems/trainticket/filter/node/ts-order-service",
      "/api/systems/figures/filter/node/%2Fc1?level=system",
      "/api/systems/figures/filter/path?path=S2%3ES1%3ES4%3ES6",
      "/api/systems/trainticket/metrics/path-hits",
      "/api/systems/trainticket/metrics/path-length?top=10",
      "/api/systems/trainticket/metrics/service-dependency",
      "/api/systems/figures/simulations/sim-1",
      "/api/systems/figures/simulations/sim-1/events",
      "/api/systems/nope",
  };
  int differing = 0;
  for (const auto& path : gets) {
    const auto r1 = MustGet(live.http(), path);
    const auto r2 = MustGet(live.http(), path);
    if (r1->status != r2->status || r1->body != r2->body) ++differing;
  }
  EXPECT(differing == 0);
  out.note << (out.ok ? "" : "; ") << "layout bytes equal, " << gets.size() << " GET endpoints, "
           << differing << " differing";
}

std::string RunCli(const std::string& args, int& code) {
  const std::string cmd = std::string("'") + MSVIS_CLI_PATH + "' " + args;
  FILE* pipe = popen(cmd.c_str(), "r");
  std::string text;
  if (!pipe) {
    code = -1;
    return text;
  }
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) text.append(buf, n);
  const int status = pclose(pipe);
  code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return text;
}

void CliServerParity(Outcome& out, LiveServer& live) {
  const std::string manifest = "'" + testing::FixturePath("trainticket.json") + "'";
  const std::string traces = "'" + kTraces + "'";
  int compared = 0;
  for (const char* metric : {"path-hits", "path-length", "service-dependency"}) {
    for (const char* top : {"", "5"}) {
      int code = 0;
      std::string args = std::string("metrics ") + manifest + " --traces " + traces +
                         " --metric " + metric + " --json";
      std::string query = std::string("/api/systems/trainticket/metrics/") + metric;
      if (*top) {
        args += std::string(" --top ") + top;
        query += std::string("?top=") + top;
      }
      const std::string cli = RunCli(args, code);
      const auto http = MustGet(live.http(), query);
      EXPECT(code == 0);
      EXPECT(http->status == 200);
      EXPECT(cli == http->body);
      ++compared;
    }
  }
  out.note << (out.ok ? "" : "; ") << compared << " metric outputs byte-identical";
}

int Report(const char* name, const std::function<void(Outcome&)>& check) {
  Outcome out;
  try {
    check(out);
  } catch (const std::exception& e) {
    out.ok = false;
    out.note << " threw: " << e.what();
  }
  std::cout << (out.ok ? "PASS " : "FAIL ") << name << ": " << out.note.str() << "\n";
  return out.ok ? 0 : 1;
}

}  // namespace

int main() {
  int failures = 0;
  failures += Report("scale check", ScaleCheck);
  failures += Report("size formula", SizeFormula);
  failures += Report("cross-line rule", CrossLineRule);
  failures += Report("path-hits oracle", PathHitsOracle);
  failures += Report("path filter reproduction", PathFilterReproduction);
  failures += Report("simulation propagation", SimulationPropagation);
  std::unique_ptr<LiveServer> live;
  try {
    live = std::make_unique<LiveServer>();
  } catch (const std::exception& e) {
    std::cerr << "server setup failed: " << e.what() << "\n";
  }
  auto with_server = [&](void (*fn)(Outcome&, LiveServer&)) {
    return [&, fn](Outcome& out) {
      if (!live) throw std::runtime_error("no server");
      fn(out, *live);
    };
  };
  failures += Report("determinism", with_server(Determinism));
  failures += Report("CLI/server parity", with_server(CliServerParity));
  std::cout << (failures ? "FAILED " : "ALL PASSED ") << "(" << 8 - failures << "/8)\n";
  return failures;
}
