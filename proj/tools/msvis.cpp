// msvis: batch access to the dependency-graph engine.
//
// Exit codes: 0 success, 1 domain error, 2 I/O or usage error.

#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <pthread.h>

#include <CLI11.hpp>

#include "msvis/api.hpp"
#include "msvis/error.hpp"
#include "msvis/layout.hpp"
#include "msvis/serialize.hpp"
#include "msvis/server.hpp"

namespace {

using msvis::Error;
using msvis::ErrorCode;

constexpr int kOk = 0;
constexpr int kDomainError = 1;
constexpr int kUsageError = 2;

int Report(const Error& e) {
  std::cerr << "error: " << e.what() << "\n";
  return e.code() == ErrorCode::kIoError ? kUsageError : kDomainError;
}

int Usage(const std::string& message) {
  std::cerr << "usage error: " << message << "\n";
  return kUsageError;
}

bool WriteOutput(const std::string& body, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << body;
    return static_cast<bool>(std::cout);
  }
  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  out << body;
  return static_cast<bool>(out);
}

std::shared_ptr<const msvis::api::SystemSnapshot> LoadSystem(
    const std::string& manifest_path, const std::string& traces_path) {
  auto snapshot = msvis::api::SystemSnapshot::Create(msvis::LoadManifestFile(manifest_path));
  if (traces_path.empty()) return snapshot;
  std::ifstream in(traces_path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, traces_path, "cannot open trace file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return snapshot->WithSpans(msvis::ParseSpanLines(buf.str()), nullptr);
}

void PrintTable(const nlohmann::json& ranking, const char* id_column) {
  const char* field = std::string_view(id_column) == "id" ? "id" : "key";
  std::size_t width = std::string_view(id_column).size();
  for (const auto& e : ranking["entries"]) {
    width = std::max(width, e[field].get_ref<const std::string&>().size());
  }
  std::cout << std::left << std::setw(6) << "rank" << std::setw(width + 2) << id_column
            << "score\n";
  for (const auto& e : ranking["entries"]) {
    std::cout << std::left << std::setw(6) << e["rank"].get<std::size_t>()
              << std::setw(width + 2) << e[field].get<std::string>()
              << e["score"].get<std::uint64_t>() << "\n";
  }
}

struct SimulateArgs {
  std::string manifest;
  std::string path;
  std::optional<std::string> mock;
  std::string traces;
  std::string trace_ref;
  std::vector<std::string> fail_nodes;
  std::vector<std::string> fail_edges;
  std::string fail_kind = "error";
  bool json = false;
};

int RunSimulate(const SimulateArgs& args) {
  if (args.path.empty() && args.traces.empty()) {
    return Usage("simulate needs --path (mock mode) or --traces (trace mode)");
  }
  msvis::SimulationConfig config;
  const auto kind = args.fail_kind == "timeout" ? msvis::FailureKind::kTimeout
                                                : msvis::FailureKind::kError;
  try {
    if (!args.path.empty()) {
      config.start_mode = msvis::StartMode::kMock;
      config.path = msvis::ServicePath::FromKey(args.path);
      config.mock_payload = args.mock;
    } else {
      config.start_mode = msvis::StartMode::kTrace;
      config.trace_ref = args.trace_ref.empty() ? std::string(msvis::kAutoTrace) : args.trace_ref;
    }
    for (const auto& n : args.fail_nodes) {
      config.failures.push_back(msvis::FailureSpec::Node(n, kind));
    }
    for (const auto& e : args.fail_edges) {
      const auto hop = msvis::ServicePath::FromKey(e);
      if (hop.size() != 2) return Usage("--fail-edge takes FROM>TO");
      config.failures.push_back(
          msvis::FailureSpec::Edge(hop.hops[0].service, hop.hops[1].service, kind));
    }
    auto snapshot = LoadSystem(args.manifest, args.path.empty() ? args.traces : "");
    const msvis::SimulationRun run = msvis::api::PlanAndRun(*snapshot, config, "sim-1");
    if (args.json) {
      std::cout << msvis::Render(msvis::ToJson(run));
    } else {
      std::cout << "path: " << run.resolved_path().key() << "\n";
      std::cout << std::left << std::setw(6) << "step" << std::setw(6) << "kind"
                << std::setw(40) << "subject" << std::setw(13) << "status"
                << "detail\n";
      for (const auto& e : run.events()) {
        std::cout << std::left << std::setw(6) << e.step << std::setw(6)
                  << msvis::ToString(e.subject_kind) << std::setw(40) << e.subject
                  << std::setw(13) << msvis::ToString(e.status) << e.detail << "\n";
      }
      std::cout << "state: " << msvis::ToString(run.state()) << "\n";
    }
    return run.state() == msvis::RunState::kFailed ? kDomainError : kOk;
  } catch (const Error& e) {
    return Report(e);
  }
}

int RunServe(const std::vector<std::string>& manifests, msvis::ServerOptions options) {
  // Signals are taken synchronously by a waiter thread, so every server
  // thread must inherit the blocked mask.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  msvis::Server server(options);
  try {
    server.Restore();
    for (const auto& path : manifests) {
      const std::string id = server.registry().AddSystem(msvis::LoadManifestFile(path));
      std::cerr << "loaded " << path << " as " << id << "\n";
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDomainError;
  } catch (const std::exception& e) {
    std::cerr << "error: cannot restore snapshot: " << e.what() << "\n";
    return kDomainError;
  }
  if (!server.Bind()) {
    std::cerr << "error: cannot bind " << options.host << ":" << options.port
              << " (port busy?)\n";
    return kDomainError;
  }
  std::cerr << "listening on http://" << options.host << ":" << server.port() << "\n";

  std::thread([&server, signals] {
    int sig = 0;
    sigwait(&signals, &sig);
    server.Stop();
  }).detach();

  server.Run();
  try {
    server.Persist();
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  }
  return kOk;
}

int DefaultPort() {
  if (const char* env = std::getenv("MSVIS_PORT")) {
    try {
      return std::stoi(env);
    } catch (const std::exception&) {
      std::cerr << "warning: ignoring invalid MSVIS_PORT\n";
    }
  }
  return msvis::kDefaultPort;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"msvis: microservice dependency graph explorer"};
  app.require_subcommand(1);

  std::string manifest_path;

  auto* validate = app.add_subcommand("validate", "Parse a manifest and report errors");
  validate->add_option("manifest", manifest_path, "Manifest JSON file")->required();

  std::string level = "service";
  std::uint64_t layout_seed = msvis::kDefaultLayoutSeed;
  std::string out_path;
  auto* view = app.add_subcommand("view", "Emit a view as JSON");
  view->add_option("manifest", manifest_path, "Manifest JSON file")->required();
  view->add_option("--level", level, "system or service")
      ->check(CLI::IsMember({"system", "service"}));
  view->add_option("--layout-seed", layout_seed, "Layout seed");
  view->add_option("-o,--output", out_path, "Write to file instead of stdout");

  std::string traces_path;
  std::string metric_name;
  std::optional<std::size_t> top;
  bool as_json = false;
  auto* metrics = app.add_subcommand("metrics", "Rank paths or services");
  metrics->add_option("manifest", manifest_path, "Manifest JSON file")->required();
  metrics->add_option("--traces", traces_path, "JSON Lines trace file");
  metrics->add_option("--metric", metric_name, "path-hits, path-length or service-dependency")
      ->required()
      ->check(CLI::IsMember({"path-hits", "path-length", "service-dependency"}));
  metrics->add_option("--top", top, "Keep the first K rows");
  metrics->add_flag("--json", as_json, "Emit the JSON report");

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Replay a path with failure injection");
  simulate->add_option("manifest", sim.manifest, "Manifest JSON file")->required();
  simulate->add_option("--path", sim.path, "Mock-mode path, e.g. A>B>C");
  simulate->add_option("--mock", sim.mock, "Mock payload for the first hop");
  simulate->add_option("--traces", sim.traces, "Trace file for trace mode");
  simulate->add_option("--trace", sim.trace_ref, "Trace id or auto");
  simulate->add_option("--fail-node", sim.fail_nodes, "Inject a node failure");
  simulate->add_option("--fail-edge", sim.fail_edges, "Inject an edge failure FROM>TO");
  simulate->add_option("--fail-kind", sim.fail_kind, "error or timeout")
      ->check(CLI::IsMember({"error", "timeout"}));
  simulate->add_flag("--json", sim.json, "Emit the run as JSON");

  std::vector<std::string> serve_manifests;
  msvis::ServerOptions serve_options;
  serve_options.port = DefaultPort();
  std::string ui_origin;
  std::string snapshot_path;
  auto* serve = app.add_subcommand("serve", "Run the HTTP server");
  serve->add_option("manifests", serve_manifests, "Manifests to preload");
  serve->add_option("--port", serve_options.port, "Port (env MSVIS_PORT, default 7400)");
  serve->add_option("--host", serve_options.host, "Bind address");
  serve->add_option("--ui-origin", ui_origin, "Allowed CORS origin for the web UI");
  serve->add_option("--snapshot", snapshot_path, "Snapshot file loaded at start, written on shutdown");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsageError;
  }

  if (*validate) {
    try {
      const auto manifest = msvis::LoadManifestFile(manifest_path);
      const auto graph = msvis::BuildGraph(manifest, msvis::GraphLevel::kSystem);
      std::cout << "ok: " << manifest.system_name << ": " << manifest.services.size()
                << " services, " << graph.controllers.size() << " controllers\n";
      return kOk;
    } catch (const Error& e) {
      return Report(e);
    }
  }

  if (*view) {
    try {
      auto snapshot = LoadSystem(manifest_path, "");
      const auto body = msvis::api::ViewBody(
          *snapshot, *msvis::api::ParseLevel(level), layout_seed);
      if (!WriteOutput(body, out_path)) {
        std::cerr << "error: cannot write " << out_path << "\n";
        return kUsageError;
      }
      return kOk;
    } catch (const Error& e) {
      return Report(e);
    }
  }

  if (*metrics) {
    const auto metric = *msvis::ParseMetric(metric_name);
    if (metric != msvis::Metric::kServiceDependency && traces_path.empty()) {
      return Usage("--metric " + metric_name + " needs --traces");
    }
    try {
      auto snapshot = LoadSystem(manifest_path, traces_path);
      const std::string body = msvis::api::MetricBody(*snapshot, metric, top);
      if (as_json) {
        std::cout << body;
      } else {
        PrintTable(nlohmann::json::parse(body),
                   metric == msvis::Metric::kServiceDependency ? "id" : "key");
      }
      return kOk;
    } catch (const Error& e) {
      return Report(e);
    }
  }

  if (*simulate) return RunSimulate(sim);

  if (*serve) {
    if (!ui_origin.empty()) serve_options.ui_origin = ui_origin;
    if (!snapshot_path.empty()) serve_options.snapshot_path = snapshot_path;
    return RunServe(serve_manifests, serve_options);
  }
  return kUsageError;
}
