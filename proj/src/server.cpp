#include "msvis/server.hpp"

#include <chrono>
#include <charconv>
#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>

#include "msvis/error.hpp"
#include "msvis/layout.hpp"
#include "msvis/serialize.hpp"

namespace msvis {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Registry

std::shared_ptr<Registry::Entry> Registry::Find(const std::string& system_id) const {
  std::shared_lock lock(mu_);
  auto it = systems_.find(system_id);
  if (it == systems_.end()) {
    throw Error(ErrorCode::kUnknownSystem, system_id, "no such system");
  }
  return it->second;
}

std::string Registry::AddSystem(ServiceManifest manifest) {
  auto snapshot = api::SystemSnapshot::Create(std::move(manifest));
  auto entry = std::make_shared<Entry>();
  entry->snapshot = snapshot;
  std::unique_lock lock(mu_);
  if (!systems_.emplace(snapshot->system_id, entry).second) {
    throw Error(ErrorCode::kDuplicateSystem, snapshot->system_id,
                "system already registered");
  }
  return snapshot->system_id;
}

std::shared_ptr<const api::SystemSnapshot> Registry::Get(
    const std::string& system_id) const {
  auto entry = Find(system_id);
  std::lock_guard lock(entry->ptr_mu);
  return entry->snapshot;
}

std::vector<std::shared_ptr<const api::SystemSnapshot>> Registry::List() const {
  std::vector<std::shared_ptr<Entry>> entries;
  {
    std::shared_lock lock(mu_);
    for (const auto& [id, e] : systems_) entries.push_back(e);
  }
  std::vector<std::shared_ptr<const api::SystemSnapshot>> out;
  for (const auto& e : entries) {
    std::lock_guard lock(e->ptr_mu);
    out.push_back(e->snapshot);
  }
  return out;
}

IngestReport Registry::IngestTraces(const std::string& system_id,
                                    std::string_view jsonl) {
  auto entry = Find(system_id);
  const ParsedSpans batch = ParseSpanLines(jsonl);
  std::lock_guard write(entry->write_mu);
  std::shared_ptr<const api::SystemSnapshot> current;
  {
    std::lock_guard lock(entry->ptr_mu);
    current = entry->snapshot;
  }
  IngestReport report;
  auto next = current->WithSpans(batch, &report);
  std::lock_guard lock(entry->ptr_mu);
  entry->snapshot = std::move(next);
  return report;
}

std::string Registry::CreateSimulation(const std::string& system_id,
                                       const SimulationConfig& config) {
  auto entry = Find(system_id);
  std::lock_guard write(entry->write_mu);
  std::shared_ptr<const api::SystemSnapshot> snapshot;
  std::string sim_id;
  {
    std::lock_guard lock(entry->ptr_mu);
    snapshot = entry->snapshot;
    sim_id = "sim-" + std::to_string(entry->next_sim);
  }
  auto run = std::make_shared<const SimulationRun>(
      api::PlanAndRun(*snapshot, config, sim_id));
  std::lock_guard lock(entry->ptr_mu);
  ++entry->next_sim;
  entry->simulations.emplace(sim_id, std::move(run));
  return sim_id;
}

std::shared_ptr<const SimulationRun> Registry::GetSimulation(
    const std::string& system_id, const std::string& sim_id) const {
  auto entry = Find(system_id);
  std::lock_guard lock(entry->ptr_mu);
  auto it = entry->simulations.find(sim_id);
  if (it == entry->simulations.end()) {
    throw Error(ErrorCode::kUnknownSimulation, sim_id, "no such simulation");
  }
  return it->second;
}

json Registry::SaveSnapshot() const {
  json systems = json::array();
  for (const auto& s : List()) {
    json spans = json::array();
    for (const auto& span : s->spans) spans.push_back(SpanToJson(span));
    systems.push_back({{"manifest", ManifestToJson(s->manifest)},
                       {"spans", std::move(spans)},
                       {"malformed_total", s->malformed_total}});
  }
  return {{"systems", std::move(systems)}};
}

void Registry::LoadSnapshot(const json& doc) {
  for (const auto& sys : doc.at("systems")) {
    const std::string id = AddSystem(ParseManifest(sys.at("manifest").dump()));
    ParsedSpans batch;
    for (const auto& span : sys.at("spans")) {
      if (auto parsed = ParseSpanLine(span.dump())) batch.spans.push_back(*parsed);
    }
    batch.malformed_count = sys.value("malformed_total", std::uint64_t{0});
    if (batch.spans.empty() && batch.malformed_count == 0) continue;
    auto entry = Find(id);
    auto next = entry->snapshot->WithSpans(batch, nullptr);
    std::lock_guard lock(entry->ptr_mu);
    entry->snapshot = std::move(next);
  }
}

// ---------------------------------------------------------------------------
// HTTP

namespace {

int HttpStatus(const std::exception& e) {
  const auto* err = dynamic_cast<const Error*>(&e);
  if (!err) return 500;
  switch (err->code()) {
    case ErrorCode::kSchemaError:
    case ErrorCode::kDuplicateService:
    case ErrorCode::kDanglingCallTarget:
    case ErrorCode::kBadRoute:
    case ErrorCode::kEmptyInput:
    case ErrorCode::kIoError:
      return 400;
    case ErrorCode::kDuplicateSystem:
      return 409;
    case ErrorCode::kUnknownService:
    case ErrorCode::kUnknownEndpoint:
    case ErrorCode::kUnknownNode:
    case ErrorCode::kUnknownTrace:
    case ErrorCode::kUnknownSystem:
    case ErrorCode::kUnknownSimulation:
      return 404;
    case ErrorCode::kPathNotInGraph:
    case ErrorCode::kInvalidConfig:
    case ErrorCode::kEmptyTraceSet:
    case ErrorCode::kEmptyView:
      return 422;
  }
  return 500;
}

constexpr const char* kJson = "application/json";

void Reply(httplib::Response& res, int status, const std::string& body) {
  res.status = status;
  res.set_content(body, kJson);
}

void Fail(httplib::Response& res, int status, const std::string& code,
          const std::string& message) {
  Reply(res, status, Render({{"error", code}, {"message", message}}));
}

// Runs `fn` mapping msvis errors to their HTTP status with a JSON body.
template <typename Fn>
void Guard(httplib::Response& res, Fn&& fn) {
  try {
    fn();
  } catch (const json::exception& e) {
    Fail(res, 400, "BadRequest", e.what());
  } catch (const std::exception& e) {
    Reply(res, HttpStatus(e), Render(api::ErrorJson(e)));
  }
}

std::optional<std::uint64_t> ParseUnsigned(const std::string& text) {
  std::uint64_t v = 0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || text.empty()) return std::nullopt;
  return v;
}

// Reads an unsigned query parameter; sets a 400 reply and returns false when
// it is malformed.
bool QueryUnsigned(const httplib::Request& req, httplib::Response& res,
                   const char* name, std::optional<std::uint64_t>& out) {
  if (!req.has_param(name)) return true;
  out = ParseUnsigned(req.get_param_value(name));
  if (!out) {
    Fail(res, 400, "BadRequest", std::string(name) + " must be a non-negative integer");
    return false;
  }
  return true;
}

std::string SseFrame(const char* event, const json& data) {
  return std::string("event: ") + event + "\ndata: " + data.dump() + "\n\n";
}

}  // namespace

Server::Server(ServerOptions options)
    : options_(std::move(options)), http_(std::make_unique<httplib::Server>()) {
  Routes();
}

Server::~Server() { Stop(); }

void Server::Restore() {
  if (!options_.snapshot_path) return;
  std::ifstream in(*options_.snapshot_path);
  if (!in) return;
  registry_.LoadSnapshot(json::parse(in));
}

void Server::Persist() const {
  if (!options_.snapshot_path) return;
  std::ofstream out(*options_.snapshot_path, std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::kIoError, *options_.snapshot_path,
                "cannot write snapshot file");
  }
  out << Render(registry_.SaveSnapshot());
}

bool Server::Bind() {
  if (options_.port == 0) {
    port_ = http_->bind_to_any_port(options_.host);
    return port_ > 0;
  }
  if (!http_->bind_to_port(options_.host, options_.port)) return false;
  port_ = options_.port;
  return true;
}

bool Server::Run() { return http_->listen_after_bind(); }

void Server::Stop() {
  stopping_ = true;
  if (http_) http_->stop();
}

void Server::Routes() {
  auto& svr = *http_;

  if (options_.ui_origin) {
    const std::string origin = *options_.ui_origin;
    svr.set_post_routing_handler([origin](const httplib::Request&, httplib::Response& res) {
      res.set_header("Access-Control-Allow-Origin", origin);
    });
    svr.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) {
      res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
      res.set_header("Access-Control-Allow-Headers", "Content-Type");
      res.status = 204;
    });
  }

  svr.Get("/api/systems", [this](const httplib::Request&, httplib::Response& res) {
    json systems = json::array();
    for (const auto& s : registry_.List()) systems.push_back(api::SystemSummary(*s));
    Reply(res, 200, Render({{"systems", std::move(systems)}}));
  });

  svr.Post("/api/systems", [this](const httplib::Request& req, httplib::Response& res) {
    Guard(res, [&] {
      const std::string id = registry_.AddSystem(ParseManifest(req.body));
      Reply(res, 201, Render({{"system_id", id}}));
    });
  });

  svr.Get(R"(/api/systems/([^/]+))",
          [this](const httplib::Request& req, httplib::Response& res) {
            Guard(res, [&] {
              Reply(res, 200, Render(api::SystemSummary(*registry_.Get(req.matches[1]))));
            });
          });

  svr.Get(R"(/api/systems/([^/]+)/graph/([^/]+))",
          [this](const httplib::Request& req, httplib::Response& res) {
            Guard(res, [&] {
              auto snap = registry_.Get(req.matches[1]);
              auto level = api::ParseLevel(req.matches[2].str());
              if (!level) return Fail(res, 404, "UnknownLevel", "level must be system or service");
              const auto& g = *level == GraphLevel::kSystem ? snap->system_graph
                                                            : snap->service_graph;
              Reply(res, 200, Render(ToJson(g)));
            });
          });

  svr.Post(R"(/api/systems/([^/]+)/traces)",
           [this](const httplib::Request& req, httplib::Response& res) {
             Guard(res, [&] {
               const IngestReport report = registry_.IngestTraces(req.matches[1], req.body);
               Reply(res, 200, Render(ToJson(report)));
             });
           });

  svr.Get(R"(/api/systems/([^/]+)/views/function/(.+))",
          [this](const httplib::Request& req, httplib::Response& res) {
            Guard(res, [&] {
              auto snap = registry_.Get(req.matches[1]);
              std::optional<std::string> endpoint;
              if (req.has_param("endpoint")) endpoint = req.get_param_value("endpoint");
              Reply(res, 200, api::FunctionViewBody(*snap, req.matches[2], endpoint));
            });
          });

  svr.Get(R"(/api/systems/([^/]+)/views/([^/]+))",
          [this](const httplib::Request& req, httplib::Response& res) {
            Guard(res, [&] {
              auto snap = registry_.Get(req.matches[1]);
              auto level = api::ParseLevel(req.matches[2].str());
              if (!level) return Fail(res, 404, "UnknownLevel", "level must be system, service or function");
              std::optional<std::uint64_t> seed;
              if (!QueryUnsigned(req, res, "layout_seed", seed)) return;
              Reply(res, 200, api::ViewBody(*snap, *level, seed.value_or(kDefaultLayoutSeed)));
            });
          });

  svr.Get(R"(/api/systems/([^/]+)/filter/node/(.+))",
          [this](const httplib::Request& req, httplib::Response& res) {
            Guard(res, [&] {
              auto snap = registry_.Get(req.matches[1]);
              auto level = api::ParseLevel(
                  req.has_param("level") ? req.get_param_value("level") : "service");
              if (!level) return Fail(res, 400, "BadRequest", "level must be system or service");
              std::optional<std::uint64_t> seed;
              if (!QueryUnsigned(req, res, "layout_seed", seed)) return;
              Reply(res, 200,
                    api::NodeFilterBody(*snap, *level, req.matches[2],
                                        seed.value_or(kDefaultLayoutSeed)));
            });
          });

  svr.Get(R"(/api/systems/([^/]+)/filter/path)",
          [this](const httplib::Request& req, httplib::Response& res) {
            Guard(res, [&] {
              auto snap = registry_.Get(req.matches[1]);
              if (!req.has_param("path")) return Fail(res, 400, "BadRequest", "missing path query parameter");
              std::optional<std::uint64_t> seed;
              if (!QueryUnsigned(req, res, "layout_seed", seed)) return;
              Reply(res, 200,
                    api::PathFilterBody(*snap, req.get_param_value("path"),
                                        seed.value_or(kDefaultLayoutSeed)));
            });
          });

  svr.Get(R"(/api/systems/([^/]+)/metrics/([^/]+))",
          [this](const httplib::Request& req, httplib::Response& res) {
            Guard(res, [&] {
              auto snap = registry_.Get(req.matches[1]);
              auto metric = ParseMetric(req.matches[2].str());
              if (!metric) return Fail(res, 404, "UnknownMetric", "no such metric");
              std::optional<std::uint64_t> top;
              if (!QueryUnsigned(req, res, "top", top)) return;
              std::optional<std::size_t> limit;
              if (top) limit = static_cast<std::size_t>(*top);
              Reply(res, 200, api::MetricBody(*snap, *metric, limit));
            });
          });

  svr.Post(R"(/api/systems/([^/]+)/simulations)",
           [this](const httplib::Request& req, httplib::Response& res) {
             Guard(res, [&] {
               registry_.Get(req.matches[1]);
               const json body = json::parse(req.body, nullptr, false);
               if (body.is_discarded()) {
                 return Fail(res, 422, "InvalidConfig", "body is not JSON");
               }
               const std::string id =
                   registry_.CreateSimulation(req.matches[1], SimulationConfigFromJson(body));
               Reply(res, 201, Render({{"sim_id", id}}));
             });
           });

  svr.Get(R"(/api/systems/([^/]+)/simulations/([^/]+))",
          [this](const httplib::Request& req, httplib::Response& res) {
            Guard(res, [&] {
              auto run = registry_.GetSimulation(req.matches[1], req.matches[2]);
              Reply(res, 200, Render(ToJson(*run)));
            });
          });

  svr.Get(R"(/api/systems/([^/]+)/simulations/([^/]+)/events)",
          [this](const httplib::Request& req, httplib::Response& res) {
            std::shared_ptr<const SimulationRun> run;
            Guard(res, [&] { run = registry_.GetSimulation(req.matches[1], req.matches[2]); });
            if (!run) return;
            res.set_header("Cache-Control", "no-cache");
            res.set_chunked_content_provider(
                "text/event-stream",
                [this, run](std::size_t, httplib::DataSink& sink) {
                  const auto tick = std::chrono::milliseconds(run->config().tick_ms);
                  for (const auto& event : run->events()) {
                    // Sleep in slices so Stop() is not held up by slow ticks.
                    const auto until = std::chrono::steady_clock::now() + tick;
                    while (!stopping_ && std::chrono::steady_clock::now() < until) {
                      std::this_thread::sleep_for(
                          std::min<std::chrono::steady_clock::duration>(
                              std::chrono::milliseconds(20),
                              until - std::chrono::steady_clock::now()));
                    }
                    if (stopping_ || !sink.is_writable()) return false;
                    const std::string frame = SseFrame("sim", SimEventToJson(event));
                    if (!sink.write(frame.data(), frame.size())) return false;
                  }
                  const std::string end = SseFrame(
                      "state", {{"id", run->id()}, {"state", ToString(run->state())}});
                  sink.write(end.data(), end.size());
                  sink.done();
                  return true;
                });
          });
}

}  // namespace msvis
