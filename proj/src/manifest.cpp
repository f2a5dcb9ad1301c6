#include "msvis/manifest.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

#include "msvis/error.hpp"

namespace msvis {

using nlohmann::json;

const EndpointDecl* ServiceDecl::FindEndpoint(std::string_view id) const {
  for (const auto& ep : endpoints) {
    if (ep.method.size() + 1 + ep.path.size() == id.size() && ep.id() == id) {
      return &ep;
    }
  }
  return nullptr;
}

const ServiceDecl* ServiceManifest::FindService(std::string_view name) const {
  for (const auto& svc : services) {
    if (svc.name == name) return &svc;
  }
  return nullptr;
}

namespace {

const std::set<std::string, std::less<>> kHttpVerbs = {
    "GET", "POST", "PUT", "DELETE", "PATCH", "HEAD", "OPTIONS"};

[[noreturn]] void SchemaFail(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::kSchemaError, {}, what, path);
}

std::string Index(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

const json& Require(const json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) SchemaFail(path + "." + key, "missing required field");
  return *it;
}

std::string RequireString(const json& obj, const char* key,
                          const std::string& path) {
  const json& v = Require(obj, key, path);
  if (!v.is_string()) SchemaFail(path + "." + key, "expected string");
  return v.get<std::string>();
}

// Optional array field; absent means empty.
const json* OptionalArray(const json& obj, const char* key,
                          const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return nullptr;
  if (!it->is_array()) SchemaFail(path + "." + key, "expected array");
  return &*it;
}

void RequireObject(const json& v, const std::string& path) {
  if (!v.is_object()) SchemaFail(path, "expected object");
}

std::vector<std::string> StringList(const json& obj, const char* key,
                                    const std::string& path) {
  std::vector<std::string> out;
  if (const json* arr = OptionalArray(obj, key, path)) {
    for (std::size_t i = 0; i < arr->size(); ++i) {
      if (!(*arr)[i].is_string()) {
        SchemaFail(Index(path + "." + key, i), "expected string");
      }
      out.push_back((*arr)[i].get<std::string>());
    }
  }
  return out;
}

FunctionStep ParseStep(const json& v, const std::string& path) {
  RequireObject(v, path);
  FunctionStep step;
  const json& seq = Require(v, "seq", path);
  if (!seq.is_number_integer()) SchemaFail(path + ".seq", "expected integer");
  step.seq = seq.get<int>();
  step.function = RequireString(v, "function", path);
  step.calls = StringList(v, "calls", path);
  return step;
}

EndpointDecl ParseEndpoint(const json& v, const std::string& path) {
  RequireObject(v, path);
  EndpointDecl ep;
  ep.method = RequireString(v, "method", path);
  ep.path = RequireString(v, "path", path);
  if (const json* calls = OptionalArray(v, "calls", path)) {
    for (std::size_t i = 0; i < calls->size(); ++i) {
      const std::string p = Index(path + ".calls", i);
      RequireObject((*calls)[i], p);
      ep.calls.push_back({RequireString((*calls)[i], "service", p),
                          RequireString((*calls)[i], "endpoint", p)});
    }
  }
  if (const json* flow = OptionalArray(v, "flow", path)) {
    for (std::size_t i = 0; i < flow->size(); ++i) {
      ep.flow.push_back(ParseStep((*flow)[i], Index(path + ".flow", i)));
    }
  }
  return ep;
}

ServiceDecl ParseService(const json& v, const std::string& path) {
  RequireObject(v, path);
  ServiceDecl svc;
  svc.name = RequireString(v, "name", path);
  svc.base_route = RequireString(v, "base_route", path);
  if (auto it = v.find("controller"); it != v.end() && !it->is_null()) {
    if (!it->is_string()) SchemaFail(path + ".controller", "expected string");
    svc.controller = it->get<std::string>();
  }
  svc.functions = StringList(v, "functions", path);
  if (const json* eps = OptionalArray(v, "endpoints", path)) {
    for (std::size_t i = 0; i < eps->size(); ++i) {
      svc.endpoints.push_back(
          ParseEndpoint((*eps)[i], Index(path + ".endpoints", i)));
    }
  }
  return svc;
}

}  // namespace

void ValidateManifest(const ServiceManifest& manifest) {
  std::unordered_set<std::string> names;
  for (std::size_t s = 0; s < manifest.services.size(); ++s) {
    const auto& svc = manifest.services[s];
    const std::string sp = Index("$.services", s);
    if (svc.name.empty()) SchemaFail(sp + ".name", "empty service name");
    if (!names.insert(svc.name).second) {
      throw Error(ErrorCode::kDuplicateService, svc.name,
                  "service declared more than once", sp + ".name");
    }
    if (svc.base_route.empty() || svc.base_route.front() != '/') {
      throw Error(ErrorCode::kBadRoute, svc.base_route,
                  "base route must start with '/'", sp + ".base_route");
    }
    if (svc.controller && svc.controller->empty()) {
      SchemaFail(sp + ".controller", "empty controller key");
    }

    std::unordered_set<std::string> functions;
    for (std::size_t f = 0; f < svc.functions.size(); ++f) {
      if (!functions.insert(svc.functions[f]).second) {
        SchemaFail(Index(sp + ".functions", f),
                   "duplicate function '" + svc.functions[f] + "'");
      }
    }

    std::unordered_set<std::string> endpoint_ids;
    for (std::size_t e = 0; e < svc.endpoints.size(); ++e) {
      const auto& ep = svc.endpoints[e];
      const std::string ep_path = Index(sp + ".endpoints", e);
      if (!kHttpVerbs.contains(ep.method)) {
        SchemaFail(ep_path + ".method", "not an HTTP verb: '" + ep.method + "'");
      }
      if (ep.path.empty() || ep.path.front() != '/') {
        SchemaFail(ep_path + ".path", "endpoint path must start with '/'");
      }
      if (!endpoint_ids.insert(ep.id()).second) {
        SchemaFail(ep_path, "duplicate endpoint '" + ep.id() + "'");
      }
      int expected_min = 1;
      for (std::size_t k = 0; k < ep.flow.size(); ++k) {
        const auto& step = ep.flow[k];
        const std::string fp = Index(ep_path + ".flow", k);
        if (k == 0 ? step.seq != 1 : step.seq < expected_min) {
          SchemaFail(fp + ".seq",
                     "flow sequence numbers must increase strictly from 1");
        }
        expected_min = step.seq + 1;
        if (!functions.contains(step.function)) {
          SchemaFail(fp + ".function", "unknown function '" + step.function + "'");
        }
        for (std::size_t c = 0; c < step.calls.size(); ++c) {
          if (!functions.contains(step.calls[c])) {
            SchemaFail(Index(fp + ".calls", c),
                       "unknown function '" + step.calls[c] + "'");
          }
        }
      }
    }
  }

  for (std::size_t s = 0; s < manifest.services.size(); ++s) {
    const auto& svc = manifest.services[s];
    for (std::size_t e = 0; e < svc.endpoints.size(); ++e) {
      const auto& calls = svc.endpoints[e].calls;
      for (std::size_t c = 0; c < calls.size(); ++c) {
        if (!names.contains(calls[c].service)) {
          throw Error(ErrorCode::kDanglingCallTarget, calls[c].service,
                      "call targets an undeclared service",
                      Index(Index(Index("$.services", s) + ".endpoints", e) +
                                ".calls",
                            c) +
                          ".service");
        }
      }
    }
  }
}

ServiceManifest ParseManifest(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    SchemaFail("$", std::string("invalid JSON: ") + e.what());
  }
  RequireObject(doc, "$");
  ServiceManifest manifest;
  manifest.system_name = RequireString(doc, "system_name", "$");
  const json& services = Require(doc, "services", "$");
  if (!services.is_array()) SchemaFail("$.services", "expected array");
  for (std::size_t i = 0; i < services.size(); ++i) {
    manifest.services.push_back(ParseService(services[i], Index("$.services", i)));
  }
  ValidateManifest(manifest);
  return manifest;
}

ServiceManifest LoadManifestFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, path, "cannot open manifest file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return ParseManifest(buf.str());
}

json ManifestToJson(const ServiceManifest& manifest) {
  json services = json::array();
  for (const auto& svc : manifest.services) {
    json endpoints = json::array();
    for (const auto& ep : svc.endpoints) {
      json calls = json::array();
      for (const auto& c : ep.calls) {
        calls.push_back({{"service", c.service}, {"endpoint", c.endpoint}});
      }
      json flow = json::array();
      for (const auto& step : ep.flow) {
        flow.push_back(
            {{"seq", step.seq}, {"function", step.function}, {"calls", step.calls}});
      }
      endpoints.push_back({{"method", ep.method},
                           {"path", ep.path},
                           {"calls", std::move(calls)},
                           {"flow", std::move(flow)}});
    }
    json s = {{"name", svc.name},
              {"base_route", svc.base_route},
              {"functions", svc.functions},
              {"endpoints", std::move(endpoints)}};
    if (svc.controller) s["controller"] = *svc.controller;
    services.push_back(std::move(s));
  }
  return {{"system_name", manifest.system_name}, {"services", std::move(services)}};
}

}  // namespace msvis
