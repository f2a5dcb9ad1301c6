#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace msvis {

struct CallDecl {
  std::string service;   // target service name
  std::string endpoint;  // target endpoint id, "METHOD /path"

  bool operator==(const CallDecl&) const = default;
};

// One step of an endpoint's internal function flow.
struct FunctionStep {
  int seq = 0;
  std::string function;
  std::vector<std::string> calls;

  bool operator==(const FunctionStep&) const = default;
};

struct EndpointDecl {
  std::string method;
  std::string path;
  std::vector<CallDecl> calls;
  std::vector<FunctionStep> flow;

  std::string id() const { return method + " " + path; }

  bool operator==(const EndpointDecl&) const = default;
};

struct ServiceDecl {
  std::string name;
  std::string base_route;
  // Explicit controller override; the base route is the key otherwise.
  std::optional<std::string> controller;
  std::vector<EndpointDecl> endpoints;
  std::vector<std::string> functions;

  const std::string& controller_key() const {
    return controller ? *controller : base_route;
  }
  const EndpointDecl* FindEndpoint(std::string_view id) const;

  bool operator==(const ServiceDecl&) const = default;
};

struct ServiceManifest {
  std::string system_name;
  std::vector<ServiceDecl> services;

  const ServiceDecl* FindService(std::string_view name) const;

  bool operator==(const ServiceManifest&) const = default;
};

// Checks every manifest invariant. Throws msvis::Error with the JSON path of
// the first violation.
void ValidateManifest(const ServiceManifest& manifest);

// Parses and validates. Unknown fields are ignored.
ServiceManifest ParseManifest(std::string_view text);
ServiceManifest LoadManifestFile(const std::string& path);

nlohmann::json ManifestToJson(const ServiceManifest& manifest);

}  // namespace msvis
