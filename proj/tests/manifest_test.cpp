#include <doctest.h>

#include "msvis/error.hpp"
#include "msvis/manifest.hpp"
#include "test_support.hpp"

using namespace msvis;

namespace {

// Runs `fn`, expecting a msvis::Error with `code`; returns it for inspection.
template <typename Fn>
Error ExpectError(ErrorCode code, Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    CHECK(ToString(e.code()) == ToString(code));
    return e;
  }
  FAIL("expected " << ToString(code));
  return Error(code, {}, {});
}

const char* kMinimal = R"({
  "system_name": "mini",
  "services": [
    {"name": "a", "base_route": "/a", "functions": ["f", "g"],
     "endpoints": [{"method": "GET", "path": "/x",
                    "calls": [{"service": "b", "endpoint": "POST /y"}],
                    "flow": [{"seq": 1, "function": "f", "calls": ["g"]},
                             {"seq": 3, "function": "g"}]}]},
    {"name": "b", "base_route": "/b", "controller": "shared",
     "endpoints": [{"method": "POST", "path": "/y"}], "extra": 42}
  ]
})";

}  // namespace

TEST_CASE("parse a minimal manifest") {
  auto m = ParseManifest(kMinimal);
  CHECK(m.system_name == "mini");
  REQUIRE(m.services.size() == 2);
  const auto* a = m.FindService("a");
  REQUIRE(a != nullptr);
  CHECK(a->endpoints[0].id() == "GET /x");
  CHECK(a->endpoints[0].calls[0] == CallDecl{"b", "POST /y"});
  CHECK(a->endpoints[0].flow[1].seq == 3);
  CHECK(a->FindEndpoint("GET /x") != nullptr);
  CHECK(a->FindEndpoint("GET /nope") == nullptr);
  CHECK(m.FindService("b")->controller_key() == "shared");
  CHECK(m.FindService("zzz") == nullptr);
}

TEST_CASE("manifest round trips through JSON") {
  for (const auto& m : {ParseManifest(kMinimal), testing::TrainTicket(), testing::Figures()}) {
    const auto again = ParseManifest(ManifestToJson(m).dump());
    CHECK(again == m);
    CHECK(ManifestToJson(again) == ManifestToJson(m));
  }
}

TEST_CASE("duplicate service names are rejected") {
  auto m = testing::ManifestBuilder().Service("a", "/a").Service("a", "/b").Build();
  auto e = ExpectError(ErrorCode::kDuplicateService, [&] { ValidateManifest(m); });
  CHECK(e.subject() == "a");
  CHECK(e.json_path() == "$.services[1].name");
}

TEST_CASE("dangling call targets are rejected with a path") {
  auto m = testing::ManifestBuilder().Service("a", "/a").Call("a", "ghost").Build();
  auto e = ExpectError(ErrorCode::kDanglingCallTarget, [&] { ValidateManifest(m); });
  CHECK(e.subject() == "ghost");
  CHECK(e.json_path() == "$.services[0].endpoints[0].calls[0].service");
}

TEST_CASE("routes must start with a slash") {
  auto m = testing::ManifestBuilder().Service("a", "api/a").Build();
  ExpectError(ErrorCode::kBadRoute, [&] { ValidateManifest(m); });
  auto empty = testing::ManifestBuilder().Service("a", "").Build();
  ExpectError(ErrorCode::kBadRoute, [&] { ValidateManifest(empty); });
}

TEST_CASE("schema errors carry the JSON path") {
  struct Case {
    const char* doc;
    const char* path;
  };
  const Case cases[] = {
      {R"([])", "$"},
      {R"({"services": []})", "$.system_name"},
      {R"({"system_name": "x"})", "$.services"},
      {R"({"system_name": "x", "services": {}})", "$.services"},
      {R"({"system_name": "x", "services": [{"base_route": "/a"}]})", "$.services[0].name"},
      {R"({"system_name": "x", "services": [{"name": 3, "base_route": "/a"}]})",
       "$.services[0].name"},
      {R"({"system_name": "x", "services": [{"name": "a", "base_route": "/a",
          "endpoints": [{"method": "FETCH", "path": "/x"}]}]})",
       "$.services[0].endpoints[0].method"},
      {R"({"system_name": "x", "services": [{"name": "a", "base_route": "/a",
          "endpoints": [{"method": "GET", "path": "/x"}, {"method": "GET", "path": "/x"}]}]})",
       "$.services[0].endpoints[1]"},
      {R"({"system_name": "x", "services": [{"name": "a", "base_route": "/a", "functions": ["f"],
          "endpoints": [{"method": "GET", "path": "/x", "flow": [{"seq": 2, "function": "f"}]}]}]})",
       "$.services[0].endpoints[0].flow[0].seq"},
      {R"({"system_name": "x", "services": [{"name": "a", "base_route": "/a", "functions": ["f"],
          "endpoints": [{"method": "GET", "path": "/x",
                         "flow": [{"seq": 1, "function": "f"}, {"seq": 1, "function": "f"}]}]}]})",
       "$.services[0].endpoints[0].flow[1].seq"},
      {R"({"system_name": "x", "services": [{"name": "a", "base_route": "/a", "functions": ["f"],
          "endpoints": [{"method": "GET", "path": "/x", "flow": [{"seq": 1, "function": "h"}]}]}]})",
       "$.services[0].endpoints[0].flow[0].function"},
      {R"({"system_name": "x", "services": [{"name": "a", "base_route": "/a", "functions": ["f", "f"]}]})",
       "$.services[0].functions[1]"},
  };
  for (const auto& c : cases) {
    INFO(c.doc);
    auto e = ExpectError(ErrorCode::kSchemaError, [&] { ParseManifest(c.doc); });
    CHECK(e.json_path() == c.path);
  }
}

TEST_CASE("invalid JSON is a schema error") {
  ExpectError(ErrorCode::kSchemaError, [] { ParseManifest("{not json"); });
}

TEST_CASE("missing manifest file is an I/O error") {
  ExpectError(ErrorCode::kIoError, [] { LoadManifestFile("/nonexistent/manifest.json"); });
}

TEST_CASE("error text names the code and subject") {
  Error e(ErrorCode::kUnknownNode, "ts-x", "no such node");
  const std::string what = e.what();
  CHECK(what.find("UnknownNode") != std::string::npos);
  CHECK(what.find("ts-x") != std::string::npos);
}

TEST_CASE("fixture manifest shape") {
  auto m = testing::TrainTicket();
  CHECK(m.services.size() == 41);
  const auto* order = m.FindService("ts-order-service");
  REQUIRE(order != nullptr);
  const auto* post = order->FindEndpoint("POST /orders");
  REQUIRE(post != nullptr);
  CHECK(post->flow.size() == 5);
}
