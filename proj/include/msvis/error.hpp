#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace msvis {

enum class ErrorCode {
  kSchemaError,
  kDuplicateService,
  kDanglingCallTarget,
  kBadRoute,
  kEmptyInput,
  kUnknownService,
  kUnknownEndpoint,
  kUnknownNode,
  kPathNotInGraph,
  kUnknownTrace,
  kEmptyTraceSet,
  kInvalidConfig,
  kEmptyView,
  kIoError,
  kDuplicateSystem,
  kUnknownSystem,
  kUnknownSimulation,
};

std::string_view ToString(ErrorCode code) noexcept;

// Domain error. `subject` carries the offending name (a service, a node id, a
// path edge "A>B"); `json_path` is set for manifest errors.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string subject, std::string message,
        std::string json_path = {});

  ErrorCode code() const noexcept { return code_; }
  const std::string& subject() const noexcept { return subject_; }
  const std::string& json_path() const noexcept { return json_path_; }

 private:
  ErrorCode code_;
  std::string subject_;
  std::string json_path_;
};

}  // namespace msvis
