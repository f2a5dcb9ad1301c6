#include "msvis/error.hpp"

#include <utility>

namespace msvis {

std::string_view ToString(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kSchemaError: return "SchemaError";
    case ErrorCode::kDuplicateService: return "DuplicateService";
    case ErrorCode::kDanglingCallTarget: return "DanglingCallTarget";
    case ErrorCode::kBadRoute: return "BadRoute";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kUnknownService: return "UnknownService";
    case ErrorCode::kUnknownEndpoint: return "UnknownEndpoint";
    case ErrorCode::kUnknownNode: return "UnknownNode";
    case ErrorCode::kPathNotInGraph: return "PathNotInGraph";
    case ErrorCode::kUnknownTrace: return "UnknownTrace";
    case ErrorCode::kEmptyTraceSet: return "EmptyTraceSet";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kEmptyView: return "EmptyView";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kDuplicateSystem: return "DuplicateSystem";
    case ErrorCode::kUnknownSystem: return "UnknownSystem";
    case ErrorCode::kUnknownSimulation: return "UnknownSimulation";
  }
  return "Unknown";
}

namespace {

std::string Compose(ErrorCode code, const std::string& subject,
                    const std::string& message, const std::string& json_path) {
  std::string out(ToString(code));
  if (!subject.empty()) out += "(\"" + subject + "\")";
  out += ": " + message;
  if (!json_path.empty()) out += " at " + json_path;
  return out;
}

}  // namespace

Error::Error(ErrorCode code, std::string subject, std::string message,
             std::string json_path)
    : std::runtime_error(Compose(code, subject, message, json_path)),
      code_(code),
      subject_(std::move(subject)),
      json_path_(std::move(json_path)) {}

}  // namespace msvis
