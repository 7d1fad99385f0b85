#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace radlabel {

enum class ErrorCode {
  InvalidArgument,
  Io,
  MalformedCsv,
  MalformedConllu,
  TokenCountMismatch,
  UnknownObservationFile,
  EmptyPhrase,
  MalformedRule,
  MissingMentionPlaceholder,
  UnclassifiedMention,
  ReportIdMismatch,
  DegenerateClass,
  ShapeMismatch,
  DegenerateTriple,
  EmptyViews,
};

inline std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Io: return "Io";
    case ErrorCode::MalformedCsv: return "MalformedCsv";
    case ErrorCode::MalformedConllu: return "MalformedConllu";
    case ErrorCode::TokenCountMismatch: return "TokenCountMismatch";
    case ErrorCode::UnknownObservationFile: return "UnknownObservationFile";
    case ErrorCode::EmptyPhrase: return "EmptyPhrase";
    case ErrorCode::MalformedRule: return "MalformedRule";
    case ErrorCode::MissingMentionPlaceholder: return "MissingMentionPlaceholder";
    case ErrorCode::UnclassifiedMention: return "UnclassifiedMention";
    case ErrorCode::ReportIdMismatch: return "ReportIdMismatch";
    case ErrorCode::DegenerateClass: return "DegenerateClass";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::DegenerateTriple: return "DegenerateTriple";
    case ErrorCode::EmptyViews: return "EmptyViews";
  }
  return "Unknown";
}

// Every failure raised by the library carries a code so callers (and the
// CLI exit-status mapping) can dispatch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string &message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace radlabel
