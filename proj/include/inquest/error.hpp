#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace inquest {

enum class ErrorKind {
  InvalidConfig,
  InvalidData,
  TurnBudgetExceeded,
  EmptySupport,
  UnanswerableQuestion,
  InconsistentHistory,
  ParserUnavailable,
  MissingEmbedding,
  UnknownTarget,
  MismatchedUniverse,
  OutOfRangeSimilarity,
  SessionClosed,
  ExhaustedPool,
  ExhaustedScript,
  ClientTimeout,
  ClientError,
  UnparseableQuestion,
  LengthMismatch,
  EmptyBatch,
  MixedTaskKinds,
  ParaphraserUnavailable,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::InvalidData: return "InvalidData";
    case ErrorKind::TurnBudgetExceeded: return "TurnBudgetExceeded";
    case ErrorKind::EmptySupport: return "EmptySupport";
    case ErrorKind::UnanswerableQuestion: return "UnanswerableQuestion";
    case ErrorKind::InconsistentHistory: return "InconsistentHistory";
    case ErrorKind::ParserUnavailable: return "ParserUnavailable";
    case ErrorKind::MissingEmbedding: return "MissingEmbedding";
    case ErrorKind::UnknownTarget: return "UnknownTarget";
    case ErrorKind::MismatchedUniverse: return "MismatchedUniverse";
    case ErrorKind::OutOfRangeSimilarity: return "OutOfRangeSimilarity";
    case ErrorKind::SessionClosed: return "SessionClosed";
    case ErrorKind::ExhaustedPool: return "ExhaustedPool";
    case ErrorKind::ExhaustedScript: return "ExhaustedScript";
    case ErrorKind::ClientTimeout: return "ClientTimeout";
    case ErrorKind::ClientError: return "ClientError";
    case ErrorKind::UnparseableQuestion: return "UnparseableQuestion";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::EmptyBatch: return "EmptyBatch";
    case ErrorKind::MixedTaskKinds: return "MixedTaskKinds";
    case ErrorKind::ParaphraserUnavailable: return "ParaphraserUnavailable";
  }
  return "Unknown";
}

/// Every failure raised by the library carries a machine-readable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace inquest
