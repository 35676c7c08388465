#pragma once

#include <stdexcept>
#include <string>

namespace haven {

enum class ErrorCode {
  MalformedTable,
  EmptyTable,
  MalformedWaveform,
  EmptyWaveform,
  MalformedDiagram,
  InconsistentOutputs,
  DanglingState,
  MissingSignature,
  InterpretationFailed,
  LlmError,
  AuthError,
  RateLimited,
  NetworkError,
  TemplateError,
  TokenizeError,
  CompilerNotFound,
  SimulatorNotFound,
  Timeout,
  PreconditionViolation,
  MultiOutputUnsupported,
  UnboundVariable,
  IncompatibleTemplate,
  InvalidCounts,
  MixedN,
  CorpusInvalid,
  ConfigError,
  IoError,
};

const char* to_string(ErrorCode code);
// Inverse of to_string; false for unknown names.
bool error_code_from_string(const std::string& name, ErrorCode* out);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), message_(message) {}
  ErrorCode code() const { return code_; }
  const std::string& message() const { return message_; }

 private:
  ErrorCode code_;
  std::string message_;
};

// LlmError, AuthError, RateLimited, NetworkError and TemplateError all come from
// the LLM client.
bool is_llm_error(ErrorCode code);

}  // namespace haven
