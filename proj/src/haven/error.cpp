#include "haven/error.hpp"

namespace haven {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedTable: return "MalformedTable";
    case ErrorCode::EmptyTable: return "EmptyTable";
    case ErrorCode::MalformedWaveform: return "MalformedWaveform";
    case ErrorCode::EmptyWaveform: return "EmptyWaveform";
    case ErrorCode::MalformedDiagram: return "MalformedDiagram";
    case ErrorCode::InconsistentOutputs: return "InconsistentOutputs";
    case ErrorCode::DanglingState: return "DanglingState";
    case ErrorCode::MissingSignature: return "MissingSignature";
    case ErrorCode::InterpretationFailed: return "InterpretationFailed";
    case ErrorCode::LlmError: return "LlmError";
    case ErrorCode::AuthError: return "AuthError";
    case ErrorCode::RateLimited: return "RateLimited";
    case ErrorCode::NetworkError: return "NetworkError";
    case ErrorCode::TemplateError: return "TemplateError";
    case ErrorCode::TokenizeError: return "TokenizeError";
    case ErrorCode::CompilerNotFound: return "CompilerNotFound";
    case ErrorCode::SimulatorNotFound: return "SimulatorNotFound";
    case ErrorCode::Timeout: return "Timeout";
    case ErrorCode::PreconditionViolation: return "PreconditionViolation";
    case ErrorCode::MultiOutputUnsupported: return "MultiOutputUnsupported";
    case ErrorCode::UnboundVariable: return "UnboundVariable";
    case ErrorCode::IncompatibleTemplate: return "IncompatibleTemplate";
    case ErrorCode::InvalidCounts: return "InvalidCounts";
    case ErrorCode::MixedN: return "MixedN";
    case ErrorCode::CorpusInvalid: return "CorpusInvalid";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

bool error_code_from_string(const std::string& name, ErrorCode* out) {
  for (int i = 0; i <= static_cast<int>(ErrorCode::IoError); ++i) {
    auto code = static_cast<ErrorCode>(i);
    if (name == to_string(code)) {
      *out = code;
      return true;
    }
  }
  return false;
}

bool is_llm_error(ErrorCode code) {
  return code == ErrorCode::LlmError || code == ErrorCode::AuthError || code == ErrorCode::RateLimited ||
         code == ErrorCode::NetworkError || code == ErrorCode::TemplateError;
}

}  // namespace haven
