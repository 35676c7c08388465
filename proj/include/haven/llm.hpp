#pragma once

#include <chrono>
#include <condition_variable>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "haven/util.hpp"

namespace haven {

class Config;

struct CompletionRequest {
  std::string template_id;
  std::map<std::string, std::string> substitutions;
  double temperature = 0.2;
  int max_tokens = 1024;
};

struct Usage {
  int64_t prompt_tokens = 0;
  int64_t completion_tokens = 0;
};

struct CompletionResult {
  std::string text;
  Usage usage;
  std::chrono::milliseconds latency{0};
};

// Named prompt templates with {{name}} placeholders.
class TemplateRegistry {
 public:
  // Registry holding the built-in templates (sicot.state_diagram.v1, ...).
  static TemplateRegistry builtin();

  void add(const std::string& id, const std::string& text);
  bool has(const std::string& id) const { return templates_.count(id) != 0; }
  const std::string& text(const std::string& id) const;  // throws TemplateError

  // Throws TemplateError for unknown ids and placeholders without a substitution.
  std::string render(const CompletionRequest& request) const;

  static std::vector<std::string> placeholders(const std::string& text);
  // Replaces every {{name}} that has a value; others are left as written.
  static std::string substitute(const std::string& text, const std::map<std::string, std::string>& values);

 private:
  std::map<std::string, std::string> templates_;
};

class LlmClient {
 public:
  virtual ~LlmClient() = default;
  // Thread safe. Throws Error with an LLM error code (AuthError, RateLimited,
  // NetworkError, TemplateError, LlmError).
  virtual CompletionResult complete(const CompletionRequest& request) = 0;
};

// Offline client answering from fixtures:
//   {"templates": {"<template_id>": "response with {{placeholders}}"},
//    "exact": [{"template_id": .., "substitutions": {..}, "text": ..} | {.., "error": "<ErrorCode>"}]}
// "exact" entries match when their substitutions are a subset of the request's
// and take precedence over "templates". Requests are still rendered against
// the registry so template errors surface exactly as with a live client.
class MockLlmClient : public LlmClient {
 public:
  MockLlmClient(Json fixtures, TemplateRegistry registry = TemplateRegistry::builtin());
  static std::shared_ptr<MockLlmClient> from_file(const std::filesystem::path& path);
  // Replays an audit log written by AuditingClient.
  static std::shared_ptr<MockLlmClient> from_audit_log(const std::filesystem::path& path);

  CompletionResult complete(const CompletionRequest& request) override;
  size_t call_count() const;

 private:
  Json fixtures_;
  TemplateRegistry registry_;
  mutable std::mutex mu_;
  size_t calls_ = 0;
};

// OpenAI-compatible chat-completions client.
class HttpLlmClient : public LlmClient {
 public:
  struct Options {
    std::string endpoint = "https://api.openai.com/v1/chat/completions";
    std::string model = "gpt-4o-mini";
    std::string api_key_env = "HAVEN_API_KEY";
    int max_inflight = 4;
    int max_attempts = 4;
    double timeout_s = 60;
    int backoff_ms = 500;  // doubled after each failed attempt
  };

  HttpLlmClient(Options options, TemplateRegistry registry = TemplateRegistry::builtin());
  CompletionResult complete(const CompletionRequest& request) override;

 private:
  Options options_;
  TemplateRegistry registry_;
  std::mutex mu_;
  std::condition_variable cv_;
  int inflight_ = 0;
};

// Decorator appending {template_id, substitutions, temperature, text|error}
// to a JSON Lines file for every request.
class AuditingClient : public LlmClient {
 public:
  AuditingClient(std::shared_ptr<LlmClient> inner, const std::filesystem::path& log_path);
  CompletionResult complete(const CompletionRequest& request) override;

 private:
  std::shared_ptr<LlmClient> inner_;
  std::filesystem::path path_;
  std::mutex mu_;
};

// Mock when `mock_fixtures` is non-empty, HTTP otherwise; wrapped in an
// AuditingClient when llm.audit_log is set.
std::shared_ptr<LlmClient> make_llm_client(const Config& config, const std::filesystem::path& mock_fixtures);

}  // namespace haven
