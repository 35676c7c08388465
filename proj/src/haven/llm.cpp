#include "haven/llm.hpp"

#include <spdlog/spdlog.h>

#include <cstdlib>
#include <fstream>
#include <regex>
#include <thread>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"

#include "haven/config.hpp"
#include "haven/error.hpp"

namespace haven {

namespace {

const char* kStateDiagramV1 = R"(You are given a state diagram written as edges of the form STATE[outputs]--[condition]->NEXT.
Describe it in plain language using exactly this layout:
States&Outputs: 1. state <name>(<output>=<value>); 2. ...
State transition:
1. From state <name>: If <condition>, then transit to state <next>; ...
List every state and every transition once. Do not write any Verilog.

Diagram:
{{diagram}}
)";

const char* kDescribeV1 = R"(Write a concise instruction that would lead an engineer to implement the Verilog module below.
Describe its purpose, ports and behavior, including clocking and reset behavior. Do not include code.
End the instruction with the module header exactly as given.

Module name: {{module_name}}
Module header:
{{header}}

Code:
{{code}}
)";

const char* kRewriteV1 = R"(Rewrite the instruction below so that it follows the style and level of detail of the exemplar.
The exemplar covers the topic "{{exemplar_topic}}"; make the corresponding conventions explicit
(reset type, clock edge, enable polarity, state encoding) wherever the original code uses them.
Keep the module header unchanged.

Exemplar instruction:
{{exemplar_instruction}}

Instruction to rewrite:
{{instruction}}
)";

const char* kEvolveV1 = R"(Rephrase the instruction below. Add or remove at most ten words in total.
Keep every truth-table row, expression and module header intact.
This is attempt {{attempt}}.

Instruction:
{{instruction}}
)";

struct Endpoint {
  std::string base;  // scheme://host[:port]
  std::string path;
};

Endpoint split_endpoint(const std::string& url) {
  static const std::regex re(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(url, m, re)) throw Error(ErrorCode::ConfigError, "bad llm.endpoint '" + url + "'");
  return Endpoint{m[1].str(), m[2].matched ? m[2].str() : "/"};
}

ErrorCode parse_code(const std::string& name) {
  ErrorCode code = ErrorCode::LlmError;
  if (!error_code_from_string(name, &code) || !is_llm_error(code)) code = ErrorCode::LlmError;
  return code;
}

Json request_json(const CompletionRequest& r) {
  return Json{{"template_id", r.template_id}, {"substitutions", r.substitutions}, {"temperature", r.temperature}};
}

}  // namespace

// ---- templates ---------------------------------------------------------------

TemplateRegistry TemplateRegistry::builtin() {
  TemplateRegistry r;
  r.add("sicot.state_diagram.v1", kStateDiagramV1);
  r.add("kdataset.describe.v1", kDescribeV1);
  r.add("kdataset.rewrite.v1", kRewriteV1);
  r.add("ldataset.evolve.v1", kEvolveV1);
  return r;
}

void TemplateRegistry::add(const std::string& id, const std::string& text) { templates_[id] = text; }

const std::string& TemplateRegistry::text(const std::string& id) const {
  auto it = templates_.find(id);
  if (it == templates_.end()) throw Error(ErrorCode::TemplateError, "unknown template '" + id + "'");
  return it->second;
}

std::vector<std::string> TemplateRegistry::placeholders(const std::string& text) {
  std::vector<std::string> out;
  size_t pos = 0;
  while ((pos = text.find("{{", pos)) != std::string::npos) {
    size_t end = text.find("}}", pos + 2);
    if (end == std::string::npos) break;
    std::string name = text.substr(pos + 2, end - pos - 2);
    if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(name);
    pos = end + 2;
  }
  return out;
}

std::string TemplateRegistry::substitute(const std::string& text, const std::map<std::string, std::string>& values) {
  std::string out;
  size_t pos = 0;
  while (true) {
    size_t open = text.find("{{", pos);
    size_t close = open == std::string::npos ? std::string::npos : text.find("}}", open + 2);
    if (close == std::string::npos) {
      out += text.substr(pos);
      return out;
    }
    out += text.substr(pos, open - pos);
    auto it = values.find(text.substr(open + 2, close - open - 2));
    out += it == values.end() ? text.substr(open, close + 2 - open) : it->second;
    pos = close + 2;
  }
}

std::string TemplateRegistry::render(const CompletionRequest& request) const {
  const std::string& t = text(request.template_id);
  for (const auto& name : placeholders(t))
    if (!request.substitutions.count(name))
      throw Error(ErrorCode::TemplateError,
                  "template '" + request.template_id + "' needs a substitution for '" + name + "'");
  return substitute(t, request.substitutions);
}

// ---- mock --------------------------------------------------------------------

MockLlmClient::MockLlmClient(Json fixtures, TemplateRegistry registry)
    : fixtures_(std::move(fixtures)), registry_(std::move(registry)) {
  if (!fixtures_.is_object()) throw Error(ErrorCode::ConfigError, "mock fixtures must be a JSON object");
}

std::shared_ptr<MockLlmClient> MockLlmClient::from_file(const std::filesystem::path& path) {
  Json j;
  try {
    j = Json::parse(read_file(path));
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::ConfigError, path.string() + ": " + e.what());
  }
  return std::make_shared<MockLlmClient>(std::move(j));
}

std::shared_ptr<MockLlmClient> MockLlmClient::from_audit_log(const std::filesystem::path& path) {
  Json exact = Json::array();
  for (const auto& rec : read_jsonl(path)) {
    Json e{{"template_id", rec.at("template_id")}, {"substitutions", rec.at("substitutions")}};
    if (rec.contains("error"))
      e["error"] = rec["error"];
    else
      e["text"] = rec.at("text");
    e["verbatim"] = true;
    exact.push_back(std::move(e));
  }
  return std::make_shared<MockLlmClient>(Json{{"exact", exact}});
}

size_t MockLlmClient::call_count() const {
  std::lock_guard<std::mutex> lock(mu_);
  return calls_;
}

CompletionResult MockLlmClient::complete(const CompletionRequest& request) {
  registry_.render(request);
  {
    std::lock_guard<std::mutex> lock(mu_);
    ++calls_;
  }
  auto answer = [&](const Json& entry) -> CompletionResult {
    if (entry.contains("error")) {
      std::string name = entry["error"].get<std::string>();
      throw Error(parse_code(name), "mock fixture error for '" + request.template_id + "'");
    }
    std::string text = entry["text"].get<std::string>();
    if (!entry.value("verbatim", false)) text = TemplateRegistry::substitute(text, request.substitutions);
    return CompletionResult{text, {}, std::chrono::milliseconds(0)};
  };
  if (fixtures_.contains("exact")) {
    for (const auto& entry : fixtures_["exact"]) {
      if (entry.value("template_id", "") != request.template_id) continue;
      bool match = true;
      if (entry.contains("substitutions")) {
        for (const auto& [k, v] : entry["substitutions"].items()) {
          auto it = request.substitutions.find(k);
          if (it == request.substitutions.end() || it->second != v.get<std::string>()) {
            match = false;
            break;
          }
        }
      }
      if (match) return answer(entry);
    }
  }
  if (fixtures_.contains("templates") && fixtures_["templates"].contains(request.template_id)) {
    const Json& t = fixtures_["templates"][request.template_id];
    if (t.is_string()) return answer(Json{{"text", t}});
    return answer(t);
  }
  throw Error(ErrorCode::LlmError, "no mock fixture for template '" + request.template_id + "'");
}

// ---- HTTP --------------------------------------------------------------------

HttpLlmClient::HttpLlmClient(Options options, TemplateRegistry registry)
    : options_(std::move(options)), registry_(std::move(registry)) {
  if (options_.max_inflight < 1) options_.max_inflight = 1;
  if (options_.max_attempts < 1) options_.max_attempts = 1;
}

CompletionResult HttpLlmClient::complete(const CompletionRequest& request) {
  std::string prompt = registry_.render(request);
  const char* key = std::getenv(options_.api_key_env.c_str());
  if (!key || !*key) throw Error(ErrorCode::AuthError, "environment variable " + options_.api_key_env + " is not set");
  Endpoint ep = split_endpoint(options_.endpoint);

  std::unique_lock<std::mutex> lock(mu_);
  cv_.wait(lock, [&] { return inflight_ < options_.max_inflight; });
  ++inflight_;
  lock.unlock();
  struct Release {
    HttpLlmClient* self;
    ~Release() {
      std::lock_guard<std::mutex> g(self->mu_);
      --self->inflight_;
      self->cv_.notify_one();
    }
  } release{this};

  Json body{{"model", options_.model},
            {"messages", Json::array({Json{{"role", "user"}, {"content", prompt}}})},
            {"temperature", request.temperature},
            {"max_tokens", request.max_tokens}};
  httplib::Headers headers{{"Authorization", std::string("Bearer ") + key}};

  auto start = std::chrono::steady_clock::now();
  int backoff = options_.backoff_ms;
  ErrorCode last_code = ErrorCode::NetworkError;
  std::string last_message;
  for (int attempt = 1; attempt <= options_.max_attempts; ++attempt) {
    httplib::Client client(ep.base);
    auto secs = static_cast<time_t>(options_.timeout_s);
    client.set_connection_timeout(secs, 0);
    client.set_read_timeout(secs, 0);
    client.set_write_timeout(secs, 0);
    auto res = client.Post(ep.path, headers, body.dump(), "application/json");
    if (!res) {
      last_code = ErrorCode::NetworkError;
      last_message = httplib::to_string(res.error());
    } else if (res->status == 401 || res->status == 403) {
      throw Error(ErrorCode::AuthError, "endpoint rejected credentials (HTTP " + std::to_string(res->status) + ")");
    } else if (res->status == 429) {
      last_code = ErrorCode::RateLimited;
      last_message = "HTTP 429";
    } else if (res->status >= 500) {
      last_code = ErrorCode::NetworkError;
      last_message = "HTTP " + std::to_string(res->status);
    } else if (res->status != 200) {
      throw Error(ErrorCode::LlmError, "HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 200));
    } else {
      try {
        Json reply = Json::parse(res->body);
        CompletionResult out;
        out.text = reply.at("choices").at(0).at("message").at("content").get<std::string>();
        if (reply.contains("usage")) {
          out.usage.prompt_tokens = reply["usage"].value("prompt_tokens", 0);
          out.usage.completion_tokens = reply["usage"].value("completion_tokens", 0);
        }
        out.latency = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
        return out;
      } catch (const Json::exception& e) {
        throw Error(ErrorCode::LlmError, std::string("unexpected response shape: ") + e.what());
      }
    }
    spdlog::warn("llm request attempt {}/{} failed: {}", attempt, options_.max_attempts, last_message);
    if (attempt < options_.max_attempts) {
      std::this_thread::sleep_for(std::chrono::milliseconds(backoff));
      backoff *= 2;
    }
  }
  throw Error(last_code, last_message + " after " + std::to_string(options_.max_attempts) + " attempts");
}

// ---- audit -------------------------------------------------------------------

AuditingClient::AuditingClient(std::shared_ptr<LlmClient> inner, const std::filesystem::path& log_path)
    : inner_(std::move(inner)), path_(log_path) {}

CompletionResult AuditingClient::complete(const CompletionRequest& request) {
  Json rec = request_json(request);
  auto log = [&] {
    std::lock_guard<std::mutex> lock(mu_);
    std::ofstream out(path_, std::ios::app | std::ios::binary);
    if (!out) throw Error(ErrorCode::IoError, "cannot append to " + path_.string());
    out << to_jsonl_line(rec);
  };
  try {
    CompletionResult r = inner_->complete(request);
    rec["text"] = r.text;
    log();
    return r;
  } catch (const Error& e) {
    rec["error"] = to_string(e.code());
    log();
    throw;
  }
}

std::shared_ptr<LlmClient> make_llm_client(const Config& config, const std::filesystem::path& mock_fixtures) {
  std::shared_ptr<LlmClient> client;
  if (!mock_fixtures.empty()) {
    client = MockLlmClient::from_file(mock_fixtures);
  } else {
    HttpLlmClient::Options o;
    o.endpoint = config.get("llm.endpoint", o.endpoint);
    o.model = config.get("llm.model", o.model);
    o.api_key_env = config.get("llm.api_key_env", o.api_key_env);
    o.max_inflight = static_cast<int>(config.get_int("llm.max_inflight", o.max_inflight));
    o.max_attempts = static_cast<int>(config.get_int("llm.max_attempts", o.max_attempts));
    o.timeout_s = config.get_double("llm.timeout_s", o.timeout_s);
    client = std::make_shared<HttpLlmClient>(o);
  }
  std::string audit = config.get("llm.audit_log");
  if (!audit.empty()) client = std::make_shared<AuditingClient>(client, audit);
  return client;
}

}  // namespace haven
