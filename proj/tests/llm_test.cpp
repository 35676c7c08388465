#include <gtest/gtest.h>

#include <atomic>
#include <cstdlib>
#include <thread>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "haven/config.hpp"
#include "haven/error.hpp"
#include "haven/llm.hpp"
#include "httplib.h"
#include "support.hpp"

using namespace haven;

namespace {

CompletionRequest evolve(const std::string& instruction) {
  return CompletionRequest{"ldataset.evolve.v1", {{"instruction", instruction}, {"attempt", "1"}}};
}

TEST(Templates, RenderAndPlaceholders) {
  TemplateRegistry reg;
  reg.add("t", "Hello {{name}}, {{name}} and {{other}}.");
  EXPECT_EQ(TemplateRegistry::placeholders("{{a}} {{b}} {{a}}"), (std::vector<std::string>{"a", "b"}));
  CompletionRequest r{"t", {{"name", "x"}, {"other", "y"}}};
  EXPECT_EQ(reg.render(r), "Hello x, x and y.");
  r.substitutions.erase("other");
  try {
    reg.render(r);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TemplateError);
    EXPECT_NE(e.message().find("other"), std::string::npos);
  }
  r.template_id = "missing";
  EXPECT_THROW(reg.render(r), Error);
}

TEST(Templates, SubstitutionIsSinglePass) {
  EXPECT_EQ(TemplateRegistry::substitute("{{a}}", {{"a", "{{b}}"}, {"b", "no"}}), "{{b}}");
}

TEST(Templates, BuiltinsPresent) {
  auto reg = TemplateRegistry::builtin();
  for (const char* id : {"sicot.state_diagram.v1", "kdataset.describe.v1", "kdataset.rewrite.v1", "ldataset.evolve.v1"})
    EXPECT_TRUE(reg.has(id)) << id;
}

TEST(Mock, ExactBeatsTemplate) {
  MockLlmClient m(Json{{"templates", {{"ldataset.evolve.v1", "T {{instruction}}"}}},
                       {"exact", Json::array({{{"template_id", "ldataset.evolve.v1"},
                                               {"substitutions", {{"instruction", "special"}}},
                                               {"text", "E"}}})}});
  EXPECT_EQ(m.complete(evolve("special")).text, "E");
  EXPECT_EQ(m.complete(evolve("plain")).text, "T plain");
  EXPECT_EQ(m.call_count(), 2u);
}

TEST(Mock, UnknownTemplateIsTemplateError) {
  MockLlmClient m(Json::object());
  try {
    m.complete({"nope.v1", {}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TemplateError);
  }
}

TEST(Audit, RecordsAndReplays) {
  test::ScratchDir dir("audit");
  auto inner = std::make_shared<MockLlmClient>(
      Json{{"templates", {{"ldataset.evolve.v1", "R {{instruction}}"}}},
           {"exact", Json::array({{{"template_id", "ldataset.evolve.v1"},
                                   {"substitutions", {{"instruction", "boom"}}},
                                   {"error", "RateLimited"}}})}});
  AuditingClient audit(inner, dir / "log.jsonl");
  EXPECT_EQ(audit.complete(evolve("one")).text, "R one");
  EXPECT_THROW(audit.complete(evolve("boom")), Error);
  EXPECT_EQ(read_jsonl(dir / "log.jsonl").size(), 2u);

  auto replay = MockLlmClient::from_audit_log(dir / "log.jsonl");
  EXPECT_EQ(replay->complete(evolve("one")).text, "R one");
  try {
    replay->complete(evolve("boom"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::RateLimited);
  }
}

// ---- HTTP client against a local server ---------------------------------------

class LocalServer {
 public:
  LocalServer() {
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~LocalServer() {
    server_.stop();
    thread_.join();
  }
  httplib::Server& server() { return server_; }
  std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions"; }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

std::string reply(const std::string& content) {
  return Json{{"choices", Json::array({{{"message", {{"role", "assistant"}, {"content", content}}}}})},
              {"usage", {{"prompt_tokens", 7}, {"completion_tokens", 3}}}}
      .dump();
}

HttpLlmClient::Options options(const std::string& endpoint) {
  HttpLlmClient::Options o;
  o.endpoint = endpoint;
  o.api_key_env = "HAVEN_TEST_KEY";
  o.backoff_ms = 1;
  o.timeout_s = 5;
  o.max_attempts = 3;
  return o;
}

TEST(Http, SuccessSendsPromptAndKey) {
  setenv("HAVEN_TEST_KEY", "sekret", 1);
  LocalServer s;
  std::string seen_auth, seen_prompt;
  s.server().Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
    seen_auth = req.get_header_value("Authorization");
    seen_prompt = Json::parse(req.body)["messages"][0]["content"];
    res.set_content(reply("done"), "application/json");
  });
  HttpLlmClient c(options(s.endpoint()));
  auto r = c.complete(evolve("Make it so."));
  EXPECT_EQ(r.text, "done");
  EXPECT_EQ(r.usage.prompt_tokens, 7);
  EXPECT_EQ(seen_auth, "Bearer sekret");
  EXPECT_NE(seen_prompt.find("Make it so."), std::string::npos);
}

TEST(Http, RetriesRateLimits) {
  setenv("HAVEN_TEST_KEY", "k", 1);
  LocalServer s;
  std::atomic<int> hits{0};
  s.server().Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
    if (++hits < 3) {
      res.status = 429;
      return;
    }
    res.set_content(reply("third time"), "application/json");
  });
  HttpLlmClient c(options(s.endpoint()));
  EXPECT_EQ(c.complete(evolve("x")).text, "third time");
  EXPECT_EQ(hits.load(), 3);
}

TEST(Http, PersistentRateLimitSurfaces) {
  setenv("HAVEN_TEST_KEY", "k", 1);
  LocalServer s;
  s.server().Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) { res.status = 429; });
  HttpLlmClient c(options(s.endpoint()));
  try {
    c.complete(evolve("x"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::RateLimited);
  }
}

TEST(Http, UnauthorizedIsNotRetried) {
  setenv("HAVEN_TEST_KEY", "bad", 1);
  LocalServer s;
  std::atomic<int> hits{0};
  s.server().Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
    ++hits;
    res.status = 401;
  });
  HttpLlmClient c(options(s.endpoint()));
  try {
    c.complete(evolve("x"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::AuthError);
  }
  EXPECT_EQ(hits.load(), 1);
}

TEST(Http, MalformedReplyIsLlmError) {
  setenv("HAVEN_TEST_KEY", "k", 1);
  LocalServer s;
  s.server().Post("/v1/chat/completions",
                  [&](const httplib::Request&, httplib::Response& res) { res.set_content("{\"choices\":[]}", "application/json"); });
  HttpLlmClient c(options(s.endpoint()));
  try {
    c.complete(evolve("x"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::LlmError);
  }
}

TEST(Http, MissingKeyFailsBeforeNetwork) {
  unsetenv("HAVEN_TEST_KEY_UNSET");
  auto o = options("http://127.0.0.1:9/v1/chat/completions");
  o.api_key_env = "HAVEN_TEST_KEY_UNSET";
  HttpLlmClient c(o);
  try {
    c.complete(evolve("x"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::AuthError);
    EXPECT_NE(e.message().find("HAVEN_TEST_KEY_UNSET"), std::string::npos);
  }
}

TEST(Http, UnreachableIsNetworkError) {
  setenv("HAVEN_TEST_KEY", "k", 1);
  auto o = options("http://127.0.0.1:1/v1/chat/completions");
  o.max_attempts = 2;
  HttpLlmClient c(o);
  try {
    c.complete(evolve("x"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NetworkError);
  }
}

TEST(Factory, MockAndAudit) {
  test::ScratchDir dir("factory");
  Config cfg;
  cfg.set("llm.audit_log", (dir / "a.jsonl").string());
  auto c = make_llm_client(cfg, test::data_dir() / "fixtures" / "mock_llm.json");
  c->complete(evolve("x"));
  EXPECT_EQ(read_jsonl(dir / "a.jsonl").size(), 1u);
}

}  // namespace
