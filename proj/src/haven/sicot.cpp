#include "haven/sicot.hpp"

#include <spdlog/spdlog.h>

#include "haven/error.hpp"
#include "haven/llm.hpp"
#include "haven/util.hpp"

namespace haven {

const char* to_string(RoutePolicy p) {
  switch (p) {
    case RoutePolicy::DeterministicOnly: return "DeterministicOnly";
    case RoutePolicy::LlmForStateDiagrams: return "LlmForStateDiagrams";
    case RoutePolicy::LlmFallback: return "LlmFallback";
  }
  return "?";
}

const char* to_string(Route r) {
  switch (r) {
    case Route::Parser: return "Parser";
    case Route::LlmInterpreter: return "LlmInterpreter";
    case Route::Passthrough: return "Passthrough";
  }
  return "?";
}

RoutePolicy parse_route_policy(const std::string& name) {
  std::string n = to_lower(name);
  if (n == "deterministic" || n == "deterministiconly") return RoutePolicy::DeterministicOnly;
  if (n == "llm-state-diagrams" || n == "llmforstatediagrams") return RoutePolicy::LlmForStateDiagrams;
  if (n == "llm-fallback" || n == "llmfallback") return RoutePolicy::LlmFallback;
  throw Error(ErrorCode::ConfigError, "unknown policy '" + name + "'");
}

namespace {

UniformInstruction ask_llm(LlmClient* llm, const std::string& block, Modality kind, double temperature) {
  if (!llm) throw Error(ErrorCode::InterpretationFailed, "LLM route selected but no interpreter configured");
  CompletionRequest req;
  req.template_id = "sicot.state_diagram.v1";
  req.substitutions["diagram"] = block;
  req.temperature = temperature;
  UniformInstruction u;
  u.text = llm->complete(req).text;
  u.source_modality = kind;
  return u;
}

}  // namespace

CoTPrompt interpret(const std::string& prompt, LlmClient* interpreter, const SicotOptions& options) {
  if (trim(prompt).empty()) throw Error(ErrorCode::PreconditionViolation, "prompt is empty");
  CoTPrompt out;
  out.original = prompt;

  auto prompt_header = parse_module_header(prompt);
  ModalityDetection det = detect_modality(prompt);
  std::optional<SymbolicSpec> first_parse;

  std::string text;
  size_t pos = 0;
  for (const auto& span : det.spans) {
    std::string block = prompt.substr(span.begin, span.end - span.begin);
    UniformInstruction u;
    Route route = Route::Parser;
    bool use_llm = span.kind == Modality::StateDiagram && options.policy == RoutePolicy::LlmForStateDiagrams;

    std::optional<SymbolicSpec> parsed;
    std::optional<Error> parse_error;
    try {
      parsed = parse_block(block, span.kind, prompt_header);
    } catch (const Error& e) {
      if (is_llm_error(e.code())) throw;
      parse_error = e;
    }

    if (use_llm) {
      u = ask_llm(interpreter, block, span.kind, options.temperature);
      u.parse = parsed;
      route = Route::LlmInterpreter;
    } else if (parsed) {
      u = render_uniform_instruction(*parsed);
    } else if (options.policy == RoutePolicy::LlmFallback) {
      spdlog::debug("parser failed ({}), asking the interpreter", parse_error->what());
      u = ask_llm(interpreter, block, span.kind, options.temperature);
      route = Route::LlmInterpreter;
    } else if (options.passthrough_on_failure) {
      u.text = block;
      u.source_modality = span.kind;
      route = Route::Passthrough;
    } else {
      throw Error(ErrorCode::InterpretationFailed,
                  std::string(to_string(span.kind)) + " block could not be parsed: " + parse_error->message());
    }
    if (!first_parse && u.parse) first_parse = u.parse;

    text += prompt.substr(pos, span.begin - pos);
    std::string rendered = u.text;
    if (span.begin > 0 && prompt[span.begin - 1] != '\n') rendered.insert(0, "\n");
    if (span.end < prompt.size() && prompt[span.end] == '\n') {
      while (!rendered.empty() && rendered.back() == '\n') rendered.pop_back();
    } else if (!rendered.empty() && rendered.back() != '\n') {
      rendered += "\n";
    }
    text += rendered;
    pos = span.end;
    out.interpreted_blocks.push_back(std::move(u));
    out.route_log.push_back(RouteEntry{span, route});
  }
  text += prompt.substr(pos);

  std::optional<IoSignature> sig = options.signature;
  out.final_text = ensure_module_header(text, sig, first_parse);
  return out;
}

}  // namespace haven
