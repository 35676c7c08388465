#pragma once

#include <optional>
#include <string>
#include <vector>

#include "haven/symbolic.hpp"

namespace haven {

class LlmClient;

enum class RoutePolicy { DeterministicOnly, LlmForStateDiagrams, LlmFallback };
enum class Route { Parser, LlmInterpreter, Passthrough };

const char* to_string(RoutePolicy p);
const char* to_string(Route r);
RoutePolicy parse_route_policy(const std::string& name);  // throws Error(ConfigError)

struct RouteEntry {
  Span span;
  Route route = Route::Parser;
};

struct CoTPrompt {
  std::string original;
  std::vector<UniformInstruction> interpreted_blocks;
  std::string final_text;
  std::vector<RouteEntry> route_log;
};

struct SicotOptions {
  RoutePolicy policy = RoutePolicy::DeterministicOnly;
  // Ports for the module header when the prompt has none; otherwise inferred
  // from the first interpreted block.
  std::optional<IoSignature> signature;
  // Keep blocks that cannot be interpreted verbatim instead of failing.
  bool passthrough_on_failure = false;
  double temperature = 0.2;
};

// Detect symbolic blocks, replace each with its natural-language rendering and
// make sure the result carries a module header. `interpreter` may be null
// under DeterministicOnly.
CoTPrompt interpret(const std::string& prompt, LlmClient* interpreter, const SicotOptions& options = {});

}  // namespace haven
