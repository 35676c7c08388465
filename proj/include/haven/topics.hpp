#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "haven/toolchain.hpp"
#include "haven/util.hpp"

namespace haven {

enum class Topic { Fsm, Counter, ShiftRegister, ClockDivider, Alu, Other };
enum class Attribute { SyncReset, AsyncReset, PosEdge, NegEdge, ActiveHighEnable, ActiveLowEnable };

const char* to_string(Topic t);
const char* to_string(Attribute a);
// Topic or attribute names as used for exemplar tags.
bool is_known_tag(const std::string& tag);
std::optional<Topic> topic_from_string(const std::string& name);

struct Evidence {
  std::string finding;  // topic or attribute name
  int line = 0;
  std::string detail;
  bool operator==(const Evidence&) const = default;
};

struct TopicProfile {
  std::set<Topic> topics;
  std::set<Attribute> attributes;
  std::vector<Evidence> evidence;

  // Topic and attribute names, excluding Other.
  std::vector<std::string> tags() const;
  Json to_json() const;
};

// Rule-based structural analysis over the token stream (comments and
// directives dropped, macros not expanded). Throws Error(TokenizeError).
TopicProfile analyze(const std::string& source);

enum class ExemplarSource { Textbook, Manual };

struct Exemplar {
  std::string id;
  std::string topic;  // topic or attribute tag
  std::string instruction;
  std::string code;
  ExemplarSource source = ExemplarSource::Manual;
};

// Exemplars loaded from every *.jsonl file of a directory.
class ExemplarStore {
 public:
  using CompileCheck = std::function<VerificationResult(const std::string& code)>;

  // Each exemplar must have a known tag, a non-empty instruction containing a
  // module header, and code accepted by `check`. Throws Error(CorpusInvalid)
  // naming the offending exemplar.
  static ExemplarStore load(const std::filesystem::path& dir, const CompileCheck& check);

  void add(Exemplar e) { exemplars_.push_back(std::move(e)); }
  const std::vector<Exemplar>& all() const { return exemplars_; }

 private:
  std::vector<Exemplar> exemplars_;
};

// Exemplars whose tag is among the profile's topics or attributes, ordered by
// (number of profile tags matched, descending) then id.
std::vector<Exemplar> match_exemplars(const TopicProfile& profile, const ExemplarStore& store);

}  // namespace haven
