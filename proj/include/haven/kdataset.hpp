#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "haven/toolchain.hpp"
#include "haven/topics.hpp"
#include "haven/util.hpp"

namespace haven {

class LlmClient;

enum class Stage { Vanilla, KnowledgeAugmented, Logic };
enum class VerifyState { Unverified, CompileOk, CompileFail };

const char* to_string(Stage s);        // "vanilla", "knowledge_augmented", "logic"
const char* to_string(VerifyState v);  // "Unverified", "CompileOk", "CompileFail"

struct InstructionCodePair {
  std::string id;
  std::string instruction;
  std::string code;
  Stage stage = Stage::Vanilla;
  std::optional<std::string> exemplar_id;
  VerifyState verify = VerifyState::Unverified;
  std::string verify_message;  // compiler output for CompileFail

  Json to_json() const;
  static InstructionCodePair from_json(const Json& j);
  bool operator==(const InstructionCodePair&) const = default;
};

struct CorpusFile {
  std::string name;  // file stem
  std::string code;
};

struct SkipRecord {
  std::string item;
  std::string reason;
};

// *.v files of a directory, sorted by file name.
std::vector<CorpusFile> load_corpus_dir(const std::filesystem::path& dir);

struct VanillaResult {
  std::vector<InstructionCodePair> pairs;
  std::vector<SkipRecord> skips;
};

// One Vanilla pair per file that tokenizes and gets a description from the
// describer (template kdataset.describe.v1). Failures become skip records.
VanillaResult build_vanilla_pairs(const std::vector<CorpusFile>& corpus, LlmClient& describer, int workers = 1);

// Rewrites the vanilla instruction toward the exemplar (template
// kdataset.rewrite.v1). Code is carried over unchanged.
InstructionCodePair augment_pair(const InstructionCodePair& pair, const Exemplar& exemplar, LlmClient& rewriter);

VerificationResult verify_compiles(const InstructionCodePair& pair, const Toolchain& toolchain);

struct KPipelineStats {
  size_t files = 0;
  size_t vanilla = 0;
  size_t matched = 0;  // sum over vanilla pairs of matched-exemplar counts
  size_t augmented = 0;
  size_t llm_failures = 0;
  size_t compile_failures = 0;  // records dropped by the compile filter
};

struct KPipelineResult {
  std::vector<InstructionCodePair> records;  // CompileOk only, input order
  std::vector<SkipRecord> skips;
  KPipelineStats stats;
};

// Describe, analyze and match, augment once per matched exemplar, then keep
// the records that compile. Vanilla pairs are kept next to their rewrites.
KPipelineResult run_k_pipeline(const std::vector<CorpusFile>& corpus, const ExemplarStore& store, LlmClient& llm,
                               const Toolchain& toolchain, int workers = 1);

}  // namespace haven
