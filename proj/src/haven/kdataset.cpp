#include "haven/kdataset.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>

#include "haven/error.hpp"
#include "haven/llm.hpp"
#include "haven/symbolic.hpp"
#include "minivl/lexer.hpp"

namespace haven {

const char* to_string(Stage s) {
  switch (s) {
    case Stage::Vanilla: return "vanilla";
    case Stage::KnowledgeAugmented: return "knowledge_augmented";
    case Stage::Logic: return "logic";
  }
  return "?";
}

const char* to_string(VerifyState v) {
  switch (v) {
    case VerifyState::Unverified: return "Unverified";
    case VerifyState::CompileOk: return "CompileOk";
    case VerifyState::CompileFail: return "CompileFail";
  }
  return "?";
}

Json InstructionCodePair::to_json() const {
  Json j{{"id", id},
         {"instruction", instruction},
         {"code", code},
         {"stage", to_string(stage)},
         {"exemplar_id", exemplar_id ? Json(*exemplar_id) : Json(nullptr)},
         {"verify", to_string(verify)}};
  if (verify == VerifyState::CompileFail) j["verify_message"] = verify_message;
  return j;
}

InstructionCodePair InstructionCodePair::from_json(const Json& j) {
  InstructionCodePair p;
  try {
    p.id = j.at("id").get<std::string>();
    p.instruction = j.at("instruction").get<std::string>();
    p.code = j.at("code").get<std::string>();
    std::string stage = j.at("stage").get<std::string>();
    if (stage == "vanilla") p.stage = Stage::Vanilla;
    else if (stage == "knowledge_augmented") p.stage = Stage::KnowledgeAugmented;
    else if (stage == "logic") p.stage = Stage::Logic;
    else throw Error(ErrorCode::IoError, "unknown stage '" + stage + "'");
    if (j.contains("exemplar_id") && !j["exemplar_id"].is_null()) p.exemplar_id = j["exemplar_id"].get<std::string>();
    std::string v = j.value("verify", "Unverified");
    p.verify = v == "CompileOk" ? VerifyState::CompileOk : v == "CompileFail" ? VerifyState::CompileFail : VerifyState::Unverified;
    p.verify_message = j.value("verify_message", "");
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::IoError, std::string("bad pair record: ") + e.what());
  }
  return p;
}

std::vector<CorpusFile> load_corpus_dir(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw Error(ErrorCode::IoError, "corpus directory " + dir.string() + " not found");
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".v") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<CorpusFile> out;
  for (const auto& f : files) out.push_back(CorpusFile{f.stem().string(), read_file(f)});
  return out;
}

namespace {

struct Described {
  std::optional<InstructionCodePair> pair;
  std::optional<SkipRecord> skip;
  bool llm_failure = false;
};

Described describe(const CorpusFile& file, LlmClient& describer) {
  Described d;
  try {
    minivl::tokenize(file.code);
  } catch (const minivl::TokenizeError& e) {
    spdlog::warn("skipping {}: {}", file.name, e.what());
    d.skip = SkipRecord{file.name, std::string("TokenizeError: ") + e.what()};
    return d;
  }
  auto header = extract_module_header(file.code);
  auto sig = parse_module_header(file.code);
  CompletionRequest req;
  req.template_id = "kdataset.describe.v1";
  req.substitutions = {{"code", file.code},
                       {"module_name", sig ? sig->module_name : file.name},
                       {"header", header ? *header : ""}};
  try {
    InstructionCodePair p;
    p.id = "k-" + file.name;
    p.instruction = describer.complete(req).text;
    p.code = file.code;
    p.stage = Stage::Vanilla;
    d.pair = std::move(p);
  } catch (const Error& e) {
    if (!is_llm_error(e.code())) throw;
    spdlog::warn("describer failed for {}: {}", file.name, e.what());
    d.skip = SkipRecord{file.name, e.what()};
    d.llm_failure = true;
  }
  return d;
}

}  // namespace

VanillaResult build_vanilla_pairs(const std::vector<CorpusFile>& corpus, LlmClient& describer, int workers) {
  auto results = parallel_map<Described>(corpus.size(), workers, [&](size_t i) { return describe(corpus[i], describer); });
  VanillaResult out;
  for (auto& r : results) {
    if (r.pair) out.pairs.push_back(std::move(*r.pair));
    if (r.skip) out.skips.push_back(std::move(*r.skip));
  }
  return out;
}

InstructionCodePair augment_pair(const InstructionCodePair& pair, const Exemplar& exemplar, LlmClient& rewriter) {
  if (pair.stage != Stage::Vanilla)
    throw Error(ErrorCode::PreconditionViolation, "augment_pair needs a vanilla pair, got " + std::string(to_string(pair.stage)));
  CompletionRequest req;
  req.template_id = "kdataset.rewrite.v1";
  req.substitutions = {{"instruction", pair.instruction},
                       {"exemplar_instruction", exemplar.instruction},
                       {"exemplar_topic", exemplar.topic}};
  InstructionCodePair out = pair;
  out.id = pair.id + "+" + exemplar.id;
  out.instruction = rewriter.complete(req).text;
  out.stage = Stage::KnowledgeAugmented;
  out.exemplar_id = exemplar.id;
  out.verify = VerifyState::Unverified;
  out.verify_message.clear();
  return out;
}

VerificationResult verify_compiles(const InstructionCodePair& pair, const Toolchain& toolchain) {
  return toolchain.compile(pair.code);
}

namespace {

struct ItemResult {
  std::vector<InstructionCodePair> records;
  std::vector<SkipRecord> skips;
  KPipelineStats stats;
};

ItemResult run_item(const CorpusFile& file, const ExemplarStore& store, LlmClient& llm, const Toolchain& toolchain) {
  ItemResult r;
  r.stats.files = 1;
  Described d = describe(file, llm);
  if (d.skip) r.skips.push_back(*d.skip);
  if (d.llm_failure) ++r.stats.llm_failures;
  if (!d.pair) return r;
  ++r.stats.vanilla;

  std::vector<InstructionCodePair> candidates{*d.pair};
  auto matched = match_exemplars(analyze(file.code), store);
  r.stats.matched = matched.size();
  for (const auto& ex : matched) {
    try {
      candidates.push_back(augment_pair(*d.pair, ex, llm));
      ++r.stats.augmented;
    } catch (const Error& e) {
      if (!is_llm_error(e.code())) throw;
      spdlog::warn("rewriter failed for {} with exemplar {}: {}", file.name, ex.id, e.what());
      r.skips.push_back(SkipRecord{file.name + "+" + ex.id, e.what()});
      ++r.stats.llm_failures;
    }
  }
  // Every candidate carries the same code, but each record is verified on its own.
  for (auto& c : candidates) {
    auto v = verify_compiles(c, toolchain);
    if (v.ok) {
      c.verify = VerifyState::CompileOk;
      r.records.push_back(std::move(c));
    } else {
      ++r.stats.compile_failures;
      spdlog::info("dropping {}: does not compile", c.id);
      r.skips.push_back(SkipRecord{c.id, "CompileFail: " + trim(v.diagnostics)});
    }
  }
  return r;
}

}  // namespace

KPipelineResult run_k_pipeline(const std::vector<CorpusFile>& corpus, const ExemplarStore& store, LlmClient& llm,
                               const Toolchain& toolchain, int workers) {
  auto items = parallel_map<ItemResult>(corpus.size(), workers,
                                        [&](size_t i) { return run_item(corpus[i], store, llm, toolchain); });
  KPipelineResult out;
  for (auto& it : items) {
    for (auto& rec : it.records) out.records.push_back(std::move(rec));
    for (auto& s : it.skips) out.skips.push_back(std::move(s));
    out.stats.files += it.stats.files;
    out.stats.vanilla += it.stats.vanilla;
    out.stats.matched += it.stats.matched;
    out.stats.augmented += it.stats.augmented;
    out.stats.llm_failures += it.stats.llm_failures;
    out.stats.compile_failures += it.stats.compile_failures;
  }
  return out;
}

}  // namespace haven
