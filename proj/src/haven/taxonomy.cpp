#include "haven/taxonomy.hpp"

#include <set>

#include "haven/error.hpp"

namespace haven {

const std::vector<Subtype>& all_subtypes() {
  static const std::vector<Subtype> all = {
      Subtype::StateDiagramMisinterpretation,         Subtype::WaveformChartMisinterpretation,
      Subtype::TruthTableMisinterpretation,           Subtype::DigitalDesignConventionMisapplication,
      Subtype::VerilogSyntaxMisapplication,           Subtype::VerilogSpecificAttributeMisunderstanding,
      Subtype::IncorrectLogicalExpression,            Subtype::IncorrectCornerCaseHandling,
      Subtype::InstructionalLogicFailure,
  };
  return all;
}

Category category_of(Subtype s) {
  switch (s) {
    case Subtype::StateDiagramMisinterpretation:
    case Subtype::WaveformChartMisinterpretation:
    case Subtype::TruthTableMisinterpretation: return Category::Symbolic;
    case Subtype::DigitalDesignConventionMisapplication:
    case Subtype::VerilogSyntaxMisapplication:
    case Subtype::VerilogSpecificAttributeMisunderstanding: return Category::Knowledge;
    case Subtype::IncorrectLogicalExpression:
    case Subtype::IncorrectCornerCaseHandling:
    case Subtype::InstructionalLogicFailure: return Category::Logical;
  }
  return Category::Symbolic;
}

const char* to_string(Category c) {
  switch (c) {
    case Category::Symbolic: return "Symbolic";
    case Category::Knowledge: return "Knowledge";
    case Category::Logical: return "Logical";
  }
  return "?";
}

const char* to_string(Subtype s) {
  switch (s) {
    case Subtype::StateDiagramMisinterpretation: return "StateDiagramMisinterpretation";
    case Subtype::WaveformChartMisinterpretation: return "WaveformChartMisinterpretation";
    case Subtype::TruthTableMisinterpretation: return "TruthTableMisinterpretation";
    case Subtype::DigitalDesignConventionMisapplication: return "DigitalDesignConventionMisapplication";
    case Subtype::VerilogSyntaxMisapplication: return "VerilogSyntaxMisapplication";
    case Subtype::VerilogSpecificAttributeMisunderstanding: return "VerilogSpecificAttributeMisunderstanding";
    case Subtype::IncorrectLogicalExpression: return "IncorrectLogicalExpression";
    case Subtype::IncorrectCornerCaseHandling: return "IncorrectCornerCaseHandling";
    case Subtype::InstructionalLogicFailure: return "InstructionalLogicFailure";
  }
  return "?";
}

std::optional<Category> category_from_string(const std::string& s) {
  for (Category c : {Category::Symbolic, Category::Knowledge, Category::Logical})
    if (s == to_string(c)) return c;
  return std::nullopt;
}

std::optional<Subtype> subtype_from_string(const std::string& s) {
  for (Subtype t : all_subtypes())
    if (s == to_string(t)) return t;
  return std::nullopt;
}

Json HallucinationLabel::to_json() const { return Json{{"category", to_string(category)}, {"subtype", to_string(subtype)}}; }

HallucinationLabel HallucinationLabel::from_json(const Json& j) {
  auto cat = category_from_string(j.value("category", ""));
  auto sub = subtype_from_string(j.value("subtype", ""));
  if (!cat) throw Error(ErrorCode::CorpusInvalid, "unknown category '" + j.value("category", "") + "'");
  if (!sub) throw Error(ErrorCode::CorpusInvalid, "unknown subtype '" + j.value("subtype", "") + "'");
  if (category_of(*sub) != *cat)
    throw Error(ErrorCode::CorpusInvalid, std::string(to_string(*sub)) + " belongs to " + to_string(category_of(*sub)) +
                                              ", not " + to_string(*cat));
  return HallucinationLabel{*cat, *sub};
}

CheckKind designated_check(Subtype s) {
  return s == Subtype::VerilogSyntaxMisapplication ? CheckKind::Compile : CheckKind::Testbench;
}

CaseCheck check_case(const RegressionCase& c, const Toolchain& toolchain) {
  CaseCheck r;
  r.id = c.id;
  r.kind = designated_check(c.label.subtype);
  if (r.kind == CheckKind::Compile) {
    auto v = toolchain.compile(c.incorrect_code);
    r.rejected = !v.ok;
    r.detail = trim(v.diagnostics);
    if (!c.fixed_code.empty()) r.fixed_passes = toolchain.compile(c.fixed_code).ok;
    return r;
  }
  if (c.testbench.empty()) {
    r.detail = "no testbench";
    return r;
  }
  auto v = toolchain.compile(c.incorrect_code);
  if (!v.ok) {
    // A functional case must fail on behavior, not on syntax.
    r.detail = "incorrect_code does not compile: " + trim(v.diagnostics);
    return r;
  }
  auto s = toolchain.simulate(c.testbench, "", c.incorrect_code);
  r.rejected = !s.pass;
  r.detail = trim(s.output);
  if (!c.fixed_code.empty()) r.fixed_passes = toolchain.simulate(c.testbench, "", c.fixed_code).pass;
  return r;
}

std::vector<RegressionCase> load_corpus(const std::filesystem::path& path, const Toolchain* toolchain) {
  std::vector<RegressionCase> out;
  std::set<Subtype> seen;
  int index = 0;
  for (const auto& j : read_jsonl(path)) {
    ++index;
    RegressionCase c;
    c.label = HallucinationLabel::from_json(j);
    c.id = j.value("id", "case-" + std::to_string(index));
    try {
      c.prompt = j.at("prompt").get<std::string>();
      c.incorrect_code = j.at("incorrect_code").get<std::string>();
      c.analysis = j.at("analysis").get<std::string>();
    } catch (const Json::exception& e) {
      throw Error(ErrorCode::CorpusInvalid, c.id + ": " + e.what());
    }
    c.testbench = j.value("testbench", "");
    c.fixed_code = j.value("fixed_code", "");
    c.adapted = j.value("adapted", false);
    if (designated_check(c.label.subtype) == CheckKind::Testbench && c.testbench.empty())
      throw Error(ErrorCode::CorpusInvalid, c.id + ": functional case without a testbench");
    seen.insert(c.label.subtype);
    out.push_back(std::move(c));
  }
  for (Subtype s : all_subtypes())
    if (!seen.count(s)) throw Error(ErrorCode::CorpusInvalid, std::string("no case for subtype ") + to_string(s));
  if (toolchain) {
    for (const auto& c : out) {
      auto r = check_case(c, *toolchain);
      if (!r.rejected) throw Error(ErrorCode::CorpusInvalid, c.id + ": incorrect code passes its check (" + r.detail + ")");
      if (r.fixed_passes && !*r.fixed_passes) throw Error(ErrorCode::CorpusInvalid, c.id + ": fixed code fails its check");
    }
  }
  return out;
}

}  // namespace haven
