#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "haven/toolchain.hpp"
#include "haven/util.hpp"

namespace haven {

enum class Category { Symbolic, Knowledge, Logical };

enum class Subtype {
  StateDiagramMisinterpretation,
  WaveformChartMisinterpretation,
  TruthTableMisinterpretation,
  DigitalDesignConventionMisapplication,
  VerilogSyntaxMisapplication,
  VerilogSpecificAttributeMisunderstanding,
  IncorrectLogicalExpression,
  IncorrectCornerCaseHandling,
  InstructionalLogicFailure,
};

const std::vector<Subtype>& all_subtypes();
Category category_of(Subtype s);
const char* to_string(Category c);
const char* to_string(Subtype s);
std::optional<Category> category_from_string(const std::string& s);
std::optional<Subtype> subtype_from_string(const std::string& s);

struct HallucinationLabel {
  Category category = Category::Symbolic;
  Subtype subtype = Subtype::StateDiagramMisinterpretation;

  Json to_json() const;
  // Throws Error(CorpusInvalid) for unknown names or a category that does not
  // match the subtype.
  static HallucinationLabel from_json(const Json& j);
  bool operator==(const HallucinationLabel&) const = default;
};

enum class CheckKind { Compile, Testbench };
// Syntax sub-types are checked by compilation, everything else by simulation.
CheckKind designated_check(Subtype s);

struct RegressionCase {
  std::string id;
  HallucinationLabel label;
  std::string prompt;
  std::string incorrect_code;
  std::string analysis;
  std::string testbench;   // required for Testbench checks
  std::string fixed_code;  // optional corrected design; must pass when present
  bool adapted = false;    // reconstructed from an abbreviated snippet
};

struct CaseCheck {
  std::string id;
  CheckKind kind = CheckKind::Compile;
  bool rejected = false;      // incorrect_code fails its check
  std::optional<bool> fixed_passes;
  std::string detail;
};

CaseCheck check_case(const RegressionCase& c, const Toolchain& toolchain);

// Parses the JSON Lines corpus and requires every sub-type to be present.
// With a toolchain, also runs check_case on every case. Throws
// Error(CorpusInvalid) on a coverage gap, a case whose incorrect code passes,
// or a fixed design that fails.
std::vector<RegressionCase> load_corpus(const std::filesystem::path& path, const Toolchain* toolchain = nullptr);

}  // namespace haven
