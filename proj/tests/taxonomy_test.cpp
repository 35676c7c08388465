#include <gtest/gtest.h>

#include "haven/error.hpp"
#include "haven/taxonomy.hpp"
#include "support.hpp"

using namespace haven;

namespace {

TEST(Taxonomy, NineSubtypesInThreeCategories) {
  std::map<Category, int> per;
  for (auto s : all_subtypes()) {
    ++per[category_of(s)];
    EXPECT_EQ(subtype_from_string(to_string(s)), s);
  }
  EXPECT_EQ(all_subtypes().size(), 9u);
  EXPECT_EQ(per[Category::Symbolic], 3);
  EXPECT_EQ(per[Category::Knowledge], 3);
  EXPECT_EQ(per[Category::Logical], 3);
  EXPECT_EQ(designated_check(Subtype::VerilogSyntaxMisapplication), CheckKind::Compile);
  EXPECT_EQ(designated_check(Subtype::TruthTableMisinterpretation), CheckKind::Testbench);
}

TEST(Taxonomy, LabelJson) {
  HallucinationLabel l{Category::Logical, Subtype::IncorrectCornerCaseHandling};
  EXPECT_EQ(HallucinationLabel::from_json(l.to_json()), l);
  try {
    HallucinationLabel::from_json(Json{{"category", "Symbolic"}, {"subtype", "IncorrectCornerCaseHandling"}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::CorpusInvalid);
  }
  EXPECT_THROW(HallucinationLabel::from_json(Json{{"category", "Symbolic"}, {"subtype", "Typo"}}), Error);
}

TEST(Taxonomy, CorpusCasesFailTheirChecks) {
  Toolchain tc(test::tool_config());
  auto cases = load_corpus(test::data_dir() / "taxonomy" / "corpus.jsonl");
  ASSERT_EQ(cases.size(), 9u);
  std::set<Subtype> covered;
  for (const auto& c : cases) {
    covered.insert(c.label.subtype);
    auto r = check_case(c, tc);
    EXPECT_TRUE(r.rejected) << c.id << ": " << r.detail;
    ASSERT_TRUE(r.fixed_passes.has_value()) << c.id;
    EXPECT_TRUE(*r.fixed_passes) << c.id;
    EXPECT_EQ(r.kind, designated_check(c.label.subtype));
  }
  EXPECT_EQ(covered.size(), 9u);
  EXPECT_NO_THROW(load_corpus(test::data_dir() / "taxonomy" / "corpus.jsonl", &tc));
}

TEST(Taxonomy, SyntaxCaseIsPythonDef) {
  Toolchain tc(test::tool_config());
  for (const auto& c : load_corpus(test::data_dir() / "taxonomy" / "corpus.jsonl")) {
    if (c.label.subtype != Subtype::VerilogSyntaxMisapplication) continue;
    EXPECT_NE(c.incorrect_code.find("def adder_4bit"), std::string::npos);
    EXPECT_FALSE(tc.compile(c.incorrect_code).ok);
    return;
  }
  FAIL() << "no syntax case";
}

std::string corpus_without(Subtype drop) {
  std::string out;
  for (const auto& j : read_jsonl(test::data_dir() / "taxonomy" / "corpus.jsonl"))
    if (j["subtype"] != to_string(drop)) out += to_jsonl_line(j);
  return out;
}

TEST(Taxonomy, CoverageGapRejected) {
  test::ScratchDir dir("tax");
  write_file(dir / "c.jsonl", corpus_without(Subtype::IncorrectCornerCaseHandling));
  try {
    load_corpus(dir / "c.jsonl");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::CorpusInvalid);
    EXPECT_NE(e.message().find("IncorrectCornerCaseHandling"), std::string::npos) << e.message();
  }
}

TEST(Taxonomy, PassingIncorrectCodeRejected) {
  Toolchain tc(test::tool_config());
  test::ScratchDir dir("tax");
  std::string text;
  for (auto j : read_jsonl(test::data_dir() / "taxonomy" / "corpus.jsonl")) {
    if (j["subtype"] == "TruthTableMisinterpretation") j["incorrect_code"] = j["fixed_code"];
    text += to_jsonl_line(j);
  }
  write_file(dir / "c.jsonl", text);
  EXPECT_NO_THROW(load_corpus(dir / "c.jsonl"));
  EXPECT_THROW(load_corpus(dir / "c.jsonl", &tc), Error);
}

}  // namespace
