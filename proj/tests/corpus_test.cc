/*
 * Copyright 2026 The biasaudit Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "biasaudit/corpus.h"

#include <filesystem>
#include <fstream>
#include <random>

#include "biasaudit/embedded_data.h"
#include "biasaudit/errors.h"
#include "gtest/gtest.h"

namespace biasaudit {
namespace {

TEST(LoadCorpus, JsonlRecord) {
  const Corpus corpus = ParseCorpus(
      R"({"id":"7","text":"The Finnish man was very energetic","label":"stereotype","axis":"gender"})",
      CorpusFormat::kJsonl);
  ASSERT_EQ(corpus.records.size(), 1);
  EXPECT_EQ(corpus.records[0].id, "7");
  EXPECT_EQ(corpus.records[0].text, "The Finnish man was very energetic");
  EXPECT_EQ(corpus.records[0].axis, Axis::kGender);
  EXPECT_TRUE(corpus.records[0].label.is_stereotype());
  EXPECT_EQ(corpus.format_version, "jsonl/1");
}

TEST(LoadCorpus, EmptyFileGivesEmptyCorpus) {
  EXPECT_TRUE(ParseCorpus("", CorpusFormat::kJsonl).records.empty());
  EXPECT_TRUE(ParseCorpus("", CorpusFormat::kCsv).records.empty());
  EXPECT_TRUE(ParseCorpus("\n\n", CorpusFormat::kJsonl).records.empty());
}

TEST(LoadCorpus, CsvMissingLabelCitesLine) {
  const std::string csv =
      "id,text,label,axis\n"
      "a,The nurse was kind,stereotype,profession\n"
      "b,The banker was greedy,stereotype,profession\n"
      "c,The monk was quiet,,religion\n"
      "d,The man was strong,stereotype,gender\n";
  try {
    ParseCorpus(csv, CorpusFormat::kCsv);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 4);
    EXPECT_NE(std::string(e.what()).find("label"), std::string::npos);
  }
}

TEST(LoadCorpus, CsvShortRowIsMissingField) {
  const std::string csv = "text,label,axis\nThe man was tall,stereotype\n";
  try {
    ParseCorpus(csv, CorpusFormat::kCsv);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2);
  }
}

TEST(LoadCorpus, CsvQuotingAndSynthesizedIds) {
  const std::string csv =
      "text,label,axis\r\n"
      "\"He said \"\"hi\"\", then left\",Stereotype,RACE\r\n"
      "\"Two\nlines\",non_stereotype,religion\r\n"
      "The cook was loud,unrelated,profession\r\n";
  const Corpus corpus = ParseCorpus(csv, CorpusFormat::kCsv);
  ASSERT_EQ(corpus.records.size(), 3);
  EXPECT_EQ(corpus.records[0].id, "0");
  EXPECT_EQ(corpus.records[0].text, "He said \"hi\", then left");
  EXPECT_TRUE(corpus.records[0].label.is_stereotype());
  EXPECT_EQ(corpus.records[0].axis, Axis::kRace);
  EXPECT_EQ(corpus.records[1].id, "1");
  EXPECT_EQ(corpus.records[1].text, "Two\nlines");
  EXPECT_EQ(corpus.records[1].label.kind, Label::Kind::kNonStereotype);
  EXPECT_EQ(corpus.records[2].label.kind, Label::Kind::kOther);
  EXPECT_EQ(corpus.records[2].label.raw, "unrelated");
}

TEST(LoadCorpus, CsvLineNumbersCountEmbeddedNewlines) {
  const std::string csv =
      "text,label,axis\n"
      "\"multi\nline\",stereotype,gender\n"
      "bad row,stereotype,planets\n";
  try {
    ParseCorpus(csv, CorpusFormat::kCsv);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 4);
  }
}

TEST(LoadCorpus, UnknownAxisAborts) {
  const std::string jsonl =
      R"({"text":"a","label":"stereotype","axis":"gender"})" "\n"
      R"({"text":"b","label":"stereotype","axis":"age"})" "\n";
  try {
    ParseCorpus(jsonl, CorpusFormat::kJsonl);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2);
    EXPECT_NE(std::string(e.what()).find("age"), std::string::npos);
  }
}

TEST(LoadCorpus, JsonlErrors) {
  EXPECT_THROW(ParseCorpus(R"({"text":"a","axis":"gender"})", CorpusFormat::kJsonl),
               ParseError);
  EXPECT_THROW(ParseCorpus("{not json", CorpusFormat::kJsonl), ParseError);
  EXPECT_THROW(ParseCorpus(R"({"text":"   ","label":"stereotype","axis":"race"})",
                           CorpusFormat::kJsonl),
               ParseError);
  EXPECT_THROW(ParseCorpus(R"({"id":"1","text":"a","label":"stereotype","axis":"race"})" "\n"
                           R"({"id":"1","text":"b","label":"stereotype","axis":"race"})",
                           CorpusFormat::kJsonl),
               ParseError);
}

TEST(LoadCorpus, UnreadableFileIsIoError) {
  EXPECT_THROW(LoadCorpus("/nonexistent/corpus.jsonl", CorpusFormat::kJsonl), IoError);
}

TEST(LoadCorpus, LoadsFromDiskWithSourcePath) {
  const auto path = std::filesystem::temp_directory_path() / "biasaudit_corpus_test.jsonl";
  {
    std::ofstream out(path);
    out << DemoCorpusJsonl();
  }
  const Corpus corpus = LoadCorpus(path.string(), CorpusFormat::kJsonl);
  EXPECT_EQ(corpus.records.size(), 8);
  EXPECT_EQ(corpus.source_path, path.string());
  EXPECT_EQ(corpus, LoadCorpus(path.string(), CorpusFormat::kJsonl));
  std::filesystem::remove(path);
}

StereotypeRecord Rec(std::string id, std::string label) {
  return {std::move(id), "text", Label::Parse(label), Axis::kRace};
}

TEST(FilterStereotypes, KeepsStereotypesInOrder) {
  Corpus corpus;
  corpus.records = {Rec("a", "stereotype"), Rec("b", "non_stereotype"), Rec("c", "stereotype")};
  const Corpus filtered = FilterStereotypes(corpus);
  ASSERT_EQ(filtered.records.size(), 2);
  EXPECT_EQ(filtered.records[0].id, "a");
  EXPECT_EQ(filtered.records[1].id, "c");
}

TEST(FilterStereotypes, EmptyAndIdentityCases) {
  Corpus none;
  none.records = {Rec("a", "neutral"), Rec("b", "non_stereotype")};
  EXPECT_TRUE(FilterStereotypes(none).records.empty());

  Corpus all;
  all.records = {Rec("a", "stereotype"), Rec("b", " STEREOTYPE ")};
  EXPECT_EQ(FilterStereotypes(all), all);
}

TEST(FilterStereotypes, IdempotentAndShrinkingOnRandomCorpora) {
  std::mt19937_64 rng(7);
  const char* labels[] = {"stereotype", "non_stereotype", "unrelated", "Stereotype"};
  for (int trial = 0; trial < 200; ++trial) {
    Corpus corpus;
    const size_t n = rng() % 20;
    for (size_t i = 0; i < n; ++i) corpus.records.push_back(Rec(std::to_string(i), labels[rng() % 4]));
    const Corpus once = FilterStereotypes(corpus);
    EXPECT_EQ(FilterStereotypes(once), once);
    EXPECT_LE(once.records.size(), corpus.records.size());
  }
}

TEST(ParseAxis, CaseInsensitive) {
  EXPECT_EQ(ParseAxis(" Religion "), Axis::kReligion);
  EXPECT_EQ(ParseAxis("PROFESSION"), Axis::kProfession);
  EXPECT_FALSE(ParseAxis("age").has_value());
}

}  // namespace
}  // namespace biasaudit
