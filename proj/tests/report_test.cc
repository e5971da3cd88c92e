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

#include "biasaudit/report.h"

#include <atomic>
#include <filesystem>
#include <set>

#include <unistd.h>

#include "biasaudit/errors.h"
#include "biasaudit/text_util.h"
#include "gtest/gtest.h"
#include "support/reference_tables.h"

namespace biasaudit {
namespace {

namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = fs::temp_directory_path() /
            ("biasaudit_report_test_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string str() const { return path_.string(); }
  std::string operator/(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

AuditConfig DemoConfig(const std::string& out_dir) {
  return AuditConfig::FromJson({{"classifiers", {{{"name", "vader"}}}},
                                {"output_dir", out_dir}});
}

size_t CountLines(const std::string& text) {
  return static_cast<size_t>(std::count(text.begin(), text.end(), '\n'));
}

TEST(AuditConfig, Defaults) {
  const AuditConfig config = AuditConfig::FromJson({{"classifiers", {{{"name", "vader"}}}}});
  EXPECT_EQ(config.seed, 42);
  EXPECT_TRUE(config.corpus_path.empty());
  ASSERT_EQ(config.classifiers.size(), 1);
  EXPECT_EQ(config.classifiers[0].kind, ClassifierKind::kBuiltin);
  EXPECT_EQ(config.classifiers[0].channel, Channel::kNegative);
  EXPECT_EQ(config.attribution.method, "auto");
  EXPECT_EQ(config.attribution.exact_limit, 12);
  EXPECT_EQ(config.table_format, TableFormat::kCsv);
}

TEST(AuditConfig, RemoteClassifierAndPaths) {
  const AuditConfig config = AuditConfig::FromJson(
      {{"corpus", {{"path", "data/mgsd.csv"}, {"format", "csv"}}},
       {"classifiers",
        {{{"name", "detoxify"}, {"endpoint", "http://localhost:8000"}}}},
       {"client", {{"batch_size", 8}, {"skip_failed", true}}},
       {"table_format", "markdown"}},
      "/work");
  EXPECT_EQ(config.corpus_path, "/work/data/mgsd.csv");
  EXPECT_EQ(config.corpus_format, CorpusFormat::kCsv);
  EXPECT_EQ(config.classifiers[0].kind, ClassifierKind::kRemote);
  EXPECT_EQ(config.classifiers[0].channel, Channel::kToxicity);
  EXPECT_EQ(config.client.batch_size, 8);
  EXPECT_TRUE(config.client.skip_failed);
  EXPECT_EQ(config.table_format, TableFormat::kMarkdown);
}

TEST(AuditConfig, Rejections) {
  EXPECT_THROW(AuditConfig::FromJson({{"classifiers", {{{"name", "v"}}}}, {"colour", 1}}),
               ConfigError);
  EXPECT_THROW(AuditConfig::FromJson({{"classifiers", {{{"name", "v"}, {"channel", "joy"}}}}}),
               ConfigError);
  EXPECT_THROW(AuditConfig::FromJson(
                   {{"classifiers", {{{"name", "v"}}}}, {"attribution", {{"method", "lime"}}}}),
               ConfigError);
  EXPECT_THROW(AuditConfig::FromJson({{"classifiers", {{{"name", "v"}}}},
                                      {"descriptors", {{"planet", {"Martians"}}}}}),
               ConfigError);
  AuditConfig twice = AuditConfig::FromJson({{"classifiers", {{{"name", "v"}}, {{"name", "v"}}}}});
  EXPECT_THROW(twice.Validate(), ConfigError);
}

TEST(RunAudit, ZeroClassifiersFailsBeforeWork) {
  TempDir dir;
  AuditConfig config = DemoConfig(dir / "out");
  config.classifiers.clear();
  EXPECT_THROW(RunAudit(config), ConfigError);
  EXPECT_FALSE(fs::exists(dir / "out"));
}

TEST(RunAudit, DemoCorpusCounts) {
  TempDir dir;
  const AuditResult result = RunAudit(DemoConfig(dir / "out"));
  EXPECT_EQ(result.counterfactuals.size(), 30);
  EXPECT_EQ(result.rows.size(), 30);
  EXPECT_EQ(result.disparities.size(), 4);
  EXPECT_EQ(result.run.stereotype_records, 8);
  EXPECT_EQ(result.run.run_id.size(), 16);
  for (const char* name : {"counterfactuals.jsonl", "scores.jsonl", "means.csv",
                           "disparity.csv", "table1.csv", "table2.csv", "run.json"}) {
    EXPECT_TRUE(fs::exists(dir / (std::string("out/") + name))) << name;
  }
  EXPECT_EQ(CountLines(ReadFile(dir / "out/counterfactuals.jsonl")), 30);
  EXPECT_EQ(CountLines(ReadFile(dir / "out/scores.jsonl")), 30);
  const auto run = nlohmann::json::parse(ReadFile(dir / "out/run.json"));
  EXPECT_EQ(run["run_id"], result.run.run_id);
  EXPECT_EQ(run["counts"]["counterfactuals"], 30);
  EXPECT_EQ(run["corpus"]["records"], 8);
}

TEST(RunAudit, DeterministicOutputs) {
  TempDir dir;
  const AuditResult first = RunAudit(DemoConfig(dir / "a"));
  const AuditResult second = RunAudit(DemoConfig(dir / "a"));
  RunAudit(DemoConfig(dir / "b"));
  EXPECT_EQ(first.run.run_id, second.run.run_id);
  for (const char* name : {"means.csv", "disparity.csv", "counterfactuals.jsonl"}) {
    EXPECT_EQ(ReadFile(dir / (std::string("a/") + name)),
              ReadFile(dir / (std::string("b/") + name)))
        << name;
  }
}

TEST(RunAudit, CounterfactualsMatchGolden) {
  TempDir dir;
  RunAudit(DemoConfig(dir.str()));
  EXPECT_EQ(ReadFile(dir / "counterfactuals.jsonl"),
            ReadFile(testing::FixturePath("demo_counterfactuals.jsonl")));
}

TEST(RunAudit, DescriptorFreeLexiconGivesEqualMeansOnSingleTokenAxes) {
  TempDir dir;
  const AuditResult result = RunAudit(DemoConfig(dir.str()), false);
  for (const DisparityReport& d : result.disparities) {
    if (d.axis == Axis::kProfession) continue;  // two-token descriptor
    EXPECT_EQ(d.max_min, 0.0) << AxisName(d.axis);
    EXPECT_EQ(d.min_max, 1.0) << AxisName(d.axis);
  }
}

TEST(RunAudit, ValencedDescriptorBreaksNeutrality) {
  TempDir dir;
  WriteFile(dir / "lexicon.tsv", ReadFile(std::string(BIASAUDIT_DATA_DIR) + "/default_lexicon.tsv") +
                                     "\n!valence\nmuslims\t-1.5\n");
  AuditConfig config = AuditConfig::FromJson(
      {{"classifiers", {{{"name", "vader"}, {"lexicon", dir / "lexicon.tsv"}}}},
       {"output_dir", dir / "out"}});
  const AuditResult result = RunAudit(config, false);
  for (const DisparityReport& d : result.disparities) {
    if (d.axis != Axis::kReligion) continue;
    EXPECT_GT(d.max_min, 0.0);
    EXPECT_LT(*d.min_max, 1.0);
  }
}

TEST(RunExplain, ButcherSentence) {
  TempDir dir;
  const AuditConfig config = DemoConfig(dir.str());
  const auto items = RunExplain(config, "He was a butcher for 30 years before retiring",
                                Axis::kProfession, {});
  ASSERT_EQ(items.size(), 5);
  std::set<std::string> descriptors;
  for (const ExplainItem& item : items) {
    descriptors.insert(item.counterfactual.descriptor);
    ASSERT_TRUE(item.split.descriptor_unit);
    const Attribution& a = item.attribution;
    EXPECT_EQ(a.units.size(), 13);
    EXPECT_EQ(a.method, AttributionMethod::kKernel);
    EXPECT_NEAR(a.PhiSum(), a.full_value - a.base_value, 1e-9);
    EXPECT_EQ(a.phi[*item.split.descriptor_unit], 0.0);
    const std::string stem = DescriptorFileStem(item.counterfactual.descriptor);
    EXPECT_TRUE(fs::exists(dir / ("attribution/" + stem + ".json")));
    EXPECT_TRUE(fs::exists(dir / ("attribution/" + stem + ".svg")));
  }
  EXPECT_EQ(descriptors.size(), 5);
  EXPECT_TRUE(fs::exists(dir / "attribution/Construction_workers.json"));
}

TEST(RunExplain, SingleDescriptor) {
  TempDir dir;
  const auto items = RunExplain(DemoConfig(dir.str()), "They were kind", Axis::kGender,
                                {"Females"}, "", false);
  ASSERT_EQ(items.size(), 1);
  EXPECT_EQ(items[0].attribution.method, AttributionMethod::kExact);
  EXPECT_FALSE(fs::exists(dir / "attribution"));
}

TEST(RunExplain, OnlyValencedDescriptorGetsCredit) {
  TempDir dir;
  WriteFile(dir / "toy.tsv", "!valence\nteachers\t-1.5\n");
  const AuditConfig config = AuditConfig::FromJson(
      {{"classifiers", {{{"name", "toy"}, {"lexicon", dir / "toy.tsv"}}}},
       {"output_dir", dir.str()}});
  const auto items = RunExplain(config, "He was a butcher for 30 years before retiring",
                                Axis::kProfession, {}, "toy", false);
  ASSERT_EQ(items.size(), 5);
  for (const ExplainItem& item : items) {
    const double phi = item.attribution.phi[*item.split.descriptor_unit];
    if (item.counterfactual.descriptor == "Teachers") {
      EXPECT_GT(phi, 0.0);
    } else {
      EXPECT_EQ(phi, 0.0) << item.counterfactual.descriptor;
    }
    EXPECT_NEAR(item.attribution.PhiSum(),
                item.attribution.full_value - item.attribution.base_value, 1e-9);
  }
}

TEST(RunExplain, Errors) {
  TempDir dir;
  const AuditConfig config = DemoConfig(dir.str());
  EXPECT_THROW(RunExplain(config, "   ", Axis::kGender, {}, "", false), ContractError);
  EXPECT_THROW(RunExplain(config, "x", Axis::kGender, {}, "nope", false), ConfigError);
}

std::vector<DisparityReport> ReferenceDisparities() {
  std::vector<DisparityReport> out;
  for (const auto& group : testing::LoadReferenceMeans()) out.push_back(Disparity(group));
  return out;
}

TEST(EmitTables, ReferenceFixtureToTableOne) {
  TempDir dir;
  std::vector<DescriptorMean> means;
  for (const auto& group : testing::LoadReferenceMeans()) {
    means.insert(means.end(), group.begin(), group.end());
  }
  const auto paths = EmitTables(means, ReferenceDisparities(), TableFormat::kCsv, dir.str());
  ASSERT_EQ(paths.size(), 2);
  const auto rows = ParseCsv(ReadFile(paths[0]));
  ASSERT_EQ(rows.size(), 9);
  EXPECT_EQ(rows[0].fields, (std::vector<std::string>{"group", "metric", "vader",
                                                      "distilbert", "detoxify", "regardv3"}));
  const auto published = testing::LoadReferenceDisparities();
  std::set<std::string> mismatched;
  for (size_t r = 1; r < rows.size(); ++r) {
    const auto& f = rows[r].fields;
    const Axis axis = *ParseAxis(AsciiLower(f[0]));
    const std::string metric = f[1] == "Max-Min" ? "max_min" : "min_max";
    for (size_t c = 0; c < 4; ++c) {
      const std::string& classifier = testing::ReferenceClassifiers()[c];
      if (published.at({axis, classifier, metric}) != f[2 + c]) {
        mismatched.insert(f[0] + "/" + classifier + "/" + metric + "=" + f[2 + c]);
      }
    }
  }
  EXPECT_EQ(mismatched, (std::set<std::string>{"Gender/distilbert/min_max=0.930",
                                               "Race/regardv3/min_max=0.935"}));

  const auto table2 = ParseCsv(ReadFile(paths[1]));
  EXPECT_EQ(table2[0].fields[0], "stereotype_type");
  EXPECT_EQ(table2.size(), 1 + 15 + 4);
}

TEST(EmitTables, EmptyInputWritesHeaders) {
  TempDir dir;
  const auto paths = EmitTables({}, {}, TableFormat::kCsv, dir.str());
  EXPECT_EQ(ReadFile(paths[0]), "group,metric\n");
  EXPECT_EQ(CountLines(ReadFile(paths[1])), 1);
}

TEST(EmitTables, MarkdownMirrorsCsv) {
  TempDir dir;
  const auto disparities = ReferenceDisparities();
  const Table table = BuildDisparityTable(disparities);
  const std::string md = RenderMarkdown(table);
  EXPECT_EQ(md.substr(0, md.find('\n')),
            "| group | metric | vader | distilbert | detoxify | regardv3 |");
  EXPECT_NE(md.find("| Gender | Max-Min | 0.000 | 0.029 | 0.031 | 0.024 |"), std::string::npos);
  EXPECT_NE(md.find("| Religion | Min/Max | 1.000 | 0.949 | 0.553 | 0.758 |"),
            std::string::npos);
  const auto paths = EmitTables({}, disparities, TableFormat::kMarkdown, dir.str());
  EXPECT_EQ(fs::path(paths[0]).extension(), ".md");
  EXPECT_EQ(ReadFile(paths[0]), md);
}

TEST(EmitTables, UnwritableDirectory) {
  EXPECT_THROW(EmitTables({}, {}, TableFormat::kCsv, "/nonexistent/biasaudit"), IoError);
}

TEST(FormatScore, RoundingAndNull) {
  EXPECT_EQ(FormatScore(0.0305), "0.031");
  EXPECT_EQ(FormatScore(1.0), "1.000");
  EXPECT_EQ(FormatScore(std::nullopt), "");
}

TEST(DescriptorFileStem, Sanitizes) {
  EXPECT_EQ(DescriptorFileStem("Construction workers"), "Construction_workers");
  EXPECT_EQ(DescriptorFileStem("Non-binaries"), "Non-binaries");
  EXPECT_EQ(DescriptorFileStem("../x"), "___x");
  EXPECT_EQ(DescriptorFileStem(""), "descriptor");
}

}  // namespace
}  // namespace biasaudit
