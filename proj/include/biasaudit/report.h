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

#ifndef BIASAUDIT_REPORT_H_
#define BIASAUDIT_REPORT_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "biasaudit/attribution.h"
#include "biasaudit/classifiers.h"
#include "biasaudit/corpus.h"
#include "biasaudit/counterfactual.h"
#include "biasaudit/inference_client.h"
#include "biasaudit/metrics.h"
#include "json.hpp"

namespace biasaudit {

// Environment variable that supplies the bearer token for remote classifiers.
inline constexpr char kTokenEnvVar[] = "BIASAUDIT_TOKEN";

enum class TableFormat { kCsv, kJson, kMarkdown };

std::optional<TableFormat> ParseTableFormat(std::string_view name);

struct AttributionSettings {
  // "auto" picks exact up to exact_limit units and kernel beyond.
  std::string method = "auto";
  size_t exact_limit = kDefaultExactLimit;
  size_t samples = 2048;
  size_t permutations = 2000;
  uint64_t seed = 42;
  bool group_descriptors = true;
};

struct AuditConfig {
  // Empty path selects the built-in demo corpus.
  std::string corpus_path;
  CorpusFormat corpus_format = CorpusFormat::kJsonl;
  std::vector<ClassifierSpec> classifiers;
  uint64_t seed = 42;
  DescriptorCatalog catalog = DescriptorCatalog::Default();
  std::vector<std::string> prefixes = PrefixSet::Default().prefixes;
  std::vector<std::string> proper_nouns;
  std::string output_dir = "audit_out";
  ClientOptions client;
  AttributionSettings attribution;
  TableFormat table_format = TableFormat::kCsv;

  // Relative paths in `config` resolve against `base_dir`. Throws ConfigError.
  static AuditConfig FromJson(const nlohmann::json& config,
                              const std::string& base_dir = ".");
  // Reads a JSON config file; the bearer token comes from kTokenEnvVar.
  static AuditConfig Load(const std::string& path);

  // Throws ConfigError when no classifier is configured or a spec is unusable.
  void Validate() const;
  PrefixSet prefix_set() const { return PrefixSet{prefixes, seed}; }
  // Snapshot for run.json. The bearer token is never included.
  nlohmann::ordered_json ToJson() const;
};

// Builds the classifier named by `spec`.
std::unique_ptr<Classifier> MakeClassifier(const ClassifierSpec& spec,
                                           const ClientOptions& client);

struct AuditRunRecord {
  std::string run_id;
  nlohmann::ordered_json config;
  std::string corpus_sha256;
  size_t corpus_records = 0;
  size_t stereotype_records = 0;
  size_t counterfactuals = 0;
  size_t score_rows = 0;
  size_t gaps = 0;
  std::vector<std::pair<std::string, std::string>> model_versions;
  std::vector<FailedChunk> failures;
  std::string started_at;
  std::string finished_at;

  nlohmann::ordered_json ToJson() const;
};

struct AuditResult {
  std::vector<Counterfactual> counterfactuals;
  std::vector<ScoreRow> rows;
  std::vector<DescriptorMean> means;
  std::vector<DisparityReport> disparities;
  AuditRunRecord run;
};

// Loads the configured corpus (or the demo corpus) and keeps the raw bytes for
// fingerprinting.
struct LoadedCorpus {
  Corpus corpus;
  std::string bytes;
};
LoadedCorpus LoadConfiguredCorpus(const AuditConfig& config);

// load -> filter -> generate, with no scoring.
std::vector<Counterfactual> GenerateCounterfactuals(const AuditConfig& config);

// load -> filter -> generate -> score -> aggregate -> disparity. When
// `write_outputs` is set, writes counterfactuals.jsonl, scores.jsonl,
// means.csv, disparity.csv, table1.*, table2.* and run.json to output_dir.
AuditResult RunAudit(const AuditConfig& config, bool write_outputs = true);

struct ExplainItem {
  Counterfactual counterfactual;
  TokenSplit split;
  Attribution attribution;
};

// Builds one counterfactual per descriptor (shared prefix) for `text` and
// attributes the score of `classifier_name` (empty: first configured) to its
// units. Empty `descriptors` means the whole catalog list for `axis`. When
// `write_outputs` is set, writes attribution/<descriptor>.json and .svg.
std::vector<ExplainItem> RunExplain(const AuditConfig& config, std::string_view text,
                                    Axis axis, std::vector<std::string> descriptors,
                                    std::string_view classifier_name = "",
                                    bool write_outputs = true);

// A rendered table: header row plus body rows of already-formatted cells.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// Rows = axis x {Max-Min, Min/Max}; columns = classifiers.
Table BuildDisparityTable(const std::vector<DisparityReport>& disparities);
// Rows = axis x descriptor plus an Overall row per axis; columns = classifiers.
Table BuildMeansTable(const std::vector<DescriptorMean>& means,
                      const std::vector<DisparityReport>& disparities);

std::string RenderCsv(const Table& table);
std::string RenderMarkdown(const Table& table);
std::string RenderJson(const Table& table);

// Writes table1.<ext> (disparities) and table2.<ext> (means) into
// `output_dir`, which must exist. Returns the written paths. Throws IoError.
std::vector<std::string> EmitTables(const std::vector<DescriptorMean>& means,
                                    const std::vector<DisparityReport>& disparities,
                                    TableFormat format, const std::string& output_dir);

// Fixed three-decimal rendering of a rounded value; "" for nullopt.
std::string FormatScore(std::optional<double> value);

// Safe file stem for a descriptor ("Construction workers" -> "Construction_workers").
std::string DescriptorFileStem(std::string_view descriptor);

}  // namespace biasaudit

#endif  // BIASAUDIT_REPORT_H_
