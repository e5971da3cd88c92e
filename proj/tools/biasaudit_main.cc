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

// biasaudit command line: audit, explain, gen and check-endpoint.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "biasaudit/errors.h"
#include "biasaudit/inference_client.h"
#include "biasaudit/report.h"
#include "biasaudit/text_util.h"
#include "json.hpp"

namespace {

using biasaudit::AuditConfig;

int ReportError(const biasaudit::AuditError& e) {
  nlohmann::ordered_json body;
  body["error"] = biasaudit::ErrorKindName(e.kind());
  body["message"] = e.what();
  std::cerr << body.dump() << "\n";
  return 1;
}

AuditConfig LoadConfig(const std::string& path) {
  if (path.empty()) {
    // No config file: demo corpus scored by the built-in lexicon classifier.
    AuditConfig config;
    biasaudit::ClassifierSpec spec;
    spec.name = "builtin-lexicon";
    config.classifiers.push_back(spec);
    if (const char* token = std::getenv(biasaudit::kTokenEnvVar)) {
      config.client.bearer_token = token;
    }
    return config;
  }
  return AuditConfig::Load(path);
}

int RunAuditCommand(const std::string& config_path, const std::string& output_dir,
                    bool skip_failed) {
  AuditConfig config = LoadConfig(config_path);
  if (!output_dir.empty()) config.output_dir = output_dir;
  if (skip_failed) config.client.skip_failed = true;
  const biasaudit::AuditResult result = biasaudit::RunAudit(config);
  std::cout << "run " << result.run.run_id << ": " << result.run.counterfactuals
            << " counterfactuals, " << result.run.score_rows << " score rows, "
            << result.disparities.size() << " disparity reports";
  if (result.run.gaps > 0) std::cout << ", " << result.run.gaps << " gaps";
  std::cout << "\n";
  std::cout << biasaudit::RenderMarkdown(biasaudit::BuildDisparityTable(result.disparities));
  std::cout << "outputs in " << config.output_dir << "\n";
  return 0;
}

int RunExplainCommand(const std::string& config_path, const std::string& output_dir,
                      const std::string& text, const std::string& axis_name,
                      const std::vector<std::string>& descriptors,
                      const std::string& classifier) {
  AuditConfig config = LoadConfig(config_path);
  if (!output_dir.empty()) config.output_dir = output_dir;
  const auto axis = biasaudit::ParseAxis(axis_name);
  if (!axis) throw biasaudit::ConfigError("unknown axis '" + axis_name + "'");
  const std::vector<biasaudit::ExplainItem> items =
      biasaudit::RunExplain(config, text, *axis, descriptors, classifier);
  for (const biasaudit::ExplainItem& item : items) {
    const biasaudit::Attribution& a = item.attribution;
    std::printf("%s\n  method=%s base=%.4f full=%.4f sum(phi)=%.4f\n",
                item.counterfactual.text.c_str(),
                std::string(biasaudit::AttributionMethodName(a.method)).c_str(), a.base_value,
                a.full_value, a.PhiSum());
    if (item.split.descriptor_unit) {
      std::printf("  phi[%s]=%+.4f\n", a.units[*item.split.descriptor_unit].c_str(),
                  a.phi[*item.split.descriptor_unit]);
    }
  }
  std::cout << "attributions in "
            << (std::filesystem::path(config.output_dir) / "attribution").string() << "\n";
  return 0;
}

int RunGenCommand(const std::string& config_path, const std::string& output_dir,
                  bool to_stdout) {
  AuditConfig config = LoadConfig(config_path);
  if (!output_dir.empty()) config.output_dir = output_dir;
  const std::string jsonl =
      biasaudit::CounterfactualsToJsonl(biasaudit::GenerateCounterfactuals(config));
  if (to_stdout) {
    std::cout << jsonl;
    return 0;
  }
  std::filesystem::create_directories(config.output_dir);
  const std::string path =
      (std::filesystem::path(config.output_dir) / "counterfactuals.jsonl").string();
  biasaudit::WriteFile(path, jsonl);
  std::cout << "wrote " << path << "\n";
  return 0;
}

int RunCheckEndpointCommand(const std::string& url, const std::vector<std::string>& models,
                            const std::string& token) {
  biasaudit::ClientOptions options;
  options.retries = 1;
  options.initial_backoff = std::chrono::milliseconds(100);
  options.timeout = std::chrono::milliseconds(10000);
  if (!token.empty()) {
    options.bearer_token = token;
  } else if (const char* env = std::getenv(biasaudit::kTokenEnvVar)) {
    options.bearer_token = env;
  }
  const biasaudit::ScoreClient client(biasaudit::Endpoint::Parse(url), options);
  const biasaudit::ConformanceReport report = biasaudit::CheckEndpoint(client, models);
  for (const biasaudit::ConformanceCheck& check : report.checks) {
    std::printf("%s  %s  %s\n", check.passed ? "PASS" : "FAIL", check.name.c_str(),
                check.detail.c_str());
  }
  std::printf("%s\n", report.passed() ? "endpoint conforms" : "endpoint does NOT conform");
  return report.passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Counterfactual bias audit of bias-metric classifiers"};
  app.require_subcommand(1);

  std::string config_path;
  std::string output_dir;

  auto* audit = app.add_subcommand("audit", "Score counterfactuals and compute disparities");
  bool skip_failed = false;
  audit->add_option("--config", config_path, "JSON config file (default: demo corpus)");
  audit->add_option("--out", output_dir, "Override output_dir");
  audit->add_flag("--skip-failed", skip_failed,
                  "Record failed remote chunks as gaps instead of aborting");

  auto* explain = app.add_subcommand("explain", "Shapley attribution per descriptor");
  std::string text;
  std::string axis;
  std::vector<std::string> descriptors;
  std::string classifier;
  explain->add_option("--config", config_path, "JSON config file");
  explain->add_option("--out", output_dir, "Override output_dir");
  explain->add_option("--text", text, "Source sentence")->required();
  explain->add_option("--axis", axis, "gender, profession, race or religion")->required();
  explain->add_option("--descriptor", descriptors,
                      "Descriptor to explain (repeatable; default: whole axis)");
  explain->add_option("--classifier", classifier, "Classifier name (default: first)");

  auto* gen = app.add_subcommand("gen", "Write counterfactuals only");
  bool to_stdout = false;
  gen->add_option("--config", config_path, "JSON config file");
  gen->add_option("--out", output_dir, "Override output_dir");
  gen->add_flag("--stdout", to_stdout, "Print JSONL instead of writing a file");

  auto* check = app.add_subcommand("check-endpoint", "Probe a /v1/score server");
  std::string url;
  std::vector<std::string> models;
  std::string token;
  check->add_option("--url", url, "Base URL, e.g. http://127.0.0.1:8080")->required();
  check->add_option("--model", models, "Model to probe (repeatable; default: all)");
  check->add_option("--token", token, "Bearer token (default: $BIASAUDIT_TOKEN)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (audit->parsed()) return RunAuditCommand(config_path, output_dir, skip_failed);
    if (explain->parsed()) {
      return RunExplainCommand(config_path, output_dir, text, axis, descriptors, classifier);
    }
    if (gen->parsed()) return RunGenCommand(config_path, output_dir, to_stdout);
    if (check->parsed()) return RunCheckEndpointCommand(url, models, token);
  } catch (const biasaudit::AuditError& e) {
    return ReportError(e);
  } catch (const std::exception& e) {
    std::cerr << nlohmann::json{{"error", "internal"}, {"message", e.what()}}.dump() << "\n";
    return 1;
  }
  return 2;
}
