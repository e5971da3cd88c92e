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

#ifndef BIASAUDIT_INFERENCE_CLIENT_H_
#define BIASAUDIT_INFERENCE_CLIENT_H_

#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "biasaudit/classifiers.h"
#include "biasaudit/corpus.h"
#include "biasaudit/counterfactual.h"
#include "json.hpp"

namespace biasaudit {

// Wire types of POST /v1/score.
struct ScoreRequest {
  std::string request_id;
  std::string model;
  Channel channel = Channel::kNegative;
  std::vector<std::string> texts;

  // Throws ContractError when texts is empty or contains an empty string.
  void Validate() const;
  nlohmann::json ToJson() const;
  // Throws ProtocolError on schema violations.
  static ScoreRequest FromJson(const nlohmann::json& body);
};

struct ScoreResponse {
  std::string request_id;
  std::vector<double> scores;
  std::string model_version;

  nlohmann::json ToJson() const;
  // Checks the schema, the score count against `expected_count` and the
  // [0, 1] range. Throws ProtocolError.
  static ScoreResponse FromJson(const nlohmann::json& body, size_t expected_count);
};

struct ModelInfo {
  std::string name;
  std::vector<std::string> channels;
};
// GET /v1/models body. Throws ProtocolError on schema violations.
std::vector<ModelInfo> ParseModelList(const nlohmann::json& body);

// One classifier's score for one counterfactual.
struct ScoreRow {
  std::string source_id;
  Axis axis = Axis::kGender;
  std::string descriptor;
  std::string classifier;
  Channel channel = Channel::kNegative;
  double value = 0.0;

  bool operator==(const ScoreRow&) const = default;
};

// Pairs scores with the counterfactuals they were computed for. Entries
// without a value (skipped chunks) produce no row. Throws ProtocolError on a
// value outside [0, 1].
std::vector<ScoreRow> MakeScoreRows(std::span<const Counterfactual> counterfactuals,
                                    const ClassifierSpec& spec,
                                    std::span<const std::optional<double>> scores);

struct ClientOptions {
  size_t batch_size = 32;
  std::chrono::milliseconds timeout{30000};
  // Retries after the first attempt.
  int retries = 3;
  std::chrono::milliseconds initial_backoff{250};
  size_t max_in_flight = 4;
  // Sent as `Authorization: Bearer <token>` when non-empty.
  std::string bearer_token;
  // Record chunks that fail after retries as gaps instead of aborting.
  bool skip_failed = false;
};

struct FailedChunk {
  size_t chunk_index = 0;
  size_t first_text = 0;
  size_t text_count = 0;
  std::string error;
};

struct BatchResult {
  // One entry per input text, in input order; nullopt only for skipped chunks.
  std::vector<std::optional<double>> scores;
  std::string model_version;
  std::vector<FailedChunk> failures;
  size_t requests_sent = 0;
};

// Base URL split into its parts. Only http is supported.
struct Endpoint {
  std::string host;
  int port = 80;
  // Prefix prepended to /v1/..., without a trailing slash.
  std::string base_path;

  // Throws ConfigError on malformed or non-http URLs.
  static Endpoint Parse(std::string_view url);
  std::string ToString() const;
};

// Client for the /v1/score protocol. Safe to share across threads.
class ScoreClient {
 public:
  ScoreClient(Endpoint endpoint, ClientOptions options);

  // Splits `texts` into chunks of at most batch_size, sends up to
  // max_in_flight chunks concurrently and reassembles the scores in input
  // order. Transport errors and non-2xx statuses are retried with exponential
  // backoff; protocol violations are not. Throws BatchError, or ProtocolError.
  BatchResult Score(const std::string& model, Channel channel,
                    std::span<const std::string> texts) const;

  std::vector<ModelInfo> ListModels() const;

  const ClientOptions& options() const { return options_; }
  const Endpoint& endpoint() const { return endpoint_; }

 private:
  struct ChunkOutcome;
  ChunkOutcome SendChunk(const std::string& model, Channel channel,
                         std::span<const std::string> texts,
                         size_t chunk_index) const;

  Endpoint endpoint_;
  ClientOptions options_;
};

// Classifier backed by a remote /v1/score model.
class RemoteClassifier : public Classifier {
 public:
  RemoteClassifier(ClassifierSpec spec, ClientOptions options);

  const ClassifierSpec& spec() const override { return spec_; }
  std::string model_version() const override { return model_version_; }
  // Aborts on any failure. Use ScoreWithGaps() to honor skip_failed.
  std::vector<double> Score(std::span<const std::string> texts) override;
  BatchResult ScoreWithGaps(std::span<const std::string> texts);

 private:
  ClassifierSpec spec_;
  ScoreClient client_;
  std::string model_version_;
};

// Result of probing a server for protocol conformance.
struct ConformanceCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ConformanceReport {
  std::vector<ConformanceCheck> checks;
  bool passed() const;
};

// Exercises /v1/models and /v1/score on every advertised (model, channel), or
// only on `models` when non-empty: schema, request_id echo, score count,
// range, order preservation (forward vs reversed batch) and determinism.
ConformanceReport CheckEndpoint(const ScoreClient& client,
                                std::span<const std::string> models = {});

}  // namespace biasaudit

#endif  // BIASAUDIT_INFERENCE_CLIENT_H_
