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

#include "biasaudit/inference_client.h"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <thread>

#include "biasaudit/errors.h"
#include "biasaudit/text_util.h"
#include "httplib.h"

namespace biasaudit {

namespace {

using json = nlohmann::json;

bool IsUnitScore(double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; }

std::string DumpJson(const json& body) {
  return body.dump(-1, ' ', false, json::error_handler_t::replace);
}

json ParseBody(const std::string& body, std::string_view what) {
  try {
    return json::parse(body);
  } catch (const json::parse_error& e) {
    throw ProtocolError(std::string(what) + " is not valid JSON: " + e.what());
  }
}

std::string ErrorBodyMessage(const std::string& body) {
  try {
    const json parsed = json::parse(body);
    if (parsed.is_object() && parsed.contains("error") && parsed["error"].is_string()) {
      return parsed["error"].get<std::string>();
    }
  } catch (const json::exception&) {
  }
  return body.substr(0, 200);
}

// Non-2xx statuses worth retrying.
bool IsRetryableStatus(int status) { return status == 429 || status >= 500; }

}  // namespace

void ScoreRequest::Validate() const {
  if (texts.empty()) throw ContractError("score request has no texts");
  for (size_t i = 0; i < texts.size(); ++i) {
    if (texts[i].empty()) {
      throw ContractError("score request text " + std::to_string(i) + " is empty");
    }
  }
}

json ScoreRequest::ToJson() const {
  return json{{"request_id", request_id},
              {"model", model},
              {"channel", std::string(ChannelName(channel))},
              {"texts", texts}};
}

ScoreRequest ScoreRequest::FromJson(const json& body) {
  if (!body.is_object()) throw ProtocolError("request body is not an object");
  for (const char* key : {"request_id", "model", "channel"}) {
    if (!body.contains(key) || !body[key].is_string()) {
      throw ProtocolError(std::string("request field '") + key +
                          "' missing or not a string");
    }
  }
  if (!body.contains("texts") || !body["texts"].is_array()) {
    throw ProtocolError("request field 'texts' missing or not an array");
  }
  ScoreRequest request;
  request.request_id = body["request_id"].get<std::string>();
  request.model = body["model"].get<std::string>();
  const std::optional<Channel> channel = ParseChannel(body["channel"].get<std::string>());
  if (!channel) throw ProtocolError("unknown channel in request");
  request.channel = *channel;
  for (const json& text : body["texts"]) {
    if (!text.is_string()) throw ProtocolError("request text is not a string");
    request.texts.push_back(text.get<std::string>());
  }
  return request;
}

json ScoreResponse::ToJson() const {
  return json{{"request_id", request_id},
              {"model_version", model_version},
              {"scores", scores}};
}

ScoreResponse ScoreResponse::FromJson(const json& body, size_t expected_count) {
  if (!body.is_object()) throw ProtocolError("response body is not an object");
  if (!body.contains("request_id") || !body["request_id"].is_string()) {
    throw ProtocolError("response field 'request_id' missing or not a string");
  }
  if (!body.contains("scores") || !body["scores"].is_array()) {
    throw ProtocolError("response field 'scores' missing or not an array");
  }
  ScoreResponse response;
  response.request_id = body["request_id"].get<std::string>();
  if (body.contains("model_version") && body["model_version"].is_string()) {
    response.model_version = body["model_version"].get<std::string>();
  }
  const json& scores = body["scores"];
  if (scores.size() != expected_count) {
    throw ProtocolError("response has " + std::to_string(scores.size()) +
                        " scores for " + std::to_string(expected_count) + " texts");
  }
  response.scores.reserve(scores.size());
  for (size_t i = 0; i < scores.size(); ++i) {
    if (!scores[i].is_number()) {
      throw ProtocolError("score " + std::to_string(i) + " is not a number");
    }
    const double v = scores[i].get<double>();
    if (!IsUnitScore(v)) {
      throw ProtocolError("score " + std::to_string(i) + " = " + std::to_string(v) +
                          " is outside [0, 1]");
    }
    response.scores.push_back(v);
  }
  return response;
}

std::vector<ModelInfo> ParseModelList(const json& body) {
  if (!body.is_object() || !body.contains("models") || !body["models"].is_array()) {
    throw ProtocolError("model list must be an object with a 'models' array");
  }
  std::vector<ModelInfo> models;
  for (const json& entry : body["models"]) {
    if (!entry.is_object() || !entry.contains("name") || !entry["name"].is_string() ||
        !entry.contains("channels") || !entry["channels"].is_array()) {
      throw ProtocolError("model entry needs a 'name' string and 'channels' array");
    }
    ModelInfo info;
    info.name = entry["name"].get<std::string>();
    for (const json& c : entry["channels"]) {
      if (!c.is_string()) throw ProtocolError("channel name is not a string");
      info.channels.push_back(c.get<std::string>());
    }
    models.push_back(std::move(info));
  }
  return models;
}

std::vector<ScoreRow> MakeScoreRows(std::span<const Counterfactual> counterfactuals,
                                    const ClassifierSpec& spec,
                                    std::span<const std::optional<double>> scores) {
  if (counterfactuals.size() != scores.size()) {
    throw ContractError("score count does not match counterfactual count");
  }
  std::vector<ScoreRow> rows;
  rows.reserve(scores.size());
  for (size_t i = 0; i < scores.size(); ++i) {
    if (!scores[i]) continue;
    if (!IsUnitScore(*scores[i])) {
      throw ProtocolError(spec.name + " produced score " + std::to_string(*scores[i]) +
                          " outside [0, 1]");
    }
    const Counterfactual& cf = counterfactuals[i];
    rows.push_back({cf.source_id, cf.axis, cf.descriptor, spec.name, spec.channel,
                    *scores[i]});
  }
  return rows;
}

Endpoint Endpoint::Parse(std::string_view url) {
  constexpr std::string_view kScheme = "http://";
  const std::string_view trimmed = Trim(url);
  if (trimmed.substr(0, kScheme.size()) != kScheme) {
    throw ConfigError("endpoint '" + std::string(url) + "' must start with http://");
  }
  std::string_view rest = trimmed.substr(kScheme.size());
  const size_t slash = rest.find('/');
  std::string_view authority = rest.substr(0, slash);
  std::string_view path = slash == std::string_view::npos ? "" : rest.substr(slash);
  while (!path.empty() && path.back() == '/') path.remove_suffix(1);

  Endpoint endpoint;
  const size_t colon = authority.rfind(':');
  if (colon != std::string_view::npos) {
    const std::string_view port = authority.substr(colon + 1);
    int value = 0;
    const auto [ptr, ec] = std::from_chars(port.data(), port.data() + port.size(), value);
    if (ec != std::errc() || ptr != port.data() + port.size() || value <= 0 ||
        value > 65535) {
      throw ConfigError("endpoint '" + std::string(url) + "' has an invalid port");
    }
    endpoint.port = value;
    authority = authority.substr(0, colon);
  }
  if (authority.empty()) {
    throw ConfigError("endpoint '" + std::string(url) + "' has no host");
  }
  endpoint.host = std::string(authority);
  endpoint.base_path = std::string(path);
  return endpoint;
}

std::string Endpoint::ToString() const {
  return "http://" + host + ":" + std::to_string(port) + base_path;
}

struct ScoreClient::ChunkOutcome {
  std::vector<double> scores;
  std::string model_version;
  std::exception_ptr error;
  size_t requests = 0;
};

ScoreClient::ScoreClient(Endpoint endpoint, ClientOptions options)
    : endpoint_(std::move(endpoint)), options_(std::move(options)) {
  if (options_.batch_size == 0) throw ConfigError("batch_size must be >= 1");
  if (options_.retries < 0) throw ConfigError("retries must be >= 0");
  if (options_.max_in_flight == 0) options_.max_in_flight = 1;
}

ScoreClient::ChunkOutcome ScoreClient::SendChunk(const std::string& model,
                                                 Channel channel,
                                                 std::span<const std::string> texts,
                                                 size_t chunk_index) const {
  ScoreRequest request;
  request.model = model;
  request.channel = channel;
  request.texts.assign(texts.begin(), texts.end());
  request.Validate();

  ChunkOutcome outcome;
  std::string last_error;
  for (int attempt = 0; attempt <= options_.retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(options_.initial_backoff * (1LL << (attempt - 1)));
    }
    request.request_id = model + "-" + std::to_string(chunk_index) + "-" +
                         std::to_string(attempt);
    httplib::Client http(endpoint_.host, endpoint_.port);
    http.set_connection_timeout(options_.timeout);
    http.set_read_timeout(options_.timeout);
    http.set_write_timeout(options_.timeout);
    if (!options_.bearer_token.empty()) {
      http.set_bearer_token_auth(options_.bearer_token);
    }
    ++outcome.requests;
    const httplib::Result result =
        http.Post(endpoint_.base_path + "/v1/score", DumpJson(request.ToJson()),
                  "application/json");
    if (!result) {
      last_error = "transport error: " + httplib::to_string(result.error());
      continue;
    }
    if (result->status < 200 || result->status >= 300) {
      last_error = "HTTP " + std::to_string(result->status) + ": " +
                   ErrorBodyMessage(result->body);
      if (IsRetryableStatus(result->status)) continue;
      break;
    }
    ScoreResponse response =
        ScoreResponse::FromJson(ParseBody(result->body, "score response"),
                                texts.size());
    if (response.request_id != request.request_id) {
      throw ProtocolError("response request_id '" + response.request_id +
                          "' does not echo '" + request.request_id + "'");
    }
    outcome.scores = std::move(response.scores);
    outcome.model_version = std::move(response.model_version);
    return outcome;
  }
  throw BatchError("chunk " + std::to_string(chunk_index) + " (" +
                       std::to_string(texts.size()) + " texts) failed after " +
                       std::to_string(outcome.requests) + " attempts: " + last_error,
                   chunk_index);
}

BatchResult ScoreClient::Score(const std::string& model, Channel channel,
                               std::span<const std::string> texts) const {
  BatchResult result;
  result.scores.assign(texts.size(), std::nullopt);
  if (texts.empty()) return result;

  const size_t batch = options_.batch_size;
  const size_t chunk_count = (texts.size() + batch - 1) / batch;
  std::vector<ChunkOutcome> outcomes(chunk_count);
  std::atomic<size_t> next{0};
  std::atomic<bool> abort{false};

  const auto worker = [&] {
    while (!abort.load()) {
      const size_t chunk = next.fetch_add(1);
      if (chunk >= chunk_count) return;
      const size_t first = chunk * batch;
      const size_t count = std::min(batch, texts.size() - first);
      try {
        outcomes[chunk] = SendChunk(model, channel, texts.subspan(first, count), chunk);
      } catch (...) {
        outcomes[chunk].error = std::current_exception();
        if (!options_.skip_failed) abort.store(true);
      }
    }
  };
  const size_t workers = std::min(options_.max_in_flight, chunk_count);
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (size_t i = 0; i < workers; ++i) pool.emplace_back(worker);
  }

  for (size_t chunk = 0; chunk < chunk_count; ++chunk) {
    ChunkOutcome& outcome = outcomes[chunk];
    result.requests_sent += outcome.requests;
    const size_t first = chunk * batch;
    if (outcome.error) {
      try {
        std::rethrow_exception(outcome.error);
      } catch (const BatchError& e) {
        if (!options_.skip_failed) throw;
        result.failures.push_back(
            {chunk, first, std::min(batch, texts.size() - first), e.what()});
      }
      continue;
    }
    if (outcome.scores.empty()) {
      // Not dispatched after an abort.
      continue;
    }
    if (result.model_version.empty()) result.model_version = outcome.model_version;
    for (size_t i = 0; i < outcome.scores.size(); ++i) {
      result.scores[first + i] = outcome.scores[i];
    }
  }
  return result;
}

std::vector<ModelInfo> ScoreClient::ListModels() const {
  httplib::Client http(endpoint_.host, endpoint_.port);
  http.set_connection_timeout(options_.timeout);
  http.set_read_timeout(options_.timeout);
  if (!options_.bearer_token.empty()) http.set_bearer_token_auth(options_.bearer_token);
  const httplib::Result result = http.Get(endpoint_.base_path + "/v1/models");
  if (!result) {
    throw BatchError("GET /v1/models failed: " + httplib::to_string(result.error()), 0);
  }
  if (result->status != 200) {
    throw ProtocolError("GET /v1/models returned HTTP " +
                        std::to_string(result->status) + ": " +
                        ErrorBodyMessage(result->body));
  }
  return ParseModelList(ParseBody(result->body, "model list"));
}

RemoteClassifier::RemoteClassifier(ClassifierSpec spec, ClientOptions options)
    : spec_(std::move(spec)),
      client_(Endpoint::Parse(spec_.endpoint), std::move(options)) {
  if (spec_.model.empty()) spec_.model = spec_.name;
}

std::vector<double> RemoteClassifier::Score(std::span<const std::string> texts) {
  // Empty texts are not allowed on the wire; send a single space instead.
  std::vector<std::string> sendable(texts.begin(), texts.end());
  for (std::string& text : sendable) {
    if (text.empty()) text = " ";
  }
  BatchResult result = client_.Score(spec_.model, spec_.channel, sendable);
  if (!result.model_version.empty()) model_version_ = result.model_version;
  std::vector<double> out;
  out.reserve(result.scores.size());
  for (size_t i = 0; i < result.scores.size(); ++i) {
    if (!result.scores[i]) {
      throw BatchError("no score for text " + std::to_string(i), 0);
    }
    out.push_back(*result.scores[i]);
  }
  return out;
}

BatchResult RemoteClassifier::ScoreWithGaps(std::span<const std::string> texts) {
  BatchResult result = client_.Score(spec_.model, spec_.channel, texts);
  if (!result.model_version.empty()) model_version_ = result.model_version;
  return result;
}

bool ConformanceReport::passed() const {
  return !checks.empty() &&
         std::all_of(checks.begin(), checks.end(),
                     [](const ConformanceCheck& c) { return c.passed; });
}

ConformanceReport CheckEndpoint(const ScoreClient& client,
                                std::span<const std::string> models) {
  ConformanceReport report;
  const auto add = [&](std::string name, bool passed, std::string detail) {
    report.checks.push_back({std::move(name), passed, std::move(detail)});
  };

  std::vector<ModelInfo> advertised;
  try {
    advertised = client.ListModels();
    add("models.schema", true, std::to_string(advertised.size()) + " models");
  } catch (const AuditError& e) {
    add("models.schema", false, e.what());
    return report;
  }

  std::vector<ModelInfo> targets;
  if (models.empty()) {
    targets = advertised;
  } else {
    for (const std::string& name : models) {
      const auto it = std::find_if(advertised.begin(), advertised.end(),
                                   [&](const ModelInfo& m) { return m.name == name; });
      if (it == advertised.end()) {
        add("models.advertised:" + name, false, "model not listed by /v1/models");
      } else {
        targets.push_back(*it);
      }
    }
  }

  const std::vector<std::string> probe = {
      "Probe one.", "A second, somewhat longer probe sentence.",
      "The third probe sentence is the longest of the three on purpose.",
      "Four."};
  std::vector<std::string> reversed(probe.rbegin(), probe.rend());

  for (const ModelInfo& model : targets) {
    for (const std::string& channel_name : model.channels) {
      const std::string tag = model.name + "/" + channel_name;
      const std::optional<Channel> channel = ParseChannel(channel_name);
      if (!channel) {
        add("channel.known:" + tag, false, "unknown channel name");
        continue;
      }
      std::vector<double> forward;
      try {
        const BatchResult result = client.Score(model.name, *channel, probe);
        for (const auto& s : result.scores) forward.push_back(s.value_or(-1.0));
        add("score.schema_count_range:" + tag, true,
            "model_version=" + result.model_version);
      } catch (const AuditError& e) {
        add("score.schema_count_range:" + tag, false, e.what());
        continue;
      }
      try {
        const BatchResult again = client.Score(model.name, *channel, probe);
        bool same = true;
        for (size_t i = 0; i < probe.size(); ++i) {
          same = same && again.scores[i] && *again.scores[i] == forward[i];
        }
        add("score.deterministic:" + tag, same,
            same ? "repeat matched" : "repeat differed");

        const BatchResult backward = client.Score(model.name, *channel, reversed);
        bool ordered = true;
        for (size_t i = 0; i < probe.size(); ++i) {
          const auto& s = backward.scores[probe.size() - 1 - i];
          ordered = ordered && s && std::abs(*s - forward[i]) <= 1e-9;
        }
        add("score.order_preserved:" + tag, ordered,
            ordered ? "reversed batch mirrored" : "reversed batch did not mirror");
      } catch (const AuditError& e) {
        add("score.order_preserved:" + tag, false, e.what());
      }
    }
  }
  if (targets.empty()) add("models.nonempty", false, "no model to probe");
  return report;
}

}  // namespace biasaudit
