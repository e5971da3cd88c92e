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

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <map>
#include <set>

#include "biasaudit/embedded_data.h"
#include "biasaudit/errors.h"
#include "biasaudit/svg.h"
#include "biasaudit/text_util.h"

namespace biasaudit {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

constexpr char kDemoCorpusName[] = "<builtin:demo_corpus.jsonl>";
constexpr char kToolVersion[] = "biasaudit 1.0.0";

std::string Dump(const ordered_json& value, int indent = -1) {
  return value.dump(indent, ' ', false, json::error_handler_t::replace);
}

std::string NowUtc() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string ResolvePath(const std::string& path, const std::string& base_dir) {
  if (path.empty()) return path;
  const fs::path p(path);
  if (p.is_absolute()) return path;
  return (fs::path(base_dir) / p).lexically_normal().string();
}

void EnsureDirectory(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw IoError("cannot create output directory '" + dir + "'");
  }
}

std::string JoinPath(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

template <typename T>
T Field(const json& object, const char* key, T fallback) {
  const auto it = object.find(key);
  if (it == object.end() || it->is_null()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config field '") + key + "' has the wrong type");
  }
}

void RejectUnknownKeys(const json& object, std::initializer_list<std::string_view> known,
                       std::string_view where) {
  for (const auto& [key, value] : object.items()) {
    bool ok = false;
    for (std::string_view k : known) ok = ok || key == k;
    if (!ok) {
      throw ConfigError("unknown key '" + key + "' in " + std::string(where));
    }
  }
}

std::vector<std::string> StringList(const json& value, std::string_view what) {
  if (!value.is_array()) throw ConfigError(std::string(what) + " must be an array");
  std::vector<std::string> out;
  for (const json& item : value) {
    if (!item.is_string()) throw ConfigError(std::string(what) + " must hold strings");
    out.push_back(item.get<std::string>());
  }
  return out;
}

ClassifierSpec ParseClassifier(const json& entry, const std::string& base_dir) {
  if (!entry.is_object()) throw ConfigError("classifier entry must be an object");
  RejectUnknownKeys(entry, {"name", "kind", "channel", "endpoint", "model", "lexicon"},
                    "classifier entry");
  ClassifierSpec spec;
  spec.name = Field<std::string>(entry, "name", "");
  if (Trim(spec.name).empty()) throw ConfigError("classifier entry needs a name");
  spec.endpoint = Field<std::string>(entry, "endpoint", "");
  spec.model = Field<std::string>(entry, "model", "");
  spec.lexicon_path = ResolvePath(Field<std::string>(entry, "lexicon", ""), base_dir);

  const std::string kind =
      AsciiLower(Field<std::string>(entry, "kind", spec.endpoint.empty() ? "builtin" : "remote"));
  if (kind == "builtin") {
    spec.kind = ClassifierKind::kBuiltin;
  } else if (kind == "remote") {
    spec.kind = ClassifierKind::kRemote;
  } else {
    throw ConfigError("classifier '" + spec.name + "' has unknown kind '" + kind + "'");
  }

  const std::string channel = Field<std::string>(entry, "channel", "");
  if (channel.empty()) {
    spec.channel = DefaultChannelFor(spec.name);
  } else if (const auto parsed = ParseChannel(channel)) {
    spec.channel = *parsed;
  } else {
    throw ConfigError("classifier '" + spec.name + "' has unknown channel '" + channel + "'");
  }
  return spec;
}

std::string Ratio(std::optional<double> v) { return FormatScore(v); }

std::string AxisTitle(Axis axis) {
  std::string name(AxisName(axis));
  name[0] = static_cast<char>(name[0] - 'a' + 'A');
  return name;
}

std::string CsvCell(const std::string& cell) {
  if (cell.find_first_of(",\"\r\n") == std::string::npos) return cell;
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string TableExtension(TableFormat format) {
  switch (format) {
    case TableFormat::kCsv:
      return "csv";
    case TableFormat::kJson:
      return "json";
    case TableFormat::kMarkdown:
      return "md";
  }
  return "txt";
}

std::string Render(const Table& table, TableFormat format) {
  switch (format) {
    case TableFormat::kCsv:
      return RenderCsv(table);
    case TableFormat::kJson:
      return RenderJson(table);
    case TableFormat::kMarkdown:
      return RenderMarkdown(table);
  }
  return RenderCsv(table);
}

std::vector<std::string> ClassifierColumns(const std::vector<DisparityReport>& disparities,
                                           const std::vector<DescriptorMean>& means) {
  std::vector<std::string> out;
  const auto add = [&](const std::string& name) {
    if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(name);
  };
  for (const DescriptorMean& m : means) add(m.classifier);
  for (const DisparityReport& d : disparities) add(d.classifier);
  return out;
}

std::string MeansCsv(const std::vector<DescriptorMean>& means) {
  std::string out = "axis,descriptor,classifier,channel,mean,n\n";
  for (const DescriptorMean& m : means) {
    out += std::string(AxisName(m.axis)) + "," + CsvCell(m.descriptor) + "," +
           CsvCell(m.classifier) + "," + std::string(ChannelName(m.channel)) + "," +
           FormatScore(m.mean) + "," + std::to_string(m.n) + "\n";
  }
  return out;
}

std::string DisparityCsv(const std::vector<DisparityReport>& disparities) {
  std::string out = "axis,classifier,channel,max_min,min_max,overall_mean,descriptors,rows\n";
  for (const DisparityReport& d : disparities) {
    out += std::string(AxisName(d.axis)) + "," + CsvCell(d.classifier) + "," +
           std::string(ChannelName(d.channel)) + "," + FormatScore(d.max_min) + "," +
           Ratio(d.min_max) + "," + FormatScore(d.overall_mean) + "," +
           std::to_string(d.means.size()) + "," + std::to_string(d.row_count) + "\n";
  }
  return out;
}

std::string ScoresJsonl(const std::string& run_id,
                        const std::vector<Counterfactual>& counterfactuals,
                        const std::vector<std::vector<std::optional<double>>>& per_classifier,
                        const std::vector<ClassifierSpec>& specs) {
  std::string out;
  for (size_t c = 0; c < specs.size(); ++c) {
    for (size_t i = 0; i < counterfactuals.size(); ++i) {
      if (!per_classifier[c][i]) continue;
      const Counterfactual& cf = counterfactuals[i];
      ordered_json row;
      row["run_id"] = run_id;
      row["cf_index"] = i;
      row["source_id"] = cf.source_id;
      row["axis"] = AxisName(cf.axis);
      row["descriptor"] = cf.descriptor;
      row["prefix"] = cf.prefix;
      row["classifier"] = specs[c].name;
      row["channel"] = ChannelName(specs[c].channel);
      row["value"] = *per_classifier[c][i];
      out += Dump(row) + "\n";
    }
  }
  return out;
}

}  // namespace

std::optional<TableFormat> ParseTableFormat(std::string_view name) {
  const std::string lowered = AsciiLower(Trim(name));
  if (lowered == "csv") return TableFormat::kCsv;
  if (lowered == "json") return TableFormat::kJson;
  if (lowered == "markdown" || lowered == "md") return TableFormat::kMarkdown;
  return std::nullopt;
}

AuditConfig AuditConfig::FromJson(const json& config, const std::string& base_dir) {
  if (!config.is_object()) throw ConfigError("config must be a JSON object");
  RejectUnknownKeys(config,
                    {"corpus", "classifiers", "seed", "descriptors", "prefixes",
                     "proper_nouns", "output_dir", "client", "attribution",
                     "table_format"},
                    "config");
  AuditConfig out;

  if (const auto it = config.find("corpus"); it != config.end() && !it->is_null()) {
    if (!it->is_object()) throw ConfigError("'corpus' must be an object");
    RejectUnknownKeys(*it, {"path", "format"}, "corpus");
    const std::string path = Field<std::string>(*it, "path", "");
    out.corpus_path = path == "demo" ? "" : ResolvePath(path, base_dir);
    const std::string format = Field<std::string>(*it, "format", "jsonl");
    const auto parsed = ParseCorpusFormat(format);
    if (!parsed) throw ConfigError("unknown corpus format '" + format + "'");
    out.corpus_format = *parsed;
  }

  if (const auto it = config.find("classifiers"); it != config.end()) {
    if (!it->is_array()) throw ConfigError("'classifiers' must be an array");
    for (const json& entry : *it) out.classifiers.push_back(ParseClassifier(entry, base_dir));
  }

  out.seed = Field<uint64_t>(config, "seed", 42);

  if (const auto it = config.find("descriptors"); it != config.end() && !it->is_null()) {
    if (!it->is_object()) throw ConfigError("'descriptors' must be an object");
    for (const auto& [axis_name, list] : it->items()) {
      const auto axis = ParseAxis(axis_name);
      if (!axis) throw ConfigError("unknown axis '" + axis_name + "' in descriptors");
      out.catalog.Set(*axis, StringList(list, "descriptors." + axis_name));
    }
  }
  if (const auto it = config.find("prefixes"); it != config.end() && !it->is_null()) {
    out.prefixes = StringList(*it, "prefixes");
    if (out.prefixes.empty()) throw ConfigError("prefix set is empty");
  }
  if (const auto it = config.find("proper_nouns"); it != config.end() && !it->is_null()) {
    out.proper_nouns = StringList(*it, "proper_nouns");
  }
  out.output_dir = ResolvePath(Field<std::string>(config, "output_dir", "audit_out"), base_dir);

  if (const auto it = config.find("client"); it != config.end() && !it->is_null()) {
    RejectUnknownKeys(*it,
                      {"batch_size", "timeout_ms", "retries", "backoff_ms",
                       "max_in_flight", "skip_failed"},
                      "client");
    ClientOptions& c = out.client;
    c.batch_size = Field<size_t>(*it, "batch_size", c.batch_size);
    c.timeout = std::chrono::milliseconds(Field<int64_t>(*it, "timeout_ms", c.timeout.count()));
    c.retries = Field<int>(*it, "retries", c.retries);
    c.initial_backoff =
        std::chrono::milliseconds(Field<int64_t>(*it, "backoff_ms", c.initial_backoff.count()));
    c.max_in_flight = Field<size_t>(*it, "max_in_flight", c.max_in_flight);
    c.skip_failed = Field<bool>(*it, "skip_failed", c.skip_failed);
  }

  if (const auto it = config.find("attribution"); it != config.end() && !it->is_null()) {
    RejectUnknownKeys(*it,
                      {"method", "exact_limit", "samples", "permutations", "seed",
                       "group_descriptors"},
                      "attribution");
    AttributionSettings& a = out.attribution;
    a.method = AsciiLower(Field<std::string>(*it, "method", a.method));
    a.exact_limit = Field<size_t>(*it, "exact_limit", a.exact_limit);
    a.samples = Field<size_t>(*it, "samples", a.samples);
    a.permutations = Field<size_t>(*it, "permutations", a.permutations);
    a.seed = Field<uint64_t>(*it, "seed", a.seed);
    a.group_descriptors = Field<bool>(*it, "group_descriptors", a.group_descriptors);
    if (a.method != "auto" && !ParseAttributionMethod(a.method)) {
      throw ConfigError("unknown attribution method '" + a.method + "'");
    }
  }

  const std::string table_format = Field<std::string>(config, "table_format", "csv");
  const auto format = ParseTableFormat(table_format);
  if (!format) throw ConfigError("unknown table_format '" + table_format + "'");
  out.table_format = *format;
  return out;
}

AuditConfig AuditConfig::Load(const std::string& path) {
  const std::string content = ReadFile(path);
  json parsed;
  try {
    parsed = json::parse(content);
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
  const fs::path parent = fs::path(path).parent_path();
  AuditConfig config = FromJson(parsed, parent.empty() ? "." : parent.string());
  if (const char* token = std::getenv(kTokenEnvVar); token != nullptr) {
    config.client.bearer_token = token;
  }
  return config;
}

void AuditConfig::Validate() const {
  if (classifiers.empty()) throw ConfigError("config lists no classifiers");
  std::set<std::string> names;
  for (const ClassifierSpec& spec : classifiers) {
    if (!names.insert(spec.name).second) {
      throw ConfigError("classifier name '" + spec.name + "' is used twice");
    }
    if (spec.kind == ClassifierKind::kBuiltin && spec.channel == Channel::kToxicity) {
      throw ConfigError("builtin classifier '" + spec.name +
                        "' cannot score the toxicity channel");
    }
    if (spec.kind == ClassifierKind::kRemote) Endpoint::Parse(spec.endpoint);
  }
  if (prefixes.empty()) throw ConfigError("prefix set is empty");
  if (client.batch_size == 0) throw ConfigError("client.batch_size must be >= 1");
}

ordered_json AuditConfig::ToJson() const {
  ordered_json out;
  ordered_json corpus;
  corpus["path"] = corpus_path.empty() ? std::string(kDemoCorpusName) : corpus_path;
  corpus["format"] = CorpusFormatName(corpus_format);
  out["corpus"] = corpus;
  out["seed"] = seed;
  ordered_json specs = ordered_json::array();
  for (const ClassifierSpec& spec : classifiers) {
    ordered_json s;
    s["name"] = spec.name;
    s["kind"] = spec.kind == ClassifierKind::kBuiltin ? "builtin" : "remote";
    s["channel"] = ChannelName(spec.channel);
    if (spec.kind == ClassifierKind::kRemote) {
      s["endpoint"] = spec.endpoint;
      s["model"] = spec.model.empty() ? spec.name : spec.model;
    } else {
      s["lexicon"] = spec.lexicon_path.empty() ? "<builtin>" : spec.lexicon_path;
    }
    specs.push_back(s);
  }
  out["classifiers"] = specs;
  ordered_json descriptors;
  for (Axis axis : kAllAxes) descriptors[std::string(AxisName(axis))] = catalog.For(axis);
  out["descriptors"] = descriptors;
  out["prefixes"] = prefixes;
  out["proper_nouns"] = proper_nouns;
  out["output_dir"] = output_dir;
  out["client"] = {{"batch_size", client.batch_size},
                   {"timeout_ms", client.timeout.count()},
                   {"retries", client.retries},
                   {"backoff_ms", client.initial_backoff.count()},
                   {"max_in_flight", client.max_in_flight},
                   {"skip_failed", client.skip_failed}};
  out["attribution"] = {{"method", attribution.method},
                        {"exact_limit", attribution.exact_limit},
                        {"samples", attribution.samples},
                        {"permutations", attribution.permutations},
                        {"seed", attribution.seed},
                        {"group_descriptors", attribution.group_descriptors}};
  out["table_format"] = TableExtension(table_format);
  return out;
}

std::unique_ptr<Classifier> MakeClassifier(const ClassifierSpec& spec,
                                           const ClientOptions& client) {
  if (spec.kind == ClassifierKind::kRemote) {
    return std::make_unique<RemoteClassifier>(spec, client);
  }
  Lexicon lexicon =
      spec.lexicon_path.empty() ? Lexicon::Default() : Lexicon::Load(spec.lexicon_path);
  return std::make_unique<LexiconClassifier>(spec, std::move(lexicon));
}

ordered_json AuditRunRecord::ToJson() const {
  ordered_json out;
  out["run_id"] = run_id;
  out["tool_version"] = kToolVersion;
  out["started_at"] = started_at;
  out["finished_at"] = finished_at;
  out["corpus"] = {{"sha256", corpus_sha256},
                   {"records", corpus_records},
                   {"stereotype_records", stereotype_records}};
  ordered_json versions = ordered_json::array();
  for (const auto& [name, version] : model_versions) {
    versions.push_back({{"classifier", name}, {"model_version", version}});
  }
  out["classifiers"] = versions;
  out["counts"] = {{"counterfactuals", counterfactuals},
                   {"score_rows", score_rows},
                   {"gaps", gaps}};
  ordered_json failed = ordered_json::array();
  for (const FailedChunk& f : failures) {
    failed.push_back({{"chunk", f.chunk_index},
                      {"first_text", f.first_text},
                      {"texts", f.text_count},
                      {"error", f.error}});
  }
  out["failed_chunks"] = failed;
  out["config"] = config;
  return out;
}

LoadedCorpus LoadConfiguredCorpus(const AuditConfig& config) {
  LoadedCorpus loaded;
  if (config.corpus_path.empty()) {
    loaded.bytes = std::string(DemoCorpusJsonl());
    loaded.corpus = ParseCorpus(loaded.bytes, CorpusFormat::kJsonl, kDemoCorpusName);
  } else {
    loaded.bytes = ReadFile(config.corpus_path);
    loaded.corpus = ParseCorpus(loaded.bytes, config.corpus_format, config.corpus_path);
  }
  return loaded;
}

std::vector<Counterfactual> GenerateCounterfactuals(const AuditConfig& config) {
  const LoadedCorpus loaded = LoadConfiguredCorpus(config);
  return GenerateAll(FilterStereotypes(loaded.corpus), config.catalog,
                     config.prefix_set(), config.proper_nouns);
}

AuditResult RunAudit(const AuditConfig& config, bool write_outputs) {
  config.Validate();
  AuditResult result;
  AuditRunRecord& run = result.run;
  run.started_at = NowUtc();
  run.config = config.ToJson();

  const LoadedCorpus loaded = LoadConfiguredCorpus(config);
  const Corpus stereotypes = FilterStereotypes(loaded.corpus);
  run.corpus_sha256 = Sha256Hex(loaded.bytes);
  run.corpus_records = loaded.corpus.records.size();
  run.stereotype_records = stereotypes.records.size();
  run.run_id = Sha256Hex(run.corpus_sha256 + Dump(run.config)).substr(0, 16);

  result.counterfactuals = GenerateAll(stereotypes, config.catalog, config.prefix_set(),
                                       config.proper_nouns);
  run.counterfactuals = result.counterfactuals.size();
  std::vector<std::string> texts;
  texts.reserve(result.counterfactuals.size());
  for (const Counterfactual& cf : result.counterfactuals) texts.push_back(cf.text);

  std::vector<std::vector<std::optional<double>>> per_classifier;
  for (const ClassifierSpec& spec : config.classifiers) {
    std::vector<std::optional<double>> scores(texts.size());
    std::string version;
    if (spec.kind == ClassifierKind::kRemote) {
      RemoteClassifier remote(spec, config.client);
      BatchResult batch = remote.ScoreWithGaps(texts);
      scores = std::move(batch.scores);
      version = batch.model_version;
      for (FailedChunk& f : batch.failures) {
        f.error = spec.name + ": " + f.error;
        run.gaps += f.text_count;
        run.failures.push_back(std::move(f));
      }
    } else {
      const std::unique_ptr<Classifier> classifier = MakeClassifier(spec, config.client);
      const std::vector<double> values = texts.empty() ? std::vector<double>{}
                                                       : classifier->Score(texts);
      for (size_t i = 0; i < values.size(); ++i) scores[i] = values[i];
      version = classifier->model_version();
    }
    std::vector<ScoreRow> rows = MakeScoreRows(result.counterfactuals, spec, scores);
    result.rows.insert(result.rows.end(), rows.begin(), rows.end());
    run.model_versions.emplace_back(spec.name, version);
    per_classifier.push_back(std::move(scores));
  }
  run.score_rows = result.rows.size();

  result.means = DescriptorMeans(result.rows, config.catalog);
  result.disparities = Disparities(result.means);
  for (const DisparityReport& d : result.disparities) {
    if (!d.min_max) {
      std::fprintf(stderr,
                   "warning: %s/%s has max mean 0; Min/Max is undefined and left empty\n",
                   std::string(AxisName(d.axis)).c_str(), d.classifier.c_str());
    }
  }

  if (write_outputs) {
    EnsureDirectory(config.output_dir);
    WriteFile(JoinPath(config.output_dir, "counterfactuals.jsonl"),
              CounterfactualsToJsonl(result.counterfactuals));
    WriteFile(JoinPath(config.output_dir, "scores.jsonl"),
              ScoresJsonl(run.run_id, result.counterfactuals, per_classifier,
                          config.classifiers));
    WriteFile(JoinPath(config.output_dir, "means.csv"), MeansCsv(result.means));
    WriteFile(JoinPath(config.output_dir, "disparity.csv"), DisparityCsv(result.disparities));
    EmitTables(result.means, result.disparities, config.table_format, config.output_dir);
    run.finished_at = NowUtc();
    WriteFile(JoinPath(config.output_dir, "run.json"), Dump(run.ToJson(), 2) + "\n");
  } else {
    run.finished_at = NowUtc();
  }
  return result;
}

std::vector<ExplainItem> RunExplain(const AuditConfig& config, std::string_view text,
                                    Axis axis, std::vector<std::string> descriptors,
                                    std::string_view classifier_name, bool write_outputs) {
  config.Validate();
  if (Trim(text).empty()) throw ContractError("explain text is empty");

  const ClassifierSpec* spec = &config.classifiers.front();
  if (!classifier_name.empty()) {
    const auto it = std::find_if(config.classifiers.begin(), config.classifiers.end(),
                                 [&](const ClassifierSpec& s) { return s.name == classifier_name; });
    if (it == config.classifiers.end()) {
      throw ConfigError("no classifier named '" + std::string(classifier_name) + "'");
    }
    spec = &*it;
  }

  DescriptorCatalog catalog = config.catalog;
  if (!descriptors.empty()) catalog.Set(axis, std::move(descriptors));

  StereotypeRecord record;
  record.id = "explain";
  record.text = std::string(Trim(text));
  record.label = Label::Parse("stereotype");
  record.axis = axis;
  const std::vector<Counterfactual> counterfactuals =
      Generate(record, catalog, config.prefix_set(), config.proper_nouns);

  const std::unique_ptr<Classifier> classifier = MakeClassifier(*spec, config.client);
  const AttributionSettings& settings = config.attribution;

  std::vector<ExplainItem> items;
  for (const Counterfactual& cf : counterfactuals) {
    ExplainItem item;
    item.counterfactual = cf;
    const std::string descriptor[] = {cf.descriptor};
    item.split = SplitUnits(cf.text, descriptor, settings.group_descriptors);
    const std::vector<std::string> units = item.split.UnitTexts();
    CoalitionValue value = MakeTextValueFunction(units, *classifier);

    std::string method = settings.method;
    if (method == "auto") {
      method = units.size() <= settings.exact_limit ? "exact" : "kernel";
    }
    if (method == "exact") {
      item.attribution = ExactShapley(value, settings.exact_limit);
    } else if (method == "kernel") {
      KernelShapOptions options;
      options.n_samples = settings.samples;
      options.seed = settings.seed;
      item.attribution = KernelShap(value, options);
    } else {
      item.attribution = PermutationShapley(value, settings.permutations, settings.seed);
    }
    items.push_back(std::move(item));
  }

  if (write_outputs) {
    const std::string dir = JoinPath(config.output_dir, "attribution");
    EnsureDirectory(dir);
    for (const ExplainItem& item : items) {
      ordered_json doc = item.attribution.ToJson();
      doc["text"] = item.counterfactual.text;
      doc["descriptor"] = item.counterfactual.descriptor;
      if (item.split.descriptor_unit) {
        doc["descriptor_unit"] = *item.split.descriptor_unit;
      } else {
        doc["descriptor_unit"] = nullptr;
      }
      doc["classifier"] = spec->name;
      doc["channel"] = ChannelName(spec->channel);
      const std::string stem = DescriptorFileStem(item.counterfactual.descriptor);
      WriteFile(JoinPath(dir, stem + ".json"), Dump(doc, 2) + "\n");
      WriteFile(JoinPath(dir, stem + ".svg"),
                AttributionSvg(item.attribution, spec->name + " (" +
                                                     std::string(ChannelName(spec->channel)) +
                                                     "): " + item.counterfactual.text));
    }
  }
  return items;
}

std::string FormatScore(std::optional<double> value) {
  if (!value) return "";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", RoundHalfUp(*value, 3));
  return buf;
}

std::string DescriptorFileStem(std::string_view descriptor) {
  std::string out;
  for (const char c : Trim(descriptor)) {
    const bool keep = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                      (c >= '0' && c <= '9') || c == '-' || c == '_' ||
                      (static_cast<unsigned char>(c) >= 0x80);
    out.push_back(keep ? c : '_');
  }
  if (out.empty() || out == "." || out == "..") out = "descriptor";
  return out;
}

Table BuildDisparityTable(const std::vector<DisparityReport>& disparities) {
  Table table;
  const std::vector<std::string> columns = ClassifierColumns(disparities, {});
  table.header = {"group", "metric"};
  table.header.insert(table.header.end(), columns.begin(), columns.end());

  for (Axis axis : kAllAxes) {
    std::vector<const DisparityReport*> cells(columns.size(), nullptr);
    bool any = false;
    for (const DisparityReport& d : disparities) {
      if (d.axis != axis) continue;
      const size_t col = static_cast<size_t>(
          std::find(columns.begin(), columns.end(), d.classifier) - columns.begin());
      if (cells[col] == nullptr) cells[col] = &d;
      any = true;
    }
    if (!any) continue;
    std::vector<std::string> max_min = {AxisTitle(axis), "Max-Min"};
    std::vector<std::string> min_max = {AxisTitle(axis), "Min/Max"};
    for (const DisparityReport* d : cells) {
      max_min.push_back(d ? FormatScore(d->max_min) : "");
      min_max.push_back(d ? Ratio(d->min_max) : "");
    }
    table.rows.push_back(std::move(max_min));
    table.rows.push_back(std::move(min_max));
  }
  return table;
}

Table BuildMeansTable(const std::vector<DescriptorMean>& means,
                      const std::vector<DisparityReport>& disparities) {
  Table table;
  const std::vector<std::string> columns = ClassifierColumns(disparities, means);
  table.header = {"stereotype_type", "group"};
  table.header.insert(table.header.end(), columns.begin(), columns.end());

  for (Axis axis : kAllAxes) {
    // Descriptors in first-appearance order, which follows catalog order.
    std::vector<std::string> descriptors;
    for (const DescriptorMean& m : means) {
      if (m.axis == axis &&
          std::find(descriptors.begin(), descriptors.end(), m.descriptor) == descriptors.end()) {
        descriptors.push_back(m.descriptor);
      }
    }
    if (descriptors.empty()) continue;
    for (const std::string& descriptor : descriptors) {
      std::vector<std::string> row = {AxisTitle(axis), descriptor};
      for (const std::string& column : columns) {
        const auto it = std::find_if(means.begin(), means.end(), [&](const DescriptorMean& m) {
          return m.axis == axis && m.descriptor == descriptor && m.classifier == column;
        });
        row.push_back(it == means.end() ? "" : FormatScore(it->mean));
      }
      table.rows.push_back(std::move(row));
    }
    std::vector<std::string> overall = {AxisTitle(axis), "Overall"};
    for (const std::string& column : columns) {
      double sum = 0.0;
      size_t n = 0;
      for (const DescriptorMean& m : means) {
        if (m.axis == axis && m.classifier == column) {
          sum += m.mean * static_cast<double>(m.n);
          n += m.n;
        }
      }
      overall.push_back(n == 0 ? "" : FormatScore(sum / static_cast<double>(n)));
    }
    table.rows.push_back(std::move(overall));
  }
  return table;
}

std::string RenderCsv(const Table& table) {
  std::string out;
  const auto line = [&](const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i) {
      if (i > 0) out.push_back(',');
      out += CsvCell(cells[i]);
    }
    out.push_back('\n');
  };
  line(table.header);
  for (const auto& row : table.rows) line(row);
  return out;
}

std::string RenderMarkdown(const Table& table) {
  const auto escape = [](const std::string& cell) {
    std::string out;
    for (char c : cell) {
      if (c == '|') out.push_back('\\');
      out.push_back(c);
    }
    return out;
  };
  std::string out;
  const auto line = [&](const std::vector<std::string>& cells) {
    out += "|";
    for (const std::string& cell : cells) out += " " + escape(cell) + " |";
    out += "\n";
  };
  line(table.header);
  out += "|";
  for (size_t i = 0; i < table.header.size(); ++i) out += i < 2 ? " --- |" : " ---: |";
  out += "\n";
  for (const auto& row : table.rows) line(row);
  return out;
}

std::string RenderJson(const Table& table) {
  ordered_json out;
  out["columns"] = table.header;
  ordered_json rows = ordered_json::array();
  for (const auto& row : table.rows) {
    ordered_json r;
    for (size_t i = 0; i < row.size() && i < table.header.size(); ++i) {
      if (i >= 2) {
        // Numeric cells stay as their rounded decimal text so JSON and CSV agree.
        r[table.header[i]] = row[i].empty() ? ordered_json(nullptr) : ordered_json(row[i]);
      } else {
        r[table.header[i]] = row[i];
      }
    }
    rows.push_back(r);
  }
  out["rows"] = rows;
  return Dump(out, 2) + "\n";
}

std::vector<std::string> EmitTables(const std::vector<DescriptorMean>& means,
                                    const std::vector<DisparityReport>& disparities,
                                    TableFormat format, const std::string& output_dir) {
  if (!fs::is_directory(output_dir)) {
    throw IoError("output directory '" + output_dir + "' does not exist");
  }
  const std::string ext = TableExtension(format);
  const std::string table1 = JoinPath(output_dir, "table1." + ext);
  const std::string table2 = JoinPath(output_dir, "table2." + ext);
  WriteFile(table1, Render(BuildDisparityTable(disparities), format));
  WriteFile(table2, Render(BuildMeansTable(means, disparities), format));
  return {table1, table2};
}

}  // namespace biasaudit
