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

#include <algorithm>
#include <unordered_set>

#include "biasaudit/errors.h"
#include "biasaudit/text_util.h"
#include "json.hpp"

namespace biasaudit {

namespace {

using json = nlohmann::json;

constexpr std::string_view kJsonlVersion = "jsonl/1";
constexpr std::string_view kCsvVersion = "csv/1";

std::string_view StripBom(std::string_view content) {
  if (content.substr(0, 3) == "\xEF\xBB\xBF") content.remove_prefix(3);
  return content;
}

// Shared validation for one row; the three required values are given raw.
StereotypeRecord MakeRecord(std::optional<std::string> id,
                            const std::string& text, const std::string& label,
                            const std::string& axis, size_t row_index,
                            int line) {
  StereotypeRecord record;
  const std::string_view trimmed_text = Trim(text);
  if (trimmed_text.empty()) throw ParseError("field 'text' is empty", line);
  if (Trim(label).empty()) throw ParseError("missing required field 'label'", line);
  if (Trim(axis).empty()) throw ParseError("missing required field 'axis'", line);
  const std::optional<Axis> parsed_axis = ParseAxis(axis);
  if (!parsed_axis) {
    throw ParseError("unknown axis '" + axis +
                         "' (expected gender, profession, race or religion)",
                     line);
  }
  record.id = id.has_value() ? std::string(Trim(*id)) : std::to_string(row_index);
  record.text = std::string(trimmed_text);
  record.label = Label::Parse(label);
  record.axis = *parsed_axis;
  return record;
}

void CheckUniqueId(std::unordered_set<std::string>& seen,
                   const StereotypeRecord& record, int line) {
  if (!seen.insert(record.id).second) {
    throw ParseError("duplicate id '" + record.id + "'", line);
  }
}

Corpus ParseJsonl(std::string_view content) {
  Corpus corpus;
  corpus.format_version = std::string(kJsonlVersion);
  std::unordered_set<std::string> seen;
  int line = 0;
  size_t pos = 0;
  while (pos < content.size()) {
    size_t end = content.find('\n', pos);
    if (end == std::string_view::npos) end = content.size();
    std::string_view raw = content.substr(pos, end - pos);
    pos = end + 1;
    ++line;
    if (Trim(raw).empty()) continue;

    json row;
    try {
      row = json::parse(raw);
    } catch (const json::parse_error& e) {
      throw ParseError(std::string("invalid JSON: ") + e.what(), line);
    }
    if (!row.is_object()) throw ParseError("row is not a JSON object", line);

    const auto required = [&](const char* key) -> std::string {
      const auto it = row.find(key);
      if (it == row.end() || it->is_null()) {
        throw ParseError(std::string("missing required field '") + key + "'", line);
      }
      if (!it->is_string()) {
        throw ParseError(std::string("field '") + key + "' is not a string", line);
      }
      return it->get<std::string>();
    };
    const std::string text = required("text");
    const std::string label = required("label");
    const std::string axis = required("axis");

    std::optional<std::string> id;
    if (const auto it = row.find("id"); it != row.end() && !it->is_null()) {
      if (it->is_string()) {
        id = it->get<std::string>();
      } else if (it->is_number_integer()) {
        id = it->dump();
      } else {
        throw ParseError("field 'id' must be a string or integer", line);
      }
    }
    StereotypeRecord record =
        MakeRecord(id, text, label, axis, corpus.records.size(), line);
    CheckUniqueId(seen, record, line);
    corpus.records.push_back(std::move(record));
  }
  return corpus;
}

Corpus ParseCsvCorpus(std::string_view content) {
  Corpus corpus;
  corpus.format_version = std::string(kCsvVersion);
  const std::vector<CsvRow> rows = ParseCsv(content);
  if (rows.empty()) return corpus;

  const CsvRow& header = rows.front();
  std::optional<size_t> id_col, text_col, label_col, axis_col;
  for (size_t i = 0; i < header.fields.size(); ++i) {
    const std::string name = AsciiLower(Trim(header.fields[i]));
    if (name == "id") id_col = i;
    if (name == "text") text_col = i;
    if (name == "label") label_col = i;
    if (name == "axis") axis_col = i;
  }
  if (!text_col) throw ParseError("header has no 'text' column", header.line);
  if (!label_col) throw ParseError("header has no 'label' column", header.line);
  if (!axis_col) throw ParseError("header has no 'axis' column", header.line);

  std::unordered_set<std::string> seen;
  for (size_t r = 1; r < rows.size(); ++r) {
    const CsvRow& row = rows[r];
    if (row.fields.size() == 1 && Trim(row.fields[0]).empty()) continue;
    const auto cell = [&](size_t col, const char* name) -> std::string {
      if (col >= row.fields.size() || Trim(row.fields[col]).empty()) {
        throw ParseError(std::string("missing required field '") + name + "'",
                         row.line);
      }
      return row.fields[col];
    };
    const std::string text = cell(*text_col, "text");
    const std::string label = cell(*label_col, "label");
    const std::string axis = cell(*axis_col, "axis");
    std::optional<std::string> id;
    if (id_col && *id_col < row.fields.size() && !Trim(row.fields[*id_col]).empty()) {
      id = row.fields[*id_col];
    }
    StereotypeRecord record =
        MakeRecord(id, text, label, axis, corpus.records.size(), row.line);
    CheckUniqueId(seen, record, row.line);
    corpus.records.push_back(std::move(record));
  }
  return corpus;
}

}  // namespace

std::string_view AxisName(Axis axis) {
  switch (axis) {
    case Axis::kGender:
      return "gender";
    case Axis::kProfession:
      return "profession";
    case Axis::kRace:
      return "race";
    case Axis::kReligion:
      return "religion";
  }
  return "unknown";
}

std::optional<Axis> ParseAxis(std::string_view name) {
  const std::string lowered = AsciiLower(Trim(name));
  for (Axis axis : kAllAxes) {
    if (lowered == AxisName(axis)) return axis;
  }
  return std::nullopt;
}

Label Label::Parse(std::string_view raw) {
  Label label;
  label.raw = std::string(raw);
  const std::string lowered = AsciiLower(Trim(raw));
  if (lowered == "stereotype") {
    label.kind = Kind::kStereotype;
  } else if (lowered == "non_stereotype" || lowered == "non-stereotype" ||
             lowered == "nonstereotype") {
    label.kind = Kind::kNonStereotype;
  } else {
    label.kind = Kind::kOther;
  }
  return label;
}

std::optional<CorpusFormat> ParseCorpusFormat(std::string_view name) {
  const std::string lowered = AsciiLower(Trim(name));
  if (lowered == "jsonl") return CorpusFormat::kJsonl;
  if (lowered == "csv") return CorpusFormat::kCsv;
  return std::nullopt;
}

std::string_view CorpusFormatName(CorpusFormat format) {
  return format == CorpusFormat::kJsonl ? "jsonl" : "csv";
}

std::vector<CsvRow> ParseCsv(std::string_view content) {
  content = StripBom(content);
  std::vector<CsvRow> rows;
  if (content.empty()) return rows;

  CsvRow row;
  std::string field;
  bool in_quotes = false;
  bool field_was_quoted = false;
  int line = 1;
  row.line = 1;

  const auto end_field = [&] {
    row.fields.push_back(std::move(field));
    field.clear();
    field_was_quoted = false;
  };
  const auto end_row = [&] {
    end_field();
    rows.push_back(std::move(row));
    row = CsvRow{};
  };

  for (size_t i = 0; i < content.size(); ++i) {
    const char c = content[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < content.size() && content[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (field.empty() && !field_was_quoted) {
          in_quotes = true;
          field_was_quoted = true;
        } else {
          field.push_back(c);
        }
        break;
      case ',':
        end_field();
        break;
      case '\r':
        if (i + 1 < content.size() && content[i + 1] == '\n') break;
        [[fallthrough]];
      case '\n':
        end_row();
        ++line;
        row.line = line;
        break;
      default:
        field.push_back(c);
    }
  }
  if (in_quotes) throw ParseError("unterminated quoted field", row.line);
  if (!field.empty() || field_was_quoted || !row.fields.empty()) end_row();
  return rows;
}

Corpus ParseCorpus(std::string_view content, CorpusFormat format,
                   std::string source_path) {
  content = StripBom(content);
  Corpus corpus = format == CorpusFormat::kJsonl ? ParseJsonl(content)
                                                 : ParseCsvCorpus(content);
  corpus.source_path = std::move(source_path);
  return corpus;
}

Corpus LoadCorpus(const std::string& path, CorpusFormat format) {
  return ParseCorpus(ReadFile(path), format, path);
}

Corpus FilterStereotypes(const Corpus& corpus) {
  Corpus filtered;
  filtered.source_path = corpus.source_path;
  filtered.format_version = corpus.format_version;
  std::copy_if(corpus.records.begin(), corpus.records.end(),
               std::back_inserter(filtered.records),
               [](const StereotypeRecord& r) { return r.label.is_stereotype(); });
  return filtered;
}

}  // namespace biasaudit
