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

#ifndef BIASAUDIT_CORPUS_H_
#define BIASAUDIT_CORPUS_H_

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace biasaudit {

// Stereotype category of a corpus sentence. Enumerator order is the
// reporting order everywhere.
enum class Axis { kGender, kProfession, kRace, kReligion };

inline constexpr std::array<Axis, 4> kAllAxes = {
    Axis::kGender, Axis::kProfession, Axis::kRace, Axis::kReligion};

std::string_view AxisName(Axis axis);
// Case-insensitive, whitespace-trimmed.
std::optional<Axis> ParseAxis(std::string_view name);

struct Label {
  enum class Kind { kStereotype, kNonStereotype, kOther };

  Kind kind = Kind::kOther;
  // The label as it appeared in the file.
  std::string raw;

  static Label Parse(std::string_view raw);
  bool is_stereotype() const { return kind == Kind::kStereotype; }
  bool operator==(const Label&) const = default;
};

struct StereotypeRecord {
  std::string id;
  std::string text;
  Label label;
  Axis axis = Axis::kGender;

  bool operator==(const StereotypeRecord&) const = default;
};

struct Corpus {
  // File order.
  std::vector<StereotypeRecord> records;
  std::string source_path;
  std::string format_version;

  bool operator==(const Corpus&) const = default;
};

enum class CorpusFormat { kJsonl, kCsv };

std::optional<CorpusFormat> ParseCorpusFormat(std::string_view name);
std::string_view CorpusFormatName(CorpusFormat format);

// Parses corpus bytes. Rows without an id get their 0-based row index. Throws
// ParseError (with the 1-based file line) on a missing field, an unknown axis,
// empty text or a duplicate id.
Corpus ParseCorpus(std::string_view content, CorpusFormat format,
                   std::string source_path = "");

// Reads and parses a corpus file. Throws IoError when unreadable.
Corpus LoadCorpus(const std::string& path, CorpusFormat format);

// Keeps the stereotype-labeled records, in order.
Corpus FilterStereotypes(const Corpus& corpus);

// RFC-4180 record reader. Each row carries the file line it started on.
struct CsvRow {
  std::vector<std::string> fields;
  int line = 0;
};
std::vector<CsvRow> ParseCsv(std::string_view content);

}  // namespace biasaudit

#endif  // BIASAUDIT_CORPUS_H_
