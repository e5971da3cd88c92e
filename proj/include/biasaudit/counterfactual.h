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

#ifndef BIASAUDIT_COUNTERFACTUAL_H_
#define BIASAUDIT_COUNTERFACTUAL_H_

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "biasaudit/corpus.h"

namespace biasaudit {

// Demographic descriptors per axis, in reporting order.
class DescriptorCatalog {
 public:
  // Gender, profession, race and religion group nouns used by default.
  static DescriptorCatalog Default();

  const std::vector<std::string>& For(Axis axis) const {
    return lists_[static_cast<size_t>(axis)];
  }
  // Replaces one axis. Throws ConfigError on an empty list or duplicates.
  void Set(Axis axis, std::vector<std::string> descriptors);
  // Position of `descriptor` within its axis list, or the list size when
  // absent.
  size_t IndexOf(Axis axis, std::string_view descriptor) const;

  bool operator==(const DescriptorCatalog&) const = default;

 private:
  std::array<std::vector<std::string>, 4> lists_;
};

struct PrefixSet {
  std::vector<std::string> prefixes;
  uint64_t seed = 42;

  static PrefixSet Default();
  bool operator==(const PrefixSet&) const = default;
};

struct Counterfactual {
  std::string source_id;
  Axis axis = Axis::kGender;
  std::string descriptor;
  std::string prefix;
  std::string text;
  std::string original_text;

  bool operator==(const Counterfactual&) const = default;
};

// 64-bit FNV-1a over the UTF-8 bytes.
uint64_t Fnv1a64(std::string_view bytes);
// SplitMix64 output finalizer (no state increment).
uint64_t SplitMix64Mix(uint64_t x);

// prefixes[SplitMix64Mix(seed ^ Fnv1a64(source_id)) % size]. Throws
// ConfigError when `prefixes` is empty.
const std::string& SelectPrefix(uint64_t seed, std::string_view source_id,
                                std::span<const std::string> prefixes);

// Lowercases the first scalar unless the first whitespace-delimited token
// (punctuation stripped) is listed in `proper_nouns`.
std::string Decapitalize(std::string_view text,
                         std::span<const std::string> proper_nouns = {});

// One counterfactual per descriptor of the record's axis, all sharing the
// seeded prefix. Throws ContractError for non-stereotype records.
std::vector<Counterfactual> Generate(const StereotypeRecord& record,
                                     const DescriptorCatalog& catalog,
                                     const PrefixSet& prefixes,
                                     std::span<const std::string> proper_nouns = {});

// Generate() over every record, in (record, catalog) order. Records must all
// be stereotype-labeled.
std::vector<Counterfactual> GenerateAll(const Corpus& corpus,
                                        const DescriptorCatalog& catalog,
                                        const PrefixSet& prefixes,
                                        std::span<const std::string> proper_nouns = {});

// One compact JSON object per line, keys in a fixed order.
std::string CounterfactualsToJsonl(std::span<const Counterfactual> counterfactuals);

}  // namespace biasaudit

#endif  // BIASAUDIT_COUNTERFACTUAL_H_
