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

#include "biasaudit/counterfactual.h"

#include <algorithm>
#include <unordered_set>

#include "biasaudit/errors.h"
#include "biasaudit/text_util.h"
#include "json.hpp"

namespace biasaudit {

DescriptorCatalog DescriptorCatalog::Default() {
  DescriptorCatalog catalog;
  catalog.Set(Axis::kGender, {"Males", "Females", "Non-binaries"});
  catalog.Set(Axis::kProfession,
              {"Construction workers", "Bankers", "Doctors", "Nurses", "Teachers"});
  catalog.Set(Axis::kRace, {"Whites", "Blacks", "Asians"});
  catalog.Set(Axis::kReligion, {"Atheists", "Christians", "Jews", "Muslims"});
  return catalog;
}

void DescriptorCatalog::Set(Axis axis, std::vector<std::string> descriptors) {
  if (descriptors.empty()) {
    throw ConfigError("descriptor list for " + std::string(AxisName(axis)) +
                      " is empty");
  }
  std::unordered_set<std::string> seen;
  for (const std::string& d : descriptors) {
    if (Trim(d).empty()) {
      throw ConfigError("blank descriptor for " + std::string(AxisName(axis)));
    }
    if (!seen.insert(d).second) {
      throw ConfigError("duplicate descriptor '" + d + "' for " +
                        std::string(AxisName(axis)));
    }
  }
  lists_[static_cast<size_t>(axis)] = std::move(descriptors);
}

size_t DescriptorCatalog::IndexOf(Axis axis, std::string_view descriptor) const {
  const auto& list = For(axis);
  return static_cast<size_t>(std::find(list.begin(), list.end(), descriptor) -
                             list.begin());
}

PrefixSet PrefixSet::Default() {
  return PrefixSet{{"often assume that", "usually think that",
                    "sometimes feel that", "mostly say that"},
                   42};
}

uint64_t Fnv1a64(std::string_view bytes) {
  uint64_t hash = 0xcbf29ce484222325ULL;
  for (const char c : bytes) {
    hash ^= static_cast<unsigned char>(c);
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

uint64_t SplitMix64Mix(uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

const std::string& SelectPrefix(uint64_t seed, std::string_view source_id,
                                std::span<const std::string> prefixes) {
  if (prefixes.empty()) throw ConfigError("prefix set is empty");
  const uint64_t mixed = SplitMix64Mix(seed ^ Fnv1a64(source_id));
  return prefixes[mixed % prefixes.size()];
}

std::string Decapitalize(std::string_view text,
                         std::span<const std::string> proper_nouns) {
  if (text.empty()) return std::string(text);
  if (!proper_nouns.empty()) {
    const std::vector<std::string> tokens = SplitWhitespace(text);
    if (!tokens.empty()) {
      const std::string_view first = StripPunctuation(tokens.front());
      if (std::find(proper_nouns.begin(), proper_nouns.end(), first) !=
          proper_nouns.end()) {
        return std::string(text);
      }
    }
  }
  const DecodedScalar head = DecodeUtf8(text, 0);
  std::string out;
  out.reserve(text.size());
  AppendUtf8(ToLowerScalar(head.value), out);
  out.append(text.substr(head.length));
  return out;
}

std::vector<Counterfactual> Generate(const StereotypeRecord& record,
                                     const DescriptorCatalog& catalog,
                                     const PrefixSet& prefixes,
                                     std::span<const std::string> proper_nouns) {
  if (!record.label.is_stereotype()) {
    throw ContractError("record '" + record.id + "' is labeled '" +
                        record.label.raw + "', not stereotype");
  }
  const std::string& prefix =
      SelectPrefix(prefixes.seed, record.id, prefixes.prefixes);
  const std::string body = Decapitalize(record.text, proper_nouns);

  std::vector<Counterfactual> out;
  for (const std::string& descriptor : catalog.For(record.axis)) {
    Counterfactual cf;
    cf.source_id = record.id;
    cf.axis = record.axis;
    cf.descriptor = descriptor;
    cf.prefix = prefix;
    cf.text = descriptor + " " + prefix + " " + body;
    cf.original_text = record.text;
    out.push_back(std::move(cf));
  }
  return out;
}

std::vector<Counterfactual> GenerateAll(const Corpus& corpus,
                                        const DescriptorCatalog& catalog,
                                        const PrefixSet& prefixes,
                                        std::span<const std::string> proper_nouns) {
  std::vector<Counterfactual> out;
  for (const StereotypeRecord& record : corpus.records) {
    std::vector<Counterfactual> batch =
        Generate(record, catalog, prefixes, proper_nouns);
    std::move(batch.begin(), batch.end(), std::back_inserter(out));
  }
  return out;
}

std::string CounterfactualsToJsonl(std::span<const Counterfactual> counterfactuals) {
  std::string out;
  for (const Counterfactual& cf : counterfactuals) {
    nlohmann::ordered_json row;
    row["source_id"] = cf.source_id;
    row["axis"] = AxisName(cf.axis);
    row["descriptor"] = cf.descriptor;
    row["prefix"] = cf.prefix;
    row["text"] = cf.text;
    row["original_text"] = cf.original_text;
    out += row.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
    out += '\n';
  }
  return out;
}

}  // namespace biasaudit
