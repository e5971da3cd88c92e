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

#include "biasaudit/classifiers.h"

#include <charconv>
#include <cmath>

#include "biasaudit/embedded_data.h"
#include "biasaudit/errors.h"
#include "biasaudit/text_util.h"

namespace biasaudit {

std::string_view ChannelName(Channel channel) {
  switch (channel) {
    case Channel::kNegative:
      return "negative";
    case Channel::kToxicity:
      return "toxicity";
    case Channel::kCompound:
      return "compound";
    case Channel::kPositive:
      return "positive";
    case Channel::kNeutral:
      return "neutral";
  }
  return "unknown";
}

std::optional<Channel> ParseChannel(std::string_view name) {
  const std::string lowered = AsciiLower(Trim(name));
  for (Channel c : {Channel::kNegative, Channel::kToxicity, Channel::kCompound,
                    Channel::kPositive, Channel::kNeutral}) {
    if (lowered == ChannelName(c)) return c;
  }
  return std::nullopt;
}

const Lexicon& Lexicon::Default() {
  static const Lexicon* const kDefault = new Lexicon(FromTsv(DefaultLexiconTsv()));
  return *kDefault;
}

Lexicon Lexicon::FromTsv(std::string_view content) {
  enum class Section { kValence, kBooster, kNegate };
  Lexicon lexicon;
  Section section = Section::kValence;
  int line_no = 0;
  size_t pos = 0;
  while (pos < content.size()) {
    size_t end = content.find('\n', pos);
    if (end == std::string_view::npos) end = content.size();
    std::string_view line = content.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const std::string_view trimmed = Trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    if (trimmed.front() == '!') {
      const std::string header = AsciiLower(trimmed);
      if (header == "!booster") {
        section = Section::kBooster;
      } else if (header == "!negate") {
        section = Section::kNegate;
      } else if (header == "!valence") {
        section = Section::kValence;
      } else {
        throw ParseError("unknown section header '" + std::string(trimmed) + "'",
                         line_no);
      }
      continue;
    }

    const size_t tab = line.find('\t');
    const std::string_view token = Trim(line.substr(0, tab));
    if (section == Section::kNegate) {
      lexicon.AddNegation(token);
      continue;
    }
    if (tab == std::string_view::npos) {
      throw ParseError("expected token<TAB>value", line_no);
    }
    std::string_view value_field = line.substr(tab + 1);
    value_field = Trim(value_field.substr(0, value_field.find('\t')));
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(
        value_field.data(), value_field.data() + value_field.size(), value);
    if (ec != std::errc() || ptr != value_field.data() + value_field.size() ||
        !std::isfinite(value)) {
      throw ParseError("invalid number '" + std::string(value_field) + "'", line_no);
    }
    try {
      if (section == Section::kValence) {
        lexicon.SetValence(token, value);
      } else {
        lexicon.SetBooster(token, value);
      }
    } catch (const ConfigError& e) {
      throw ParseError(e.what(), line_no);
    }
  }
  return lexicon;
}

Lexicon Lexicon::Load(const std::string& path) { return FromTsv(ReadFile(path)); }

void Lexicon::SetValence(std::string_view token, double valence) {
  if (!(std::abs(valence) <= kMaxValence)) {
    throw ConfigError("valence for '" + std::string(token) + "' outside [-4, 4]");
  }
  valences_[Utf8Lower(token)] = valence;
}

void Lexicon::SetBooster(std::string_view token, double delta) {
  if (!(std::abs(delta) <= kMaxBooster)) {
    throw ConfigError("booster delta for '" + std::string(token) +
                      "' outside [-1, 1]");
  }
  boosters_[Utf8Lower(token)] = delta;
}

void Lexicon::AddNegation(std::string_view token) {
  negations_.insert(Utf8Lower(token));
}

std::optional<double> Lexicon::Valence(std::string_view lowered) const {
  const auto it = valences_.find(std::string(lowered));
  if (it == valences_.end()) return std::nullopt;
  return it->second;
}

std::optional<double> Lexicon::Booster(std::string_view lowered) const {
  const auto it = boosters_.find(std::string(lowered));
  if (it == boosters_.end()) return std::nullopt;
  return it->second;
}

bool Lexicon::IsNegation(std::string_view lowered) const {
  return negations_.contains(std::string(lowered));
}

std::vector<std::string> TokenizeForLexicon(std::string_view text) {
  std::vector<std::string> tokens;
  for (const std::string& piece : SplitWhitespace(text)) {
    const std::string_view stripped = StripPunctuation(piece);
    if (!stripped.empty()) tokens.emplace_back(stripped);
  }
  return tokens;
}

std::vector<TokenValence> TokenValences(std::span<const std::string> tokens,
                                        const Lexicon& lexicon) {
  std::vector<std::string> lowered;
  lowered.reserve(tokens.size());
  for (const std::string& t : tokens) lowered.push_back(Utf8Lower(t));

  std::vector<TokenValence> out(tokens.size());
  for (size_t i = 0; i < lowered.size(); ++i) {
    const std::optional<double> base = lexicon.Valence(lowered[i]);
    if (!base) continue;
    double valence = *base;
    bool negated = false;
    for (size_t distance = 1; distance <= 3 && distance <= i; ++distance) {
      const std::string& prev = lowered[i - distance];
      if (const std::optional<double> delta = lexicon.Booster(prev)) {
        const double scaled = *delta * kBoosterDamping[distance - 1];
        valence += valence < 0 ? -scaled : scaled;
      }
      if (lexicon.IsNegation(prev)) negated = true;
    }
    if (negated) valence *= kNegationScale;
    out[i] = {valence, true};
  }
  return out;
}

ScoreVector ScoreText(std::string_view text, const Lexicon& lexicon) {
  const std::vector<std::string> tokens = TokenizeForLexicon(text);
  const std::vector<TokenValence> valences = TokenValences(tokens, lexicon);

  double sum = 0.0;
  double pos_sum = 0.0;
  double neg_sum = 0.0;
  double neutral_count = 0.0;
  for (const TokenValence& tv : valences) {
    sum += tv.valence;
    if (tv.valence > 0) {
      pos_sum += tv.valence + 1.0;
    } else if (tv.valence < 0) {
      neg_sum += tv.valence - 1.0;
    } else {
      neutral_count += 1.0;
    }
  }

  ScoreVector scores;
  if (pos_sum == 0.0 && neg_sum == 0.0) return scores;
  scores.compound = sum / std::sqrt(sum * sum + kCompoundAlpha);
  const double total = pos_sum + std::abs(neg_sum) + neutral_count;
  scores.negative = std::abs(neg_sum) / total;
  scores.positive = pos_sum / total;
  scores.neutral = neutral_count / total;
  return scores;
}

double ExtractChannel(const ScoreVector& scores, Channel channel) {
  switch (channel) {
    case Channel::kNegative:
      return scores.negative;
    case Channel::kPositive:
      return scores.positive;
    case Channel::kNeutral:
      return scores.neutral;
    case Channel::kCompound:
      return (1.0 - scores.compound) / 2.0;
    case Channel::kToxicity:
      break;
  }
  throw ConfigError("the lexicon scorer has no '" +
                    std::string(ChannelName(channel)) + "' channel");
}

Channel DefaultChannelFor(std::string_view classifier_name) {
  const std::string lowered = AsciiLower(classifier_name);
  if (lowered.find("detoxify") != std::string::npos ||
      lowered.find("toxic") != std::string::npos) {
    return Channel::kToxicity;
  }
  return Channel::kNegative;
}

LexiconClassifier::LexiconClassifier(ClassifierSpec spec, Lexicon lexicon)
    : spec_(std::move(spec)), lexicon_(std::move(lexicon)) {
  if (spec_.channel == Channel::kToxicity) {
    throw ConfigError("builtin classifier '" + spec_.name +
                      "' cannot score the toxicity channel");
  }
}

std::string LexiconClassifier::model_version() const {
  return "builtin-lexicon/" + std::to_string(lexicon_.size()) + "-entries";
}

std::vector<double> LexiconClassifier::Score(std::span<const std::string> texts) {
  std::vector<double> out;
  out.reserve(texts.size());
  for (const std::string& text : texts) {
    out.push_back(ExtractChannel(ScoreText(text, lexicon_), spec_.channel));
  }
  return out;
}

}  // namespace biasaudit
