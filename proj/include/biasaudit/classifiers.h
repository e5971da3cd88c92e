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

#ifndef BIASAUDIT_CLASSIFIERS_H_
#define BIASAUDIT_CLASSIFIERS_H_

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace biasaudit {

enum class Channel { kNegative, kToxicity, kCompound, kPositive, kNeutral };

std::string_view ChannelName(Channel channel);
std::optional<Channel> ParseChannel(std::string_view name);

// Output of the lexicon scorer. negative + neutral + positive == 1.
struct ScoreVector {
  double negative = 0.0;
  double neutral = 1.0;
  double positive = 0.0;
  double compound = 0.0;
};

// Token valences plus booster and negation word lists. Keys are lowercase.
class Lexicon {
 public:
  static constexpr double kMaxValence = 4.0;
  static constexpr double kMaxBooster = 1.0;

  // The lexicon compiled into the library (data/default_lexicon.tsv).
  static const Lexicon& Default();

  // Parses `token<TAB>valence` lines. `!booster` and `!negate` lines switch
  // sections (`!valence` switches back); `#` starts a comment line. Throws
  // ParseError on malformed numbers or out-of-range values.
  static Lexicon FromTsv(std::string_view content);
  static Lexicon Load(const std::string& path);

  // Throws ConfigError when out of range.
  void SetValence(std::string_view token, double valence);
  void SetBooster(std::string_view token, double delta);
  void AddNegation(std::string_view token);

  std::optional<double> Valence(std::string_view lowered) const;
  std::optional<double> Booster(std::string_view lowered) const;
  bool IsNegation(std::string_view lowered) const;

  size_t size() const { return valences_.size(); }

 private:
  std::unordered_map<std::string, double> valences_;
  std::unordered_map<std::string, double> boosters_;
  std::unordered_set<std::string> negations_;
};

// Whitespace split, surrounding punctuation stripped, punctuation-only pieces
// dropped. Case is preserved.
std::vector<std::string> TokenizeForLexicon(std::string_view text);

struct TokenValence {
  double valence = 0.0;
  bool matched = false;
};

inline constexpr double kNegationScale = -0.74;
inline constexpr double kCompoundAlpha = 15.0;
// Booster damping by distance 1, 2, 3 from the modified token.
inline constexpr double kBoosterDamping[3] = {1.0, 0.95, 0.90};

std::vector<TokenValence> TokenValences(std::span<const std::string> tokens,
                                        const Lexicon& lexicon);

ScoreVector ScoreText(std::string_view text, const Lexicon& lexicon);

// Projects a score vector on one channel as a unit score. Compound maps to
// (1 - compound) / 2. Throws ConfigError for kToxicity, which the lexicon
// scorer does not produce.
double ExtractChannel(const ScoreVector& scores, Channel channel);

enum class ClassifierKind { kBuiltin, kRemote };

struct ClassifierSpec {
  std::string name;
  Channel channel = Channel::kNegative;
  ClassifierKind kind = ClassifierKind::kBuiltin;
  // Remote only: base URL of a /v1/score server and the model name it serves.
  std::string endpoint;
  std::string model;
  // Builtin only: optional lexicon TSV path; empty means the default lexicon.
  std::string lexicon_path;
};

// Channel each published classifier is scored on in the audit tables.
Channel DefaultChannelFor(std::string_view classifier_name);

// Scores texts on the classifier's configured channel. Implementations must
// return one unit score per text, in order.
class Classifier {
 public:
  virtual ~Classifier() = default;

  virtual const ClassifierSpec& spec() const = 0;
  virtual std::string model_version() const = 0;
  virtual std::vector<double> Score(std::span<const std::string> texts) = 0;
};

class LexiconClassifier : public Classifier {
 public:
  // Throws ConfigError when the channel is kToxicity.
  LexiconClassifier(ClassifierSpec spec, Lexicon lexicon);

  const ClassifierSpec& spec() const override { return spec_; }
  std::string model_version() const override;
  std::vector<double> Score(std::span<const std::string> texts) override;

  const Lexicon& lexicon() const { return lexicon_; }

 private:
  ClassifierSpec spec_;
  Lexicon lexicon_;
};

}  // namespace biasaudit

#endif  // BIASAUDIT_CLASSIFIERS_H_
