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

#include <algorithm>
#include <cmath>
#include <random>

#include "biasaudit/errors.h"
#include "gtest/gtest.h"

namespace biasaudit {
namespace {

Lexicon ToyLexicon() {
  Lexicon lexicon;
  lexicon.SetValence("terrible", -2.1);
  lexicon.SetBooster("very", 0.293);
  lexicon.AddNegation("not");
  return lexicon;
}

std::vector<double> Values(const std::vector<TokenValence>& tv) {
  std::vector<double> out;
  for (const auto& t : tv) out.push_back(t.valence);
  return out;
}

TEST(TokenValences, DirectLookup) {
  const std::vector<std::string> tokens = {"terrible"};
  const auto tv = TokenValences(tokens, ToyLexicon());
  ASSERT_EQ(tv.size(), 1);
  EXPECT_DOUBLE_EQ(tv[0].valence, -2.1);
  EXPECT_TRUE(tv[0].matched);
}

TEST(TokenValences, BoosterAddsTowardSign) {
  const std::vector<std::string> tokens = {"very", "terrible"};
  const auto tv = TokenValences(tokens, ToyLexicon());
  EXPECT_FALSE(tv[0].matched);
  EXPECT_EQ(tv[0].valence, 0.0);
  EXPECT_NEAR(tv[1].valence, -2.393, 1e-12);
}

TEST(TokenValences, NegationFlipsAndDamps) {
  const std::vector<std::string> tokens = {"not", "terrible"};
  const auto tv = TokenValences(tokens, ToyLexicon());
  EXPECT_EQ(tv[0].valence, 0.0);
  EXPECT_NEAR(tv[1].valence, 1.554, 1e-12);
}

TEST(TokenValences, BoosterDampingByDistance) {
  Lexicon lexicon = ToyLexicon();
  lexicon.SetBooster("really", 0.293);
  lexicon.SetBooster("so", 0.293);
  const std::vector<std::string> tokens = {"very", "really", "so", "terrible"};
  // -2.1 - 0.293 * (1.0 + 0.95 + 0.90)
  EXPECT_NEAR(TokenValences(tokens, lexicon)[3].valence, -2.93505, 1e-12);

  // Four tokens back is out of range.
  const std::vector<std::string> far = {"very", "a", "b", "c", "terrible"};
  EXPECT_DOUBLE_EQ(TokenValences(far, lexicon)[4].valence, -2.1);
}

TEST(TokenValences, CaseInsensitiveLookup) {
  const std::vector<std::string> tokens = {"NOT", "Terrible"};
  EXPECT_NEAR(TokenValences(tokens, ToyLexicon())[1].valence, 1.554, 1e-12);
}

TEST(ScoreText, SingleNegativeToken) {
  const ScoreVector s = ScoreText("terrible", ToyLexicon());
  EXPECT_NEAR(s.compound, -0.4766576055745744, 1e-12);
  EXPECT_DOUBLE_EQ(s.negative, 1.0);
  EXPECT_DOUBLE_EQ(s.neutral, 0.0);
  EXPECT_DOUBLE_EQ(s.positive, 0.0);
}

TEST(ScoreText, AllNeutral) {
  for (const char* text : {"", "the cat sat", "  ...  "}) {
    const ScoreVector s = ScoreText(text, ToyLexicon());
    EXPECT_EQ(s.negative, 0.0) << text;
    EXPECT_EQ(s.neutral, 1.0) << text;
    EXPECT_EQ(s.positive, 0.0) << text;
    EXPECT_EQ(s.compound, 0.0) << text;
  }
}

TEST(ScoreText, NegatedExample) {
  const ScoreVector s = ScoreText("not terrible", ToyLexicon());
  EXPECT_NEAR(s.compound, 0.372383408212584, 1e-12);
  EXPECT_NEAR(s.compound, 0.3724, 5e-5);
}

TEST(ScoreText, BoostedSplit) {
  const ScoreVector s = ScoreText("Very terrible!", ToyLexicon());
  // |neg| = 2.393 + 1, one neutral token.
  EXPECT_NEAR(s.negative, 0.7723651263373549, 1e-12);
  EXPECT_NEAR(s.negative + s.neutral + s.positive, 1.0, 1e-12);
}

TEST(ExtractChannel, Projections) {
  const ScoreVector s{0.3, 0.5, 0.2, -0.1};
  EXPECT_DOUBLE_EQ(ExtractChannel(s, Channel::kNegative), 0.3);
  EXPECT_DOUBLE_EQ(ExtractChannel(s, Channel::kNeutral), 0.5);
  EXPECT_DOUBLE_EQ(ExtractChannel(s, Channel::kPositive), 0.2);
  EXPECT_DOUBLE_EQ(ExtractChannel({0, 1, 0, 0.0}, Channel::kCompound), 0.5);
  EXPECT_DOUBLE_EQ(ExtractChannel({0, 1, 0, -1.0}, Channel::kCompound), 1.0);
  EXPECT_THROW(ExtractChannel(s, Channel::kToxicity), ConfigError);
}

TEST(Tokenize, StripsPunctuationAndUnicodeSpace) {
  EXPECT_EQ(TokenizeForLexicon("“Hello,” world… isn't it?  --"),
            (std::vector<std::string>{"Hello", "world", "isn't", "it"}));
}

TEST(Lexicon, TsvSections) {
  const Lexicon lexicon = Lexicon::FromTsv(
      "# comment\n"
      "Good\t1.9\t0.9\t[2, 2, 1]\n"
      "bad\t-2.5\n"
      "\n"
      "!booster\n"
      "very\t0.293\n"
      "!negate\n"
      "never\n"
      "!valence\n"
      "ok\t0.9\n");
  EXPECT_EQ(lexicon.Valence("good"), 1.9);
  EXPECT_EQ(lexicon.Valence("bad"), -2.5);
  EXPECT_EQ(lexicon.Valence("ok"), 0.9);
  EXPECT_EQ(lexicon.Booster("very"), 0.293);
  EXPECT_TRUE(lexicon.IsNegation("never"));
  EXPECT_FALSE(lexicon.Valence("never").has_value());
}

TEST(Lexicon, RejectsBadEntries) {
  EXPECT_THROW(Lexicon::FromTsv("awful\t-4.5\n"), ParseError);
  EXPECT_THROW(Lexicon::FromTsv("awful\tabc\n"), ParseError);
  EXPECT_THROW(Lexicon::FromTsv("!booster\nvery\t1.5\n"), ParseError);
  EXPECT_THROW(Lexicon::FromTsv("!mystery\n"), ParseError);
  EXPECT_THROW(Lexicon::FromTsv("lonely\n"), ParseError);
}

TEST(Lexicon, DefaultHasNoDescriptorTokens) {
  const Lexicon& lexicon = Lexicon::Default();
  EXPECT_GT(lexicon.size(), 50u);
  for (const char* d : {"males", "females", "non-binaries", "construction", "workers",
                        "bankers", "doctors", "nurses", "teachers", "whites", "blacks",
                        "asians", "atheists", "christians", "jews", "muslims"}) {
    EXPECT_FALSE(lexicon.Valence(d).has_value()) << d;
  }
}

TEST(LexiconClassifier, ScoresConfiguredChannel) {
  LexiconClassifier negative({"vader", Channel::kNegative}, ToyLexicon());
  LexiconClassifier compound({"vader", Channel::kCompound}, ToyLexicon());
  const std::vector<std::string> texts = {"terrible", "fine day"};
  EXPECT_EQ(negative.Score(texts), (std::vector<double>{1.0, 0.0}));
  EXPECT_NEAR(compound.Score(texts)[0], (1.0 + 0.4766576055745744) / 2.0, 1e-12);
  EXPECT_THROW(LexiconClassifier({"detoxify", Channel::kToxicity}, ToyLexicon()), ConfigError);
}

TEST(DefaultChannel, PublishedMapping) {
  EXPECT_EQ(DefaultChannelFor("Detoxify"), Channel::kToxicity);
  EXPECT_EQ(DefaultChannelFor("regard-v3"), Channel::kNegative);
  EXPECT_EQ(DefaultChannelFor("distilbert-sentiment"), Channel::kNegative);
  EXPECT_EQ(DefaultChannelFor("vader"), Channel::kNegative);
}

// Random sentences drawn from a vocabulary of valenced and neutral words.
class RandomText {
 public:
  explicit RandomText(uint64_t seed) : rng_(seed) {}

  std::vector<std::string> Tokens(size_t max_len, bool allow_modifiers) {
    static const char* kWords[] = {"terrible", "good", "awful", "happy", "the", "cat",
                                   "sat",      "on",   "a",     "mat",   "lazy", "kind"};
    static const char* kModifiers[] = {"very", "not"};
    std::vector<std::string> out;
    const size_t n = rng_() % (max_len + 1);
    for (size_t i = 0; i < n; ++i) {
      if (allow_modifiers && rng_() % 4 == 0) {
        out.emplace_back(kModifiers[rng_() % 2]);
      } else {
        out.emplace_back(kWords[rng_() % 12]);
      }
    }
    return out;
  }
  std::mt19937_64& rng() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

Lexicon PropertyLexicon() {
  Lexicon lexicon = ToyLexicon();
  lexicon.SetValence("good", 1.9);
  lexicon.SetValence("awful", -2.0);
  lexicon.SetValence("happy", 2.7);
  lexicon.SetValence("lazy", -1.5);
  lexicon.SetValence("kind", 2.4);
  return lexicon;
}

std::string JoinTokens(const std::vector<std::string>& tokens) {
  std::string out;
  for (const auto& t : tokens) out += (out.empty() ? "" : " ") + t;
  return out;
}

TEST(ScoreTextProperties, RangesAndPartition) {
  const Lexicon lexicon = PropertyLexicon();
  RandomText gen(1);
  for (int trial = 0; trial < 1000; ++trial) {
    const ScoreVector s = ScoreText(JoinTokens(gen.Tokens(12, true)), lexicon);
    EXPECT_GT(s.compound, -1.0);
    EXPECT_LT(s.compound, 1.0);
    EXPECT_NEAR(s.negative + s.neutral + s.positive, 1.0, 1e-9);
    for (double v : {s.negative, s.neutral, s.positive}) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
}

TEST(ScoreTextProperties, PermutationInvariantWithoutModifiers) {
  const Lexicon lexicon = PropertyLexicon();
  RandomText gen(2);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<std::string> tokens = gen.Tokens(10, false);
    const ScoreVector a = ScoreText(JoinTokens(tokens), lexicon);
    std::shuffle(tokens.begin(), tokens.end(), gen.rng());
    const ScoreVector b = ScoreText(JoinTokens(tokens), lexicon);
    EXPECT_NEAR(a.negative, b.negative, 1e-12);
    EXPECT_NEAR(a.positive, b.positive, 1e-12);
    EXPECT_NEAR(a.neutral, b.neutral, 1e-12);
    EXPECT_NEAR(a.compound, b.compound, 1e-12);
  }
}

TEST(ScoreTextProperties, AppendingNegativeTokenNeverLowersNegative) {
  const Lexicon lexicon = PropertyLexicon();
  RandomText gen(3);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<std::string> tokens = gen.Tokens(10, false);
    const double before = ScoreText(JoinTokens(tokens), lexicon).negative;
    tokens.emplace_back(trial % 2 ? "lazy" : "terrible");
    EXPECT_GE(ScoreText(JoinTokens(tokens), lexicon).negative, before);
  }
}

TEST(ScoreTextProperties, DescriptorNeutrality) {
  const Lexicon& lexicon = Lexicon::Default();
  const std::vector<std::string> bodies = {
      "usually think that the woman was too weak to lead.",
      "often assume that the lawyer was greedy and dishonest.",
      "mostly say that the cook was kind but lazy."};
  for (const std::string& body : bodies) {
    const ScoreVector base = ScoreText("Males " + body, lexicon);
    for (const char* descriptor : {"Females", "Non-binaries", "Whites", "Jews"}) {
      const ScoreVector s = ScoreText(std::string(descriptor) + " " + body, lexicon);
      EXPECT_EQ(s.negative, base.negative);
      EXPECT_EQ(s.neutral, base.neutral);
      EXPECT_EQ(s.positive, base.positive);
      EXPECT_EQ(s.compound, base.compound);
    }
  }
}

}  // namespace
}  // namespace biasaudit
