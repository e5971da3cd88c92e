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

#ifndef BIASAUDIT_ATTRIBUTION_H_
#define BIASAUDIT_ATTRIBUTION_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "biasaudit/classifiers.h"
#include "json.hpp"

namespace biasaudit {

// Set of players, bit i set when player i is present.
using Coalition = uint64_t;
inline constexpr size_t kMaxPlayers = 62;
inline constexpr size_t kDefaultExactLimit = 12;

// Memoized coalition value function v(S). Values are fetched in batches so a
// remote classifier sees one request stream per estimator call.
class CoalitionValue {
 public:
  using BatchFn = std::function<std::vector<double>(std::span<const Coalition>)>;

  // Throws ContractError when players > kMaxPlayers.
  CoalitionValue(size_t players, BatchFn fn, std::vector<std::string> labels = {});
  static CoalitionValue FromFunction(size_t players,
                                     std::function<double(Coalition)> fn);

  size_t players() const { return players_; }
  Coalition full() const { return players_ == 0 ? 0 : (Coalition{1} << players_) - 1; }
  const std::vector<std::string>& labels() const { return labels_; }

  double operator()(Coalition coalition);
  // Evaluates every coalition not yet cached with one batch call.
  void Prefetch(std::span<const Coalition> coalitions);
  // Distinct coalitions evaluated so far.
  size_t evaluations() const { return cache_.size(); }

 private:
  size_t players_;
  BatchFn fn_;
  std::vector<std::string> labels_;
  std::unordered_map<Coalition, double> cache_;
};

// Whitespace tokens grouped into attribution units.
struct TokenSplit {
  std::vector<std::string> tokens;
  // [begin, end) token ranges; they partition `tokens` in order.
  std::vector<std::pair<size_t, size_t>> units;
  std::optional<size_t> descriptor_unit;

  std::vector<std::string> UnitTexts() const;
};

// Splits `text` on whitespace. The earliest occurrence of any phrase in
// `descriptors` (case- and punctuation-insensitive) is recorded as the
// descriptor unit and, when `group_descriptor` is set, merged into one unit.
TokenSplit SplitUnits(std::string_view text, std::span<const std::string> descriptors,
                      bool group_descriptor = true);

// Units present in `coalition`, single-space joined in original order.
std::string CoalitionText(std::span<const std::string> units, Coalition coalition);

// v(S) = classifier score of CoalitionText(units, S). The classifier must
// outlive the returned value function.
CoalitionValue MakeTextValueFunction(std::vector<std::string> units,
                                     Classifier& classifier);

enum class AttributionMethod { kExact, kKernel, kPermutation };

std::string_view AttributionMethodName(AttributionMethod method);
std::optional<AttributionMethod> ParseAttributionMethod(std::string_view name);

struct Attribution {
  std::vector<std::string> units;
  std::vector<double> phi;
  double base_value = 0.0;
  double full_value = 0.0;
  AttributionMethod method = AttributionMethod::kExact;
  size_t samples = 0;
  std::optional<uint64_t> seed;

  double PhiSum() const;
  nlohmann::ordered_json ToJson() const;
};

// Shapley kernel weight (n - 1) / (C(n, s) * s * (n - s)) for 0 < s < n.
double ShapleyKernelWeight(size_t n, size_t s);

// Exact Shapley values by enumerating all 2^n coalitions. Throws ContractError
// when n > exact_limit.
Attribution ExactShapley(CoalitionValue& value, size_t exact_limit = kDefaultExactLimit);

struct KernelShapOptions {
  // Coalitions to draw (complement pairs count twice). Must be >= n.
  size_t n_samples = 2048;
  uint64_t seed = 42;
  // Use all 2^n - 2 proper coalitions with their exact kernel weights.
  bool enumerate_all = false;
  double ridge = 1e-10;
};

// Kernel-SHAP: weighted least squares over coalitions with v(empty) and the
// efficiency sum imposed as hard constraints. Sampling draws a coalition size
// in proportion to its total kernel mass, then a uniform subset of that size
// together with its complement. When n_samples covers every proper coalition
// the full enumeration is used instead. Throws NumericalError when the normal
// equations stay singular after damping.
Attribution KernelShap(CoalitionValue& value, const KernelShapOptions& options = {});

// Mean marginal contribution over uniformly drawn player orderings.
Attribution PermutationShapley(CoalitionValue& value, size_t n_permutations,
                               uint64_t seed);

// Mean marginal contribution over all n! orderings (n <= 10).
Attribution EnumeratedPermutationShapley(CoalitionValue& value);

}  // namespace biasaudit

#endif  // BIASAUDIT_ATTRIBUTION_H_
