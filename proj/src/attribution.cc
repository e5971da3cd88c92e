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

#include "biasaudit/attribution.h"

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include "biasaudit/errors.h"
#include "biasaudit/text_util.h"

namespace biasaudit {

namespace {

// Unbiased integer in [0, bound) from a 64-bit engine, identical on every
// standard library.
uint64_t UniformBelow(std::mt19937_64& rng, uint64_t bound) {
  const uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const uint64_t r = rng();
    if (r >= threshold) return r % bound;
  }
}

double UniformUnit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double Binomial(size_t n, size_t k) {
  k = std::min(k, n - k);
  double result = 1.0;
  for (size_t i = 1; i <= k; ++i) {
    result = result * static_cast<double>(n - k + i) / static_cast<double>(i);
  }
  return result;
}

Attribution NewAttribution(CoalitionValue& value, AttributionMethod method) {
  Attribution out;
  out.units = value.labels();
  out.method = method;
  out.phi.assign(value.players(), 0.0);
  return out;
}

// Values of every coalition 0 .. 2^n - 1, indexed by coalition.
std::vector<double> DenseValues(CoalitionValue& value, std::span<const Coalition> all) {
  std::vector<double> dense(all.size());
  for (Coalition s : all) dense[s] = value(s);
  return dense;
}

std::string NormalizeToken(std::string_view token) {
  return Utf8Lower(StripPunctuation(token));
}

}  // namespace

CoalitionValue::CoalitionValue(size_t players, BatchFn fn,
                               std::vector<std::string> labels)
    : players_(players), fn_(std::move(fn)), labels_(std::move(labels)) {
  if (players_ > kMaxPlayers) {
    throw ContractError("at most " + std::to_string(kMaxPlayers) +
                        " players are supported, got " + std::to_string(players_));
  }
  if (labels_.empty()) {
    for (size_t i = 0; i < players_; ++i) labels_.push_back(std::to_string(i));
  }
  if (labels_.size() != players_) {
    throw ContractError("label count does not match player count");
  }
}

CoalitionValue CoalitionValue::FromFunction(size_t players,
                                            std::function<double(Coalition)> fn) {
  return CoalitionValue(players, [fn = std::move(fn)](std::span<const Coalition> cs) {
    std::vector<double> out;
    out.reserve(cs.size());
    for (Coalition c : cs) out.push_back(fn(c));
    return out;
  });
}

double CoalitionValue::operator()(Coalition coalition) {
  if (const auto it = cache_.find(coalition); it != cache_.end()) return it->second;
  const Coalition single[] = {coalition};
  Prefetch(single);
  return cache_.at(coalition);
}

void CoalitionValue::Prefetch(std::span<const Coalition> coalitions) {
  std::vector<Coalition> missing;
  for (Coalition c : coalitions) {
    if ((c & ~full()) != 0) throw ContractError("coalition has unknown players");
    if (!cache_.contains(c)) missing.push_back(c);
  }
  std::sort(missing.begin(), missing.end());
  missing.erase(std::unique(missing.begin(), missing.end()), missing.end());
  if (missing.empty()) return;
  const std::vector<double> values = fn_(missing);
  if (values.size() != missing.size()) {
    throw ContractError("value function returned the wrong number of values");
  }
  for (size_t i = 0; i < missing.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw NumericalError("value function returned a non-finite value", 0.0);
    }
    cache_.emplace(missing[i], values[i]);
  }
}

std::vector<std::string> TokenSplit::UnitTexts() const {
  std::vector<std::string> out;
  out.reserve(units.size());
  for (const auto& [begin, end] : units) {
    std::vector<std::string> pieces(tokens.begin() + static_cast<ptrdiff_t>(begin),
                                    tokens.begin() + static_cast<ptrdiff_t>(end));
    out.push_back(Join(pieces, " "));
  }
  return out;
}

TokenSplit SplitUnits(std::string_view text, std::span<const std::string> descriptors,
                      bool group_descriptor) {
  TokenSplit split;
  split.tokens = SplitWhitespace(text);
  std::vector<std::string> normalized;
  for (const std::string& t : split.tokens) normalized.push_back(NormalizeToken(t));

  // Earliest match wins; among matches at the same position the longest.
  std::optional<std::pair<size_t, size_t>> match;
  for (const std::string& descriptor : descriptors) {
    std::vector<std::string> phrase;
    for (const std::string& t : SplitWhitespace(descriptor)) {
      phrase.push_back(NormalizeToken(t));
    }
    if (phrase.empty() || phrase.size() > normalized.size()) continue;
    for (size_t start = 0; start + phrase.size() <= normalized.size(); ++start) {
      if (!std::equal(phrase.begin(), phrase.end(),
                      normalized.begin() + static_cast<ptrdiff_t>(start))) {
        continue;
      }
      const std::pair<size_t, size_t> found{start, start + phrase.size()};
      if (!match || found.first < match->first ||
          (found.first == match->first && found.second > match->second)) {
        match = found;
      }
      break;
    }
  }

  for (size_t i = 0; i < split.tokens.size();) {
    if (match && i == match->first) {
      split.descriptor_unit = split.units.size();
      if (group_descriptor) {
        split.units.push_back(*match);
        i = match->second;
        continue;
      }
    }
    split.units.emplace_back(i, i + 1);
    ++i;
  }
  return split;
}

std::string CoalitionText(std::span<const std::string> units, Coalition coalition) {
  std::string out;
  for (size_t i = 0; i < units.size(); ++i) {
    if ((coalition >> i & 1) == 0) continue;
    if (!out.empty()) out.push_back(' ');
    out.append(units[i]);
  }
  return out;
}

CoalitionValue MakeTextValueFunction(std::vector<std::string> units,
                                     Classifier& classifier) {
  const size_t n = units.size();
  std::vector<std::string> labels = units;
  return CoalitionValue(
      n,
      [units = std::move(units), &classifier](std::span<const Coalition> coalitions) {
        std::vector<std::string> texts;
        texts.reserve(coalitions.size());
        for (Coalition c : coalitions) texts.push_back(CoalitionText(units, c));
        return classifier.Score(texts);
      },
      std::move(labels));
}

std::string_view AttributionMethodName(AttributionMethod method) {
  switch (method) {
    case AttributionMethod::kExact:
      return "exact";
    case AttributionMethod::kKernel:
      return "kernel";
    case AttributionMethod::kPermutation:
      return "permutation";
  }
  return "unknown";
}

std::optional<AttributionMethod> ParseAttributionMethod(std::string_view name) {
  const std::string lowered = AsciiLower(Trim(name));
  for (AttributionMethod m : {AttributionMethod::kExact, AttributionMethod::kKernel,
                              AttributionMethod::kPermutation}) {
    if (lowered == AttributionMethodName(m)) return m;
  }
  return std::nullopt;
}

double Attribution::PhiSum() const {
  return std::accumulate(phi.begin(), phi.end(), 0.0);
}

nlohmann::ordered_json Attribution::ToJson() const {
  nlohmann::ordered_json out;
  out["units"] = units;
  out["phi"] = phi;
  out["base_value"] = base_value;
  out["full_value"] = full_value;
  out["method"] = AttributionMethodName(method);
  out["samples"] = samples;
  if (seed) {
    out["seed"] = *seed;
  } else {
    out["seed"] = nullptr;
  }
  return out;
}

double ShapleyKernelWeight(size_t n, size_t s) {
  if (s == 0 || s >= n) {
    throw ContractError("kernel weight is defined for 0 < |S| < n only");
  }
  return static_cast<double>(n - 1) /
         (Binomial(n, s) * static_cast<double>(s) * static_cast<double>(n - s));
}

Attribution ExactShapley(CoalitionValue& value, size_t exact_limit) {
  const size_t n = value.players();
  if (n > exact_limit) {
    throw ContractError(std::to_string(n) + " units exceed the exact limit of " +
                        std::to_string(exact_limit) +
                        "; use the kernel or permutation method");
  }
  Attribution out = NewAttribution(value, AttributionMethod::kExact);
  const Coalition full = value.full();
  std::vector<Coalition> all(size_t{1} << n);
  std::iota(all.begin(), all.end(), Coalition{0});
  value.Prefetch(all);

  // |S|! (n - |S| - 1)! / n! == 1 / (n * C(n - 1, |S|)).
  std::vector<double> weight(n == 0 ? 0 : n);
  for (size_t s = 0; s < weight.size(); ++s) {
    weight[s] = 1.0 / (static_cast<double>(n) * Binomial(n - 1, s));
  }
  const std::vector<double> v = DenseValues(value, all);
  for (Coalition s = 0; s <= full; ++s) {
    const size_t size = static_cast<size_t>(std::popcount(s));
    for (size_t i = 0; i < n; ++i) {
      const Coalition bit = Coalition{1} << i;
      if (s & bit) continue;
      out.phi[i] += weight[size] * (v[s | bit] - v[s]);
    }
  }
  out.base_value = value(0);
  out.full_value = value(full);
  out.samples = all.size();
  return out;
}

Attribution KernelShap(CoalitionValue& value, const KernelShapOptions& options) {
  const size_t n = value.players();
  if (n < 2) throw ContractError("kernel SHAP needs at least two units");
  const Coalition full = value.full();
  const double proper = std::ldexp(1.0, static_cast<int>(n)) - 2.0;
  const bool enumerate =
      options.enumerate_all || static_cast<double>(options.n_samples) >= proper;
  if (!enumerate && options.n_samples < n) {
    throw ContractError("kernel SHAP needs n_samples >= n (" + std::to_string(n) + ")");
  }

  Attribution out = NewAttribution(value, AttributionMethod::kKernel);
  out.seed = options.seed;

  // Regression rows: coalition -> accumulated weight.
  std::map<Coalition, double> rows;
  if (enumerate) {
    for (Coalition s = 1; s < full; ++s) {
      rows[s] = ShapleyKernelWeight(n, static_cast<size_t>(std::popcount(s)));
    }
    out.samples = rows.size();
  } else {
    std::vector<double> size_cdf(n - 1);
    double total = 0.0;
    for (size_t s = 1; s < n; ++s) {
      total += static_cast<double>(n - 1) / static_cast<double>(s * (n - s));
      size_cdf[s - 1] = total;
    }
    std::mt19937_64 rng(options.seed);
    std::vector<size_t> order(n);
    size_t drawn = 0;
    while (drawn < options.n_samples) {
      const double u = UniformUnit(rng) * total;
      const size_t size =
          static_cast<size_t>(std::upper_bound(size_cdf.begin(), size_cdf.end(), u) -
                              size_cdf.begin()) +
          1;
      std::iota(order.begin(), order.end(), size_t{0});
      Coalition s = 0;
      for (size_t k = 0; k < std::min(size, n - 1); ++k) {
        const size_t j = k + UniformBelow(rng, n - k);
        std::swap(order[k], order[j]);
        s |= Coalition{1} << order[k];
      }
      rows[s] += 1.0;
      rows[full & ~s] += 1.0;
      drawn += 2;
    }
    out.samples = drawn;
  }

  std::vector<Coalition> needed = {0, full};
  for (const auto& [s, w] : rows) needed.push_back(s);
  value.Prefetch(needed);
  out.base_value = value(0);
  out.full_value = value(full);
  const double delta = out.full_value - out.base_value;

  // Eliminate the last unit through the efficiency constraint:
  // phi_last = delta - sum(phi_j), regress on z_j - z_last.
  const Eigen::Index m = static_cast<Eigen::Index>(n - 1);
  Eigen::MatrixXd normal = Eigen::MatrixXd::Zero(m, m);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd x(m);
  const size_t last = n - 1;
  for (const auto& [s, w] : rows) {
    const double z_last = static_cast<double>(s >> last & 1);
    for (Eigen::Index j = 0; j < m; ++j) {
      x[j] = static_cast<double>(s >> j & 1) - z_last;
    }
    const double y = value(s) - out.base_value - z_last * delta;
    normal.noalias() += w * x * x.transpose();
    rhs.noalias() += w * y * x;
  }
  normal.diagonal().array() += options.ridge;

  const Eigen::LDLT<Eigen::MatrixXd> ldlt(normal);
  const double rcond = ldlt.info() == Eigen::Success ? ldlt.rcond() : 0.0;
  if (ldlt.info() != Eigen::Success || !(rcond > 1e-9)) {
    throw NumericalError(
        "kernel SHAP normal equations are singular after damping (condition "
        "estimate " + std::to_string(rcond > 0 ? 1.0 / rcond : INFINITY) +
            "); draw more samples",
        rcond > 0 ? 1.0 / rcond : INFINITY);
  }
  const Eigen::VectorXd beta = ldlt.solve(rhs);
  double partial = 0.0;
  for (Eigen::Index j = 0; j < m; ++j) {
    out.phi[static_cast<size_t>(j)] = beta[j];
    partial += beta[j];
  }
  out.phi[last] = delta - partial;
  return out;
}

Attribution PermutationShapley(CoalitionValue& value, size_t n_permutations,
                               uint64_t seed) {
  if (n_permutations == 0) throw ContractError("n_permutations must be >= 1");
  const size_t n = value.players();
  Attribution out = NewAttribution(value, AttributionMethod::kPermutation);
  out.seed = seed;
  out.samples = n_permutations;

  std::mt19937_64 rng(seed);
  std::vector<std::vector<size_t>> orders(n_permutations, std::vector<size_t>(n));
  std::vector<Coalition> needed = {0};
  for (std::vector<size_t>& order : orders) {
    std::iota(order.begin(), order.end(), size_t{0});
    for (size_t k = n; k > 1; --k) {
      std::swap(order[k - 1], order[UniformBelow(rng, k)]);
    }
    Coalition s = 0;
    for (size_t player : order) {
      s |= Coalition{1} << player;
      needed.push_back(s);
    }
  }
  value.Prefetch(needed);

  for (const std::vector<size_t>& order : orders) {
    Coalition s = 0;
    double previous = value(0);
    for (size_t player : order) {
      s |= Coalition{1} << player;
      const double current = value(s);
      out.phi[player] += current - previous;
      previous = current;
    }
  }
  for (double& p : out.phi) p /= static_cast<double>(n_permutations);
  out.base_value = value(0);
  out.full_value = value(value.full());
  return out;
}

Attribution EnumeratedPermutationShapley(CoalitionValue& value) {
  const size_t n = value.players();
  if (n > 10) throw ContractError("enumerating all orderings is limited to n <= 10");
  Attribution out = NewAttribution(value, AttributionMethod::kPermutation);
  std::vector<Coalition> all(size_t{1} << n);
  std::iota(all.begin(), all.end(), Coalition{0});
  value.Prefetch(all);

  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  size_t count = 0;
  const std::vector<double> v = DenseValues(value, all);
  do {
    Coalition s = 0;
    double previous = v[0];
    for (size_t player : order) {
      s |= Coalition{1} << player;
      const double current = v[s];
      out.phi[player] += current - previous;
      previous = current;
    }
    ++count;
  } while (std::next_permutation(order.begin(), order.end()));
  for (double& p : out.phi) p /= static_cast<double>(count);
  out.samples = count;
  out.base_value = value(0);
  out.full_value = value(value.full());
  return out;
}

}  // namespace biasaudit
