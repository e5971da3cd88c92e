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

#ifndef BIASAUDIT_METRICS_H_
#define BIASAUDIT_METRICS_H_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "biasaudit/classifiers.h"
#include "biasaudit/corpus.h"
#include "biasaudit/counterfactual.h"
#include "biasaudit/inference_client.h"

namespace biasaudit {

struct DescriptorMean {
  Axis axis = Axis::kGender;
  std::string descriptor;
  std::string classifier;
  Channel channel = Channel::kNegative;
  double mean = 0.0;
  size_t n = 0;
};

struct DisparityReport {
  Axis axis = Axis::kGender;
  std::string classifier;
  Channel channel = Channel::kNegative;
  // max(means) - min(means).
  double max_min = 0.0;
  // min(means) / max(means); empty when max(means) == 0.
  std::optional<double> min_max;
  // Mean over every underlying score row of the axis, not the mean of means.
  double overall_mean = 0.0;
  size_t row_count = 0;
  std::vector<DescriptorMean> means;
};

// Arithmetic mean of row values per (classifier, channel, axis, descriptor).
// Groups come out ordered by classifier first appearance, then channel, axis
// and catalog position; descriptors missing from `catalog` follow in first
// appearance order.
std::vector<DescriptorMean> DescriptorMeans(
    std::span<const ScoreRow> rows,
    const DescriptorCatalog& catalog = DescriptorCatalog::Default());

// Disparity over the descriptor means of one axis x classifier. Throws
// InsufficientDataError with fewer than two means and ContractError when the
// means mix axes or classifiers.
DisparityReport Disparity(std::span<const DescriptorMean> means);

// Disparity() for every (classifier, channel, axis) group present in `means`,
// in the same order. Groups with a single descriptor are skipped.
std::vector<DisparityReport> Disparities(std::span<const DescriptorMean> means);

// Round half away from zero to `decimals` places, applied at emission only.
double RoundHalfUp(double value, int decimals = 3);

}  // namespace biasaudit

#endif  // BIASAUDIT_METRICS_H_
