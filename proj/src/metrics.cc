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

#include "biasaudit/metrics.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <tuple>

#include "biasaudit/errors.h"

namespace biasaudit {

namespace {

struct GroupKey {
  size_t classifier_rank;
  Channel channel;
  Axis axis;
  size_t descriptor_rank;

  auto operator<=>(const GroupKey&) const = default;
};

}  // namespace

std::vector<DescriptorMean> DescriptorMeans(std::span<const ScoreRow> rows,
                                            const DescriptorCatalog& catalog) {
  std::vector<std::string> classifiers;
  // Off-catalog descriptors per axis, ranked after the catalog entries.
  std::map<std::pair<Axis, std::string>, size_t> extra_rank;
  std::array<size_t, 4> extra_count{};

  struct Accumulator {
    const ScoreRow* first = nullptr;
    double sum = 0.0;
    size_t n = 0;
  };
  std::map<GroupKey, Accumulator> groups;

  for (const ScoreRow& row : rows) {
    auto cit = std::find(classifiers.begin(), classifiers.end(), row.classifier);
    const size_t classifier_rank = static_cast<size_t>(cit - classifiers.begin());
    if (cit == classifiers.end()) classifiers.push_back(row.classifier);

    size_t descriptor_rank = catalog.IndexOf(row.axis, row.descriptor);
    const size_t catalog_size = catalog.For(row.axis).size();
    if (descriptor_rank == catalog_size) {
      auto [it, inserted] = extra_rank.try_emplace(
          {row.axis, row.descriptor}, extra_count[static_cast<size_t>(row.axis)]);
      if (inserted) ++extra_count[static_cast<size_t>(row.axis)];
      descriptor_rank = catalog_size + it->second;
    }

    Accumulator& acc =
        groups[{classifier_rank, row.channel, row.axis, descriptor_rank}];
    if (acc.first == nullptr) acc.first = &row;
    acc.sum += row.value;
    ++acc.n;
  }

  std::vector<DescriptorMean> out;
  out.reserve(groups.size());
  for (const auto& [key, acc] : groups) {
    const ScoreRow& row = *acc.first;
    out.push_back({row.axis, row.descriptor, row.classifier, row.channel,
                   acc.sum / static_cast<double>(acc.n), acc.n});
  }
  return out;
}

DisparityReport Disparity(std::span<const DescriptorMean> means) {
  if (means.size() < 2) {
    throw InsufficientDataError("disparity needs at least two descriptor means, got " +
                                std::to_string(means.size()));
  }
  DisparityReport report;
  report.axis = means.front().axis;
  report.classifier = means.front().classifier;
  report.channel = means.front().channel;

  double lo = means.front().mean;
  double hi = means.front().mean;
  double weighted_sum = 0.0;
  for (const DescriptorMean& m : means) {
    if (m.axis != report.axis || m.classifier != report.classifier ||
        m.channel != report.channel) {
      throw ContractError("disparity input mixes axes, classifiers or channels");
    }
    if (m.n == 0) throw ContractError("descriptor mean with zero samples");
    lo = std::min(lo, m.mean);
    hi = std::max(hi, m.mean);
    weighted_sum += m.mean * static_cast<double>(m.n);
    report.row_count += m.n;
  }
  report.max_min = hi - lo;
  if (hi > 0.0) report.min_max = lo / hi;
  report.overall_mean = weighted_sum / static_cast<double>(report.row_count);
  report.means.assign(means.begin(), means.end());
  return report;
}

std::vector<DisparityReport> Disparities(std::span<const DescriptorMean> means) {
  std::vector<DisparityReport> out;
  size_t begin = 0;
  while (begin < means.size()) {
    size_t end = begin + 1;
    while (end < means.size() && means[end].axis == means[begin].axis &&
           means[end].classifier == means[begin].classifier &&
           means[end].channel == means[begin].channel) {
      ++end;
    }
    if (end - begin >= 2) out.push_back(Disparity(means.subspan(begin, end - begin)));
    begin = end;
  }
  return out;
}

double RoundHalfUp(double value, int decimals) {
  const double scale = std::pow(10.0, decimals);
  // Decimal ties such as 0.0305 are stored slightly below the midpoint; the
  // 1e-9 relative nudge puts them back on the tie.
  const double scaled = std::abs(value * scale);
  const double rounded = std::floor(scaled + 1e-9 * std::max(1.0, scaled) + 0.5);
  if (rounded == 0.0) return 0.0;
  return std::copysign(rounded, value) / scale;
}

}  // namespace biasaudit
