// Copyright 2026 The treemix Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "treemix/eval/metrics.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "treemix/core/logistic.h"

namespace treemix {

double positive_responses_at_k(std::span<const RankedList> rankings, int k) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  if (rankings.empty()) throw std::invalid_argument("no requests to evaluate");
  double total = 0.0;
  for (const auto& list : rankings) {
    const std::size_t depth = std::min<std::size_t>(k, list.items.size());
    int positives = 0;
    for (std::size_t i = 0; i < depth; ++i) positives += list.items[i].label;
    total += positives;
  }
  return total / static_cast<double>(rankings.size());
}

double auc(std::span<const ScoredLabel> scored) {
  std::vector<ScoredLabel> sorted(scored.begin(), scored.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const ScoredLabel& a, const ScoredLabel& b) { return a.score < b.score; });
  double positives = 0.0;
  double rank_sum = 0.0;  // of positives, with ties given their average rank
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    int tied_positives = 0;
    while (j < sorted.size() && sorted[j].score == sorted[i].score) {
      tied_positives += sorted[j].label;
      ++j;
    }
    const double average_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    rank_sum += tied_positives * average_rank;
    positives += tied_positives;
    i = j;
  }
  const double negatives = static_cast<double>(sorted.size()) - positives;
  if (positives == 0.0 || negatives == 0.0) {
    throw std::invalid_argument("AUC needs both positive and negative labels");
  }
  return (rank_sum - positives * (positives + 1.0) / 2.0) / (positives * negatives);
}

double mean_log_loss(std::span<const ScoredLabel> scored) {
  if (scored.empty()) throw std::invalid_argument("no scores for log-loss");
  double total = 0.0;
  for (const auto& s : scored) total += logistic_loss(s.score, s.label);
  return total / static_cast<double>(scored.size());
}

MetricReport make_report(std::span<const RankedList> rankings,
                         std::span<const int> ks) {
  MetricReport report;
  for (int k : ks) report.positive_responses[k] = positive_responses_at_k(rankings, k);
  std::vector<ScoredLabel> scored;
  bool has_positive = false;
  bool has_negative = false;
  for (const auto& list : rankings) {
    for (const auto& item : list.items) {
      scored.push_back(ScoredLabel{item.score, item.label});
      (item.label == 1 ? has_positive : has_negative) = true;
    }
  }
  report.log_loss = mean_log_loss(scored);
  if (has_positive && has_negative) report.auc = auc(scored);
  report.query_count = static_cast<int>(rankings.size());
  return report;
}

std::map<int, double> lift(const MetricReport& candidate,
                           const MetricReport& baseline) {
  std::map<int, double> out;
  for (const auto& [k, base] : baseline.positive_responses) {
    if (base == 0.0) {
      throw std::invalid_argument("baseline Positive-Responses@" +
                                  std::to_string(k) + " is zero");
    }
    auto it = candidate.positive_responses.find(k);
    if (it == candidate.positive_responses.end()) {
      throw std::invalid_argument("candidate lacks Positive-Responses@" +
                                  std::to_string(k));
    }
    out[k] = 100.0 * (it->second - base) / base;
  }
  return out;
}

std::string format_lift(double percent) {
  // Avoid printing "-0.000%".
  if (std::abs(percent) < 0.0005) percent = 0.0;
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%+.3f%%", percent);
  return buffer;
}

}  // namespace treemix
