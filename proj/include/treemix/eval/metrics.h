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

#ifndef TREEMIX_EVAL_METRICS_H_
#define TREEMIX_EVAL_METRICS_H_

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "treemix/core/ranked_list.h"

namespace treemix {

// Mean over requests of the number of label-1 items among the first
// min(k, list length) positions. Throws std::invalid_argument on k < 1 or an
// empty request set.
double positive_responses_at_k(std::span<const RankedList> rankings, int k);

struct ScoredLabel {
  double score = 0.0;
  int label = 0;
};

// Probability that a random positive outscores a random negative, ties
// counting one half, via average ranks. Throws std::invalid_argument if
// either class is absent.
double auc(std::span<const ScoredLabel> scored);

// Mean logistic loss treating score as a margin.
double mean_log_loss(std::span<const ScoredLabel> scored);

struct MetricReport {
  std::map<int, double> positive_responses;  // k -> Positive-Responses@k
  double log_loss = 0.0;
  std::optional<double> auc;  // absent when only one class is present
  int query_count = 0;
};

// Metrics over ranked lists whose item scores are margins.
MetricReport make_report(std::span<const RankedList> rankings,
                         std::span<const int> ks);

// 100 * (candidate - baseline) / baseline for each k in the baseline.
// Throws std::invalid_argument naming k when the baseline is zero there or
// the candidate lacks k.
std::map<int, double> lift(const MetricReport& candidate,
                           const MetricReport& baseline);

// Signed, three decimals, percent sign: "+8.506%".
std::string format_lift(double percent);

}  // namespace treemix

#endif  // TREEMIX_EVAL_METRICS_H_
