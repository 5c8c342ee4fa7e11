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

#ifndef TREEMIX_CORE_RANKED_LIST_H_
#define TREEMIX_CORE_RANKED_LIST_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "treemix/core/dataset.h"

namespace treemix {

struct RankedItem {
  std::string candidate_id;
  std::size_t row = 0;    // index into the dataset the list was built from
  double score = 0.0;     // score the list is ordered by
  double l1_score = 0.0;  // first-level score, kept for reporting
  int label = 0;
};

// Candidates of one request, scores non-increasing, candidate ids unique.
struct RankedList {
  std::string request_id;
  std::vector<RankedItem> items;
};

// Sorts by score descending, ties by candidate_id ascending, and keeps the
// first k. Throws std::invalid_argument on duplicate candidate ids.
RankedList rank_top_k(std::string request_id, std::vector<RankedItem> items,
                      std::size_t k);

// Fully ranks every request of the dataset by the per-row scores, requests
// in order of first appearance.
std::vector<RankedList> rank_queries(const Dataset& dataset,
                                     std::span<const double> scores);

}  // namespace treemix

#endif  // TREEMIX_CORE_RANKED_LIST_H_
