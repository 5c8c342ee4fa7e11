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

#include "treemix/core/ranked_list.h"

#include <algorithm>
#include <stdexcept>

namespace treemix {

RankedList rank_top_k(std::string request_id, std::vector<RankedItem> items,
                      std::size_t k) {
  std::sort(items.begin(), items.end(),
            [](const RankedItem& a, const RankedItem& b) {
              if (a.score != b.score) return a.score > b.score;
              return a.candidate_id < b.candidate_id;
            });
  std::vector<const std::string*> ids;
  ids.reserve(items.size());
  for (const auto& item : items) ids.push_back(&item.candidate_id);
  std::sort(ids.begin(), ids.end(),
            [](const std::string* a, const std::string* b) { return *a < *b; });
  for (std::size_t i = 1; i < ids.size(); ++i) {
    if (*ids[i] == *ids[i - 1]) {
      throw std::invalid_argument("duplicate candidate " + *ids[i] +
                                  " in request " + request_id);
    }
  }
  if (items.size() > k) items.resize(k);
  return RankedList{std::move(request_id), std::move(items)};
}

std::vector<RankedList> rank_queries(const Dataset& dataset,
                                     std::span<const double> scores) {
  if (scores.size() != dataset.size()) {
    throw std::invalid_argument("one score per record required");
  }
  std::vector<RankedList> out;
  for (auto& group : group_by_request(dataset)) {
    std::vector<RankedItem> items;
    items.reserve(group.rows.size());
    for (std::size_t row : group.rows) {
      const auto& record = dataset[row];
      items.push_back(RankedItem{record.candidate_id, row, scores[row], scores[row],
                                 record.label});
    }
    const std::size_t count = items.size();
    out.push_back(rank_top_k(group.request_id, std::move(items), count));
  }
  return out;
}

}  // namespace treemix
