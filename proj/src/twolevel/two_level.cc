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

#include "treemix/twolevel/two_level.h"

#include <ostream>
#include <stdexcept>

#include <json.hpp>

#include "treemix/core/errors.h"
#include "treemix/core/parallel.h"

namespace treemix {

void PipelineConfig::validate() const {
  if (k1 < 1 || k2 < 1) throw ConfigError("k1 and k2 must be >= 1");
  if (k2 > k1) {
    throw ConfigError("k2 (" + std::to_string(k2) + ") must not exceed k1 (" +
                      std::to_string(k1) + ")");
  }
  if (l1_model == nullptr || l2_interaction_model == nullptr || glmix == nullptr) {
    throw ConfigError("pipeline needs an L1 model, an L2 model and a GLMix model");
  }
}

RankedList rank_l1(const Dataset& dataset, std::span<const std::size_t> rows,
                   const GbdtModel& model, std::size_t k1) {
  if (rows.empty()) throw std::invalid_argument("request has no candidates");
  const std::string& request_id = dataset[rows.front()].request_id;
  std::vector<RankedItem> items;
  items.reserve(rows.size());
  for (std::size_t row : rows) {
    const auto& record = dataset[row];
    if (record.request_id != request_id) {
      throw std::invalid_argument("rank_l1 given records of requests " + request_id +
                                  " and " + record.request_id);
    }
    const double margin = model.predict_margin(record.features);
    items.push_back(RankedItem{record.candidate_id, row, margin, margin, record.label});
  }
  return rank_top_k(request_id, std::move(items), k1);
}

RankedList rerank_l2(const Dataset& dataset, const RankedList& l1,
                     const PipelineConfig& config) {
  config.validate();
  std::vector<RankedItem> items = l1.items;
  for (auto& item : items) {
    const auto& record = dataset[item.row];
    const FeatureVector f_all =
        assemble_f_all(record.features, *config.l1_model,
                       *config.l2_interaction_model, config.score_transform);
    item.score = score(*config.glmix, f_all, record.recruiter_id,
                       record.contract_id).margin;
  }
  return rank_top_k(l1.request_id, std::move(items), config.k2);
}

std::vector<RankedList> rank_two_level(const Dataset& dataset,
                                       const PipelineConfig& config, int workers) {
  config.validate();
  const auto groups = group_by_request(dataset);
  std::vector<RankedList> out(groups.size());
  parallel_for(groups.size(), workers, [&](std::size_t q) {
    const RankedList l1 = rank_l1(dataset, groups[q].rows, *config.l1_model, config.k1);
    out[q] = rerank_l2(dataset, l1, config);
  });
  return out;
}

void write_rankings(std::ostream& out, std::span<const RankedList> rankings) {
  for (const auto& list : rankings) {
    nlohmann::json ranked = nlohmann::json::array();
    for (const auto& item : list.items) {
      ranked.push_back({{"candidate_id", item.candidate_id},
                        {"l1_score", item.l1_score},
                        {"l2_score", item.score}});
    }
    out << nlohmann::json{{"request_id", list.request_id}, {"ranked", std::move(ranked)}}
               .dump()
        << '\n';
  }
}

}  // namespace treemix
