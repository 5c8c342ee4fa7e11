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

#ifndef TREEMIX_TWOLEVEL_TWO_LEVEL_H_
#define TREEMIX_TWOLEVEL_TWO_LEVEL_H_

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "treemix/core/dataset.h"
#include "treemix/core/ranked_list.h"
#include "treemix/gbdt/gbdt.h"
#include "treemix/glmix/glmix.h"
#include "treemix/treefeat/tree_features.h"

namespace treemix {

inline constexpr std::size_t kProductionK1 = 1000;
inline constexpr std::size_t kProductionK2 = 125;

// Models are borrowed and must outlive the config.
struct PipelineConfig {
  std::size_t k1 = 50;
  std::size_t k2 = 10;
  const GbdtModel* l1_model = nullptr;
  const GbdtModel* l2_interaction_model = nullptr;
  const GlmixModel* glmix = nullptr;
  ScoreTransform score_transform = ScoreTransform::kMargin;

  // Throws ConfigError unless 1 <= k2 <= k1 and all models are set.
  void validate() const;
};

// Top k1 records of one request by GBDT margin. rows must share a request_id
// (std::invalid_argument otherwise).
RankedList rank_l1(const Dataset& dataset, std::span<const std::size_t> rows,
                   const GbdtModel& model, std::size_t k1);

// Scores each first-level item with GLMix over its assembled f_all and keeps
// the top k2. Items keep their l1_score.
RankedList rerank_l2(const Dataset& dataset, const RankedList& l1,
                     const PipelineConfig& config);

// rank_l1 then rerank_l2 for every request of the dataset (raw features).
std::vector<RankedList> rank_two_level(const Dataset& dataset,
                                       const PipelineConfig& config,
                                       int workers = 1);

// One JSON object per request:
//   {"request_id": .., "ranked": [{"candidate_id", "l1_score", "l2_score"}]}
void write_rankings(std::ostream& out, std::span<const RankedList> rankings);

}  // namespace treemix

#endif  // TREEMIX_TWOLEVEL_TWO_LEVEL_H_
