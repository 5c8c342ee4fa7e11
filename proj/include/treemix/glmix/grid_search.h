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

#ifndef TREEMIX_GLMIX_GRID_SEARCH_H_
#define TREEMIX_GLMIX_GRID_SEARCH_H_

#include <set>
#include <span>
#include <string>
#include <vector>

#include "treemix/core/dataset.h"
#include "treemix/core/ranked_list.h"
#include "treemix/glmix/glmix.h"

namespace treemix {

// Validation metric maximized by grid_search. Log-loss is negated so that
// larger is always better.
struct RankingObjective {
  enum class Kind { kPositiveResponses, kNegLogLoss, kAuc };
  Kind kind = Kind::kPositiveResponses;
  int k = 25;

  double evaluate(std::span<const RankedList> rankings) const;
  std::string name() const;
};

struct GridPoint {
  LambdaTriple lambdas;
  double metric = 0.0;
};

struct GridSearchResult {
  LambdaTriple best;
  double best_metric = 0.0;
  GlmixModel best_model;
  std::vector<GridPoint> table;  // in grid order
};

// Cartesian product of values over the enabled components; disabled
// components keep the value from base.
std::vector<LambdaTriple> make_grid(std::span<const double> values,
                                    const std::set<Component>& enabled,
                                    const LambdaTriple& base = {});

// Trains one model per grid point on train (base config with the point's
// lambdas) and keeps the one whose validation rankings maximize objective.
// Ties go to the larger lambda sum, then the lexicographically larger triple.
GridSearchResult grid_search(const Dataset& train, const Dataset& validation,
                             std::span<const LambdaTriple> grid,
                             const GlmixTrainConfig& base,
                             const RankingObjective& objective = {});

// Fully ranks each validation request by GLMix margin.
std::vector<RankedList> rank_with_glmix(const GlmixModel& model,
                                        const Dataset& dataset);

}  // namespace treemix

#endif  // TREEMIX_GLMIX_GRID_SEARCH_H_
