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

#include "treemix/glmix/grid_search.h"

#include <cstdio>

#include "treemix/core/errors.h"
#include "treemix/eval/metrics.h"

namespace treemix {
namespace {

bool prefer_on_tie(const LambdaTriple& a, const LambdaTriple& b) {
  const double sum_a = a.global + a.contract + a.recruiter;
  const double sum_b = b.global + b.contract + b.recruiter;
  if (sum_a != sum_b) return sum_a > sum_b;
  return a > b;
}

std::string describe(const LambdaTriple& l) {
  char buffer[128];
  std::snprintf(buffer, sizeof(buffer), "(%g, %g, %g)", l.global, l.contract,
                l.recruiter);
  return buffer;
}

}  // namespace

double RankingObjective::evaluate(std::span<const RankedList> rankings) const {
  switch (kind) {
    case Kind::kPositiveResponses:
      return positive_responses_at_k(rankings, k);
    case Kind::kNegLogLoss:
      return -make_report(rankings, {}).log_loss;
    case Kind::kAuc: {
      const auto report = make_report(rankings, {});
      if (!report.auc) throw std::invalid_argument("validation set has one class");
      return *report.auc;
    }
  }
  return 0.0;
}

std::string RankingObjective::name() const {
  switch (kind) {
    case Kind::kPositiveResponses:
      return "positive_responses@" + std::to_string(k);
    case Kind::kNegLogLoss:
      return "neg_log_loss";
    case Kind::kAuc:
      return "auc";
  }
  return "unknown";
}

std::vector<LambdaTriple> make_grid(std::span<const double> values,
                                    const std::set<Component>& enabled,
                                    const LambdaTriple& base) {
  std::vector<LambdaTriple> grid{base};
  for (Component c : kComponentOrder) {
    if (!enabled.count(c)) continue;
    std::vector<LambdaTriple> next;
    for (const auto& point : grid) {
      for (double v : values) {
        LambdaTriple p = point;
        (c == Component::kGlobal     ? p.global
         : c == Component::kContract ? p.contract
                                     : p.recruiter) = v;
        next.push_back(p);
      }
    }
    grid = std::move(next);
  }
  return grid;
}

std::vector<RankedList> rank_with_glmix(const GlmixModel& model,
                                        const Dataset& dataset) {
  std::vector<double> scores(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const auto& record = dataset[i];
    scores[i] = score(model, record.features, record.recruiter_id,
                      record.contract_id).margin;
  }
  return rank_queries(dataset, scores);
}

GridSearchResult grid_search(const Dataset& train, const Dataset& validation,
                             std::span<const LambdaTriple> grid,
                             const GlmixTrainConfig& base,
                             const RankingObjective& objective) {
  if (grid.empty()) throw ConfigError("empty regularization grid");
  GridSearchResult result;
  bool have_best = false;
  for (const LambdaTriple& point : grid) {
    GlmixTrainConfig config = base;
    config.lambdas = point;
    GlmixModel model;
    try {
      model = train_glmix(train, config);
    } catch (const TrainingError& e) {
      throw TrainingError("grid point " + describe(point) + ": " + e.what());
    }
    const double metric = objective.evaluate(rank_with_glmix(model, validation));
    result.table.push_back(GridPoint{point, metric});
    const bool better = !have_best || metric > result.best_metric ||
                        (metric == result.best_metric && prefer_on_tie(point, result.best));
    if (better) {
      have_best = true;
      result.best = point;
      result.best_metric = metric;
      result.best_model = std::move(model);
    }
  }
  return result;
}

}  // namespace treemix
