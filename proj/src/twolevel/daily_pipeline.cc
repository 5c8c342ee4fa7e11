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

#include "treemix/twolevel/daily_pipeline.h"

#include <string>

#include "treemix/core/errors.h"
#include "treemix/glmix/model_store.h"
#include "treemix/treefeat/tree_features.h"
#include "treemix/twolevel/two_level.h"

namespace treemix {

std::vector<DayResult> run_daily_pipeline(std::span<const Dataset> days,
                                          const DailyPipelineConfig& config) {
  if (config.train_window < 1) throw ConfigError("train_window must be >= 1");
  const std::size_t required = static_cast<std::size_t>(config.train_window) + 1;
  if (days.size() < required) {
    throw ConfigError("daily pipeline needs at least " + std::to_string(required) +
                      " day partitions, got " + std::to_string(days.size()));
  }
  if (config.l1_model == nullptr || config.l2_interaction_model == nullptr) {
    throw ConfigError("daily pipeline needs pretrained L1 and L2 models");
  }

  std::vector<DayResult> results;
  for (std::size_t t = config.train_window; t < days.size(); ++t) {
    const Dataset window =
        Dataset::concat(days.subspan(t - config.train_window, config.train_window));
    const Dataset enriched = enrich_dataset(window, *config.l1_model,
                                            *config.l2_interaction_model,
                                            ScoreTransform::kMargin, config.workers);
    DayResult result;
    result.day = static_cast<int>(t);
    result.model = train_glmix(enriched, config.glmix);

    PipelineConfig pipeline;
    pipeline.k1 = config.k1;
    pipeline.k2 = config.k2;
    pipeline.l1_model = config.l1_model;
    pipeline.l2_interaction_model = config.l2_interaction_model;
    pipeline.glmix = &result.model;
    const auto rankings = rank_two_level(days[t], pipeline, config.workers);
    result.metrics = make_report(rankings, config.ks);

    if (config.store_root) {
      StoreManifest manifest;
      manifest.lambdas = config.glmix.lambdas;
      manifest.window = TrainingWindow{static_cast<int>(t) - config.train_window,
                                       static_cast<int>(t) - 1, window.size()};
      save_model_store(*config.store_root / ("day-" + std::to_string(t)), result.model,
                       manifest);
    }
    results.push_back(std::move(result));
  }
  return results;
}

}  // namespace treemix
