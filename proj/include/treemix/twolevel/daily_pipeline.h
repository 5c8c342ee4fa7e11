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

#ifndef TREEMIX_TWOLEVEL_DAILY_PIPELINE_H_
#define TREEMIX_TWOLEVEL_DAILY_PIPELINE_H_

#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "treemix/core/dataset.h"
#include "treemix/eval/metrics.h"
#include "treemix/gbdt/gbdt.h"
#include "treemix/glmix/glmix.h"

namespace treemix {

struct DailyPipelineConfig {
  int train_window = 45;  // days of training data before each test day
  const GbdtModel* l1_model = nullptr;
  const GbdtModel* l2_interaction_model = nullptr;
  GlmixTrainConfig glmix;
  std::size_t k1 = 50;
  std::size_t k2 = 10;
  std::vector<int> ks{1, 5, 25};
  // When set, each day's model is written to <store_root>/day-<t>.
  std::optional<std::filesystem::path> store_root;
  int workers = 1;
};

struct DayResult {
  int day = 0;
  GlmixModel model;
  MetricReport metrics;
};

// For each day t >= train_window: trains GLMix on days [t - train_window, t)
// enriched with the pretrained tree features, then ranks day t with the
// two-level pipeline and reports its metrics. Throws ConfigError when fewer
// than train_window + 1 partitions are given.
std::vector<DayResult> run_daily_pipeline(std::span<const Dataset> days,
                                          const DailyPipelineConfig& config);

}  // namespace treemix

#endif  // TREEMIX_TWOLEVEL_DAILY_PIPELINE_H_
