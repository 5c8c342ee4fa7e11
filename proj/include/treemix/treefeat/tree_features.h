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

#ifndef TREEMIX_TREEFEAT_TREE_FEATURES_H_
#define TREEMIX_TREEFEAT_TREE_FEATURES_H_

#include <optional>

#include "treemix/core/dataset.h"
#include "treemix/core/feature_vector.h"
#include "treemix/gbdt/gbdt.h"

namespace treemix {

// Feature-name grammar shared with the model store:
//   int:t<k>:l<j>   record reached leaf j (pre-order) of tree k; value 1
//   xgb:score       ensemble score of the first-level model
FeatureKey interaction_key(int tree, int leaf);
std::optional<LeafRef> parse_interaction_key(const FeatureKey& key);
FeatureKey score_key();

enum class ScoreTransform {
  kMargin,       // raw additive margin (default)
  kProbability,  // sigmoid of the margin
};

// Exactly one entry per tree, each equal to 1.
FeatureVector interaction_features(const GbdtModel& model, const FeatureVector& x);

// {xgb:score -> predict_margin(model, x)}, or its sigmoid.
FeatureVector score_feature(const GbdtModel& model, const FeatureVector& x,
                            ScoreTransform transform = ScoreTransform::kMargin);

// x_ltr plus the score feature of score_model plus the interaction features of
// interaction_model. Throws InputError if x_ltr already carries a key in the
// "xgb" or "int" namespace.
FeatureVector assemble_f_all(const FeatureVector& x_ltr,
                             const GbdtModel& score_model,
                             const GbdtModel& interaction_model,
                             ScoreTransform transform = ScoreTransform::kMargin);

// Replaces every record's features with assemble_f_all of them.
Dataset enrich_dataset(const Dataset& dataset, const GbdtModel& score_model,
                       const GbdtModel& interaction_model,
                       ScoreTransform transform = ScoreTransform::kMargin,
                       int workers = 1);

}  // namespace treemix

#endif  // TREEMIX_TREEFEAT_TREE_FEATURES_H_
