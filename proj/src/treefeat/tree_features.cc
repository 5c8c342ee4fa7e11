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

#include "treemix/treefeat/tree_features.h"

#include <charconv>
#include <string>

#include "treemix/core/errors.h"
#include "treemix/core/logistic.h"
#include "treemix/core/parallel.h"

namespace treemix {
namespace {

bool parse_int(std::string_view text, int& out) {
  if (text.empty()) return false;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size() && out >= 0;
}

}  // namespace

FeatureKey interaction_key(int tree, int leaf) {
  return FeatureKey{std::string(kInteractionNamespace),
                    "t" + std::to_string(tree) + ":l" + std::to_string(leaf)};
}

std::optional<LeafRef> parse_interaction_key(const FeatureKey& key) {
  if (key.ns != kInteractionNamespace) return std::nullopt;
  const std::string_view name = key.name;
  const auto colon = name.find(':');
  if (colon == std::string_view::npos || name.size() < 2 || name[0] != 't' ||
      colon + 1 >= name.size() || name[colon + 1] != 'l') {
    return std::nullopt;
  }
  LeafRef ref;
  if (!parse_int(name.substr(1, colon - 1), ref.tree) ||
      !parse_int(name.substr(colon + 2), ref.leaf)) {
    return std::nullopt;
  }
  return ref;
}

FeatureKey score_key() { return FeatureKey{std::string(kScoreNamespace), "score"}; }

FeatureVector interaction_features(const GbdtModel& model, const FeatureVector& x) {
  std::vector<FeatureVector::Entry> entries;
  for (const LeafRef& ref : model.leaf_indices(x)) {
    entries.emplace_back(interaction_key(ref.tree, ref.leaf), 1.0);
  }
  return FeatureVector::from_entries(std::move(entries));
}

FeatureVector score_feature(const GbdtModel& model, const FeatureVector& x,
                            ScoreTransform transform) {
  double value = model.predict_margin(x);
  if (transform == ScoreTransform::kProbability) value = sigmoid(value);
  FeatureVector out;
  out.insert(score_key(), value);
  return out;
}

FeatureVector assemble_f_all(const FeatureVector& x_ltr,
                             const GbdtModel& score_model,
                             const GbdtModel& interaction_model,
                             ScoreTransform transform) {
  std::vector<FeatureVector::Entry> entries;
  entries.reserve(x_ltr.size() + 1 + interaction_model.num_trees());
  for (const auto& entry : x_ltr) {
    if (entry.first.ns == kScoreNamespace || entry.first.ns == kInteractionNamespace) {
      throw InputError("raw feature " + entry.first.str() +
                       " collides with a derived tree-feature namespace");
    }
    entries.push_back(entry);
  }
  for (const auto& entry : score_feature(score_model, x_ltr, transform)) {
    entries.push_back(entry);
  }
  for (const auto& entry : interaction_features(interaction_model, x_ltr)) {
    entries.push_back(entry);
  }
  return FeatureVector::from_entries(std::move(entries));
}

Dataset enrich_dataset(const Dataset& dataset, const GbdtModel& score_model,
                       const GbdtModel& interaction_model,
                       ScoreTransform transform, int workers) {
  std::vector<ImpressionRecord> records = dataset.records();
  parallel_for(records.size(), workers, [&](std::size_t i) {
    records[i].features = assemble_f_all(records[i].features, score_model,
                                         interaction_model, transform);
  });
  return Dataset(std::move(records));
}

}  // namespace treemix
