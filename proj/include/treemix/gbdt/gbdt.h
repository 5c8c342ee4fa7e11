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

#ifndef TREEMIX_GBDT_GBDT_H_
#define TREEMIX_GBDT_GBDT_H_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "treemix/core/dataset.h"
#include "treemix/core/feature_vector.h"

namespace treemix {

enum class SplitMode { kExact, kQuantile };

std::string_view to_string(SplitMode mode);

struct GbdtTrainConfig {
  int num_trees = 100;
  int max_depth = 2;
  double learning_rate = 0.1;
  double l2_leaf = 1.0;         // lambda in the leaf objective
  double min_split_gain = 0.0;  // gamma, subtracted from every split gain
  SplitMode split_mode = SplitMode::kExact;
  int bins = 256;               // quantile mode only
  double min_child_hessian = 1.0;
  std::uint64_t seed = 0;

  // Throws ConfigError.
  void validate() const;
  bool operator==(const GbdtTrainConfig&) const = default;
};

enum class Direction { kLeft, kRight };

// Internal nodes send value <= threshold left and value > threshold right; a
// missing value follows default_direction.
struct TreeNode {
  int feature = -1;  // index into the model's feature schema; -1 for leaves
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  Direction default_direction = Direction::kLeft;
  double weight = 0.0;    // leaves only, shrinkage already applied
  int leaf_ordinal = -1;  // leaves only, assigned by RegressionTree

  bool is_leaf() const { return feature < 0; }
  static TreeNode leaf(double weight);
  static TreeNode split(int feature, double threshold, int left, int right,
                        Direction default_direction = Direction::kLeft);
  bool operator==(const TreeNode&) const = default;
};

class RegressionTree {
 public:
  // nodes[0] is the root. Every non-root node must be referenced exactly once.
  // Leaf ordinals are (re)assigned 0..L-1 in depth-first pre-order, left
  // subtree first. Throws std::invalid_argument on malformed structure.
  explicit RegressionTree(std::vector<TreeNode> nodes);

  // Node index of the leaf reached by a dense row (NaN marks missing).
  int route(std::span<const double> row) const;

  const TreeNode& node(int index) const { return nodes_[index]; }
  const std::vector<TreeNode>& nodes() const { return nodes_; }
  int num_leaves() const { return num_leaves_; }
  int depth() const { return depth_; }

  bool operator==(const RegressionTree&) const = default;

 private:
  std::vector<TreeNode> nodes_;
  int num_leaves_ = 0;
  int depth_ = 0;
};

struct LeafRef {
  int tree = 0;
  int leaf = 0;  // pre-order leaf ordinal
  bool operator==(const LeafRef&) const = default;
};

// Additive ensemble of regression trees over a fixed feature schema.
class GbdtModel {
 public:
  // feature_schema must be sorted and unique. Throws std::invalid_argument if
  // a tree references an unknown feature, exceeds config.max_depth, or the
  // ensemble is empty.
  GbdtModel(std::vector<FeatureKey> feature_schema,
            std::vector<RegressionTree> trees, double base_score,
            GbdtTrainConfig config);

  // base_score + sum of the reached leaf weights. Unseen features are
  // ignored and absent ones take the default direction.
  double predict_margin(const FeatureVector& x) const;
  double predict_margin(std::span<const double> row) const;

  // One entry per tree, in tree order.
  std::vector<LeafRef> leaf_indices(const FeatureVector& x) const;
  std::vector<LeafRef> leaf_indices(std::span<const double> row) const;

  // Projection of x onto the schema, NaN where absent.
  std::vector<double> dense_row(const FeatureVector& x) const;

  double leaf_weight(LeafRef ref) const;

  const std::vector<FeatureKey>& feature_schema() const { return schema_; }
  const std::vector<RegressionTree>& trees() const { return trees_; }
  std::size_t num_trees() const { return trees_.size(); }
  double base_score() const { return base_score_; }
  double learning_rate() const { return config_.learning_rate; }
  const GbdtTrainConfig& config() const { return config_; }

  bool operator==(const GbdtModel&) const = default;

 private:
  std::vector<FeatureKey> schema_;
  std::vector<RegressionTree> trees_;
  std::vector<std::vector<double>> leaf_weights_;  // [tree][ordinal]
  double base_score_;
  GbdtTrainConfig config_;
};

// Called with round 0 (base score only) and after each boosting round with
// the mean training logistic loss.
using RoundCallback = std::function<void(int round, double mean_loss)>;

// Newton boosting of logistic loss. Throws TrainingError on an empty dataset
// and ConfigError on an invalid config.
GbdtModel train_gbdt(const Dataset& dataset, const GbdtTrainConfig& config,
                     const RoundCallback& on_round = {});

}  // namespace treemix

#endif  // TREEMIX_GBDT_GBDT_H_
