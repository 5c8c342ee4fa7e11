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

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "treemix/core/errors.h"
#include "treemix/gbdt/gbdt.h"

namespace treemix {

std::string_view to_string(SplitMode mode) {
  return mode == SplitMode::kExact ? "exact" : "quantile";
}

void GbdtTrainConfig::validate() const {
  if (num_trees < 1) throw ConfigError("num_trees must be >= 1");
  if (max_depth < 1) throw ConfigError("max_depth must be >= 1");
  if (!(learning_rate > 0.0 && learning_rate <= 1.0)) {
    throw ConfigError("learning_rate must lie in (0, 1]");
  }
  if (!(l2_leaf >= 0.0)) throw ConfigError("l2_leaf must be >= 0");
  if (!(min_split_gain >= 0.0)) throw ConfigError("min_split_gain must be >= 0");
  if (!(min_child_hessian >= 0.0)) {
    throw ConfigError("min_child_hessian must be >= 0");
  }
  if (split_mode == SplitMode::kQuantile && bins < 2) {
    throw ConfigError("quantile split mode needs bins >= 2");
  }
}

TreeNode TreeNode::leaf(double weight) {
  TreeNode node;
  node.weight = weight;
  return node;
}

TreeNode TreeNode::split(int feature, double threshold, int left, int right,
                         Direction default_direction) {
  TreeNode node;
  node.feature = feature;
  node.threshold = threshold;
  node.left = left;
  node.right = right;
  node.default_direction = default_direction;
  return node;
}

RegressionTree::RegressionTree(std::vector<TreeNode> nodes)
    : nodes_(std::move(nodes)) {
  if (nodes_.empty()) throw std::invalid_argument("tree has no nodes");
  const int n = static_cast<int>(nodes_.size());
  std::vector<bool> seen(n, false);

  // Iterative pre-order walk; the right child is pushed first so the left
  // subtree is numbered first.
  std::vector<std::pair<int, int>> stack{{0, 0}};
  seen[0] = true;
  int visited = 0;
  while (!stack.empty()) {
    auto [index, depth] = stack.back();
    stack.pop_back();
    ++visited;
    depth_ = std::max(depth_, depth);
    TreeNode& node = nodes_[index];
    if (node.is_leaf()) {
      if (!std::isfinite(node.weight)) {
        throw std::invalid_argument("non-finite leaf weight");
      }
      node.leaf_ordinal = num_leaves_++;
      node.left = node.right = -1;
      continue;
    }
    node.leaf_ordinal = -1;
    if (std::isnan(node.threshold)) {
      throw std::invalid_argument("NaN split threshold");
    }
    for (int child : {node.right, node.left}) {
      if (child <= 0 || child >= n || seen[child]) {
        throw std::invalid_argument("invalid child reference " +
                                    std::to_string(child));
      }
      seen[child] = true;
      stack.emplace_back(child, depth + 1);
    }
  }
  if (visited != n) throw std::invalid_argument("unreachable tree nodes");
}

int RegressionTree::route(std::span<const double> row) const {
  int index = 0;
  while (!nodes_[index].is_leaf()) {
    const TreeNode& node = nodes_[index];
    const double value = row[node.feature];
    bool go_left;
    if (std::isnan(value)) {
      go_left = node.default_direction == Direction::kLeft;
    } else {
      go_left = value <= node.threshold;
    }
    index = go_left ? node.left : node.right;
  }
  return index;
}

GbdtModel::GbdtModel(std::vector<FeatureKey> feature_schema,
                     std::vector<RegressionTree> trees, double base_score,
                     GbdtTrainConfig config)
    : schema_(std::move(feature_schema)),
      trees_(std::move(trees)),
      base_score_(base_score),
      config_(config) {
  if (trees_.empty()) throw std::invalid_argument("ensemble has no trees");
  if (!std::isfinite(base_score_)) {
    throw std::invalid_argument("non-finite base score");
  }
  for (std::size_t i = 1; i < schema_.size(); ++i) {
    if (!(schema_[i - 1] < schema_[i])) {
      throw std::invalid_argument("feature schema must be sorted and unique");
    }
  }
  const int num_features = static_cast<int>(schema_.size());
  leaf_weights_.reserve(trees_.size());
  for (const auto& tree : trees_) {
    if (tree.depth() > config_.max_depth) {
      throw std::invalid_argument("tree depth " + std::to_string(tree.depth()) +
                                  " exceeds max_depth " +
                                  std::to_string(config_.max_depth));
    }
    std::vector<double> weights(tree.num_leaves());
    for (const auto& node : tree.nodes()) {
      if (node.is_leaf()) {
        weights[node.leaf_ordinal] = node.weight;
      } else if (node.feature >= num_features) {
        throw std::invalid_argument("split on unknown feature index " +
                                    std::to_string(node.feature));
      }
    }
    leaf_weights_.push_back(std::move(weights));
  }
}

std::vector<double> GbdtModel::dense_row(const FeatureVector& x) const {
  std::vector<double> row(schema_.size(),
                          std::numeric_limits<double>::quiet_NaN());
  auto it = x.begin();
  for (std::size_t f = 0; f < schema_.size() && it != x.end();) {
    if (it->first < schema_[f]) {
      ++it;
    } else if (schema_[f] < it->first) {
      ++f;
    } else {
      row[f] = it->second;
      ++it;
      ++f;
    }
  }
  return row;
}

double GbdtModel::predict_margin(std::span<const double> row) const {
  double margin = base_score_;
  for (const auto& tree : trees_) margin += tree.node(tree.route(row)).weight;
  return margin;
}

double GbdtModel::predict_margin(const FeatureVector& x) const {
  return predict_margin(dense_row(x));
}

std::vector<LeafRef> GbdtModel::leaf_indices(std::span<const double> row) const {
  std::vector<LeafRef> out;
  out.reserve(trees_.size());
  for (std::size_t k = 0; k < trees_.size(); ++k) {
    const auto& tree = trees_[k];
    out.push_back(
        LeafRef{static_cast<int>(k), tree.node(tree.route(row)).leaf_ordinal});
  }
  return out;
}

std::vector<LeafRef> GbdtModel::leaf_indices(const FeatureVector& x) const {
  return leaf_indices(dense_row(x));
}

double GbdtModel::leaf_weight(LeafRef ref) const {
  return leaf_weights_.at(ref.tree).at(ref.leaf);
}

}  // namespace treemix
