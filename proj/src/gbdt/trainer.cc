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
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

#include "treemix/core/errors.h"
#include "treemix/core/logistic.h"
#include "treemix/gbdt/gbdt.h"

namespace treemix {
namespace {

constexpr double kBaseScoreClamp = 10.0;

// Column-major copy of the training features with NaN for missing values,
// plus each column's present rows sorted by (value, row).
struct ColumnData {
  std::vector<std::vector<double>> columns;
  std::vector<std::vector<std::uint32_t>> sorted_rows;
};

ColumnData build_columns(const Dataset& dataset) {
  const std::size_t num_features = dataset.feature_index().size();
  const std::size_t n = dataset.size();
  ColumnData data;
  data.columns.assign(num_features,
                      std::vector<double>(n, std::numeric_limits<double>::quiet_NaN()));
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& [key, value] : dataset[i].features) {
      data.columns[dataset.feature_index().column(key)][i] = value;
    }
  }
  data.sorted_rows.resize(num_features);
  for (std::size_t f = 0; f < num_features; ++f) {
    const auto& column = data.columns[f];
    auto& rows = data.sorted_rows[f];
    for (std::uint32_t i = 0; i < n; ++i) {
      if (!std::isnan(column[i])) rows.push_back(i);
    }
    std::stable_sort(rows.begin(), rows.end(), [&](std::uint32_t a, std::uint32_t b) {
      return column[a] < column[b];
    });
  }
  return data;
}

struct SplitCandidate {
  bool valid = false;
  double gain = 0.0;
  int feature = -1;
  double threshold = 0.0;
  Direction default_direction = Direction::kLeft;
};

class TreeGrower {
 public:
  TreeGrower(const ColumnData& data, const std::vector<double>& grad,
             const std::vector<double>& hess, const GbdtTrainConfig& config)
      : data_(data), grad_(grad), hess_(hess), config_(config),
        row_node_(grad.size(), 0) {}

  // Returns the nodes in pre-order and, per row, the node index of its leaf.
  std::vector<TreeNode> grow(std::vector<int>& leaf_of_row) {
    nodes_.clear();
    std::vector<std::uint32_t> rows(grad_.size());
    std::iota(rows.begin(), rows.end(), 0u);
    grow_node(rows, 0);
    leaf_of_row = row_node_;
    return nodes_;
  }

 private:
  double leaf_score(double g, double h) const {
    return g * g / (h + config_.l2_leaf);
  }

  int grow_node(const std::vector<std::uint32_t>& rows, int depth) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    double g = 0.0;
    double h = 0.0;
    for (std::uint32_t r : rows) {
      row_node_[r] = id;
      g += grad_[r];
      h += hess_[r];
    }

    SplitCandidate best;
    if (depth < config_.max_depth) best = find_split(id, g, h);
    if (!best.valid) {
      nodes_[id] = TreeNode::leaf(-config_.learning_rate * g / (h + config_.l2_leaf));
      return id;
    }

    std::vector<std::uint32_t> left_rows;
    std::vector<std::uint32_t> right_rows;
    const auto& column = data_.columns[best.feature];
    for (std::uint32_t r : rows) {
      const double value = column[r];
      const bool go_left = std::isnan(value)
                               ? best.default_direction == Direction::kLeft
                               : value <= best.threshold;
      (go_left ? left_rows : right_rows).push_back(r);
    }
    const int left = grow_node(left_rows, depth + 1);
    const int right = grow_node(right_rows, depth + 1);
    nodes_[id] = TreeNode::split(best.feature, best.threshold, left, right,
                                 best.default_direction);
    return id;
  }

  // Boundaries between distinct-value groups that are split candidates.
  std::vector<bool> candidate_boundaries(const std::vector<double>& group_hess) const {
    const std::size_t groups = group_hess.size();
    std::vector<bool> candidate(groups > 0 ? groups - 1 : 0, false);
    if (config_.split_mode == SplitMode::kExact ||
        groups <= static_cast<std::size_t>(config_.bins)) {
      std::fill(candidate.begin(), candidate.end(), true);
      return candidate;
    }
    // Hessian-weighted quantiles: the boundary after the group where the
    // cumulative weight first reaches j/bins of the total, j = 1..bins-1.
    double total = std::accumulate(group_hess.begin(), group_hess.end(), 0.0);
    const bool uniform = !(total > 0.0);
    if (uniform) total = static_cast<double>(groups);
    double cumulative = 0.0;
    std::size_t i = 0;
    for (int j = 1; j < config_.bins; ++j) {
      const double target = total * j / config_.bins;
      while (i < groups) {
        const double next = cumulative + (uniform ? 1.0 : group_hess[i]);
        if (next >= target) break;
        cumulative = next;
        ++i;
      }
      if (i + 1 < groups) candidate[i] = true;
    }
    return candidate;
  }

  SplitCandidate find_split(int node, double g_total, double h_total) {
    SplitCandidate best;
    const double parent = leaf_score(g_total, h_total);
    std::vector<double> values;
    std::vector<double> group_g;
    std::vector<double> group_h;

    for (std::size_t f = 0; f < data_.columns.size(); ++f) {
      const auto& column = data_.columns[f];
      values.clear();
      group_g.clear();
      group_h.clear();
      for (std::uint32_t r : data_.sorted_rows[f]) {
        if (row_node_[r] != node) continue;
        const double v = column[r];
        if (values.empty() || values.back() != v) {
          values.push_back(v);
          group_g.push_back(0.0);
          group_h.push_back(0.0);
        }
        group_g.back() += grad_[r];
        group_h.back() += hess_[r];
      }
      if (values.size() < 2) continue;

      double g_present = 0.0;
      double h_present = 0.0;
      for (std::size_t i = 0; i < values.size(); ++i) {
        g_present += group_g[i];
        h_present += group_h[i];
      }
      const double g_missing = g_total - g_present;
      const double h_missing = h_total - h_present;

      const std::vector<bool> candidate = candidate_boundaries(group_h);
      double g_left = 0.0;
      double h_left = 0.0;
      for (std::size_t i = 0; i + 1 < values.size(); ++i) {
        g_left += group_g[i];
        h_left += group_h[i];
        if (!candidate[i]) continue;

        double threshold = values[i] + (values[i + 1] - values[i]) / 2.0;
        if (!(threshold < values[i + 1])) threshold = values[i];

        for (Direction direction : {Direction::kLeft, Direction::kRight}) {
          const bool missing_left = direction == Direction::kLeft;
          const double gl = g_left + (missing_left ? g_missing : 0.0);
          const double hl = h_left + (missing_left ? h_missing : 0.0);
          const double gr = g_total - gl;
          const double hr = h_total - hl;
          if (hl < config_.min_child_hessian || hr < config_.min_child_hessian) {
            continue;
          }
          const double gain =
              0.5 * (leaf_score(gl, hl) + leaf_score(gr, hr) - parent) -
              config_.min_split_gain;
          if (!(gain > 0.0)) continue;
          // Strict improvement keeps the lowest feature, then the lowest
          // threshold, then missing-left among equal gains.
          if (!best.valid || gain > best.gain) {
            best.valid = true;
            best.gain = gain;
            best.feature = static_cast<int>(f);
            best.threshold = threshold;
            best.default_direction = direction;
          }
        }
      }
    }
    return best;
  }

  const ColumnData& data_;
  const std::vector<double>& grad_;
  const std::vector<double>& hess_;
  const GbdtTrainConfig& config_;
  std::vector<int> row_node_;
  std::vector<TreeNode> nodes_;
};

double mean_loss(const std::vector<double>& margins, const Dataset& dataset) {
  double total = 0.0;
  for (std::size_t i = 0; i < margins.size(); ++i) {
    total += logistic_loss(margins[i], dataset[i].label);
  }
  return total / static_cast<double>(margins.size());
}

}  // namespace

GbdtModel train_gbdt(const Dataset& dataset, const GbdtTrainConfig& config,
                     const RoundCallback& on_round) {
  config.validate();
  if (dataset.empty()) throw TrainingError("cannot train a GBDT on an empty dataset");

  const std::size_t n = dataset.size();
  std::size_t positives = 0;
  for (const auto& record : dataset.records()) positives += record.label;
  double base_score;
  if (positives == 0) {
    base_score = -kBaseScoreClamp;
  } else if (positives == n) {
    base_score = kBaseScoreClamp;
  } else {
    base_score = std::clamp(logit(static_cast<double>(positives) / n),
                            -kBaseScoreClamp, kBaseScoreClamp);
  }

  const ColumnData data = build_columns(dataset);
  std::vector<double> margins(n, base_score);
  std::vector<double> grad(n);
  std::vector<double> hess(n);
  std::vector<RegressionTree> trees;
  trees.reserve(config.num_trees);
  if (on_round) on_round(0, mean_loss(margins, dataset));

  TreeGrower grower(data, grad, hess, config);
  std::vector<int> leaf_of_row;
  for (int round = 1; round <= config.num_trees; ++round) {
    for (std::size_t i = 0; i < n; ++i) {
      const double p = sigmoid(margins[i]);
      grad[i] = p - dataset[i].label;
      hess[i] = p * (1.0 - p);
    }
    std::vector<TreeNode> nodes = grower.grow(leaf_of_row);
    for (std::size_t i = 0; i < n; ++i) margins[i] += nodes[leaf_of_row[i]].weight;
    trees.emplace_back(std::move(nodes));
    if (on_round) on_round(round, mean_loss(margins, dataset));
  }
  return GbdtModel(dataset.feature_index().keys(), std::move(trees), base_score,
                   config);
}

}  // namespace treemix
