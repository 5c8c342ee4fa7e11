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

#include "treemix/gbdt/model_io.h"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "treemix/core/errors.h"

namespace treemix {
namespace {

using nlohmann::json;

json config_to_json(const GbdtTrainConfig& c) {
  return {{"num_trees", c.num_trees},
          {"max_depth", c.max_depth},
          {"learning_rate", c.learning_rate},
          {"l2_leaf", c.l2_leaf},
          {"min_split_gain", c.min_split_gain},
          {"split_mode", std::string(to_string(c.split_mode))},
          {"bins", c.bins},
          {"min_child_hessian", c.min_child_hessian},
          {"seed", c.seed}};
}

GbdtTrainConfig config_from_json(const json& j) {
  GbdtTrainConfig c;
  c.num_trees = j.at("num_trees").get<int>();
  c.max_depth = j.at("max_depth").get<int>();
  c.learning_rate = j.at("learning_rate").get<double>();
  c.l2_leaf = j.at("l2_leaf").get<double>();
  c.min_split_gain = j.at("min_split_gain").get<double>();
  const auto mode = j.at("split_mode").get<std::string>();
  if (mode == "exact") {
    c.split_mode = SplitMode::kExact;
  } else if (mode == "quantile") {
    c.split_mode = SplitMode::kQuantile;
  } else {
    throw InputError("unknown split_mode '" + mode + "'");
  }
  c.bins = j.at("bins").get<int>();
  c.min_child_hessian = j.at("min_child_hessian").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

json node_to_json(const RegressionTree& tree, int index,
                  const std::vector<FeatureKey>& schema) {
  const TreeNode& node = tree.node(index);
  if (node.is_leaf()) {
    return {{"leaf", node.leaf_ordinal}, {"weight", node.weight}};
  }
  return {{"feature", schema[node.feature].str()},
          {"threshold", node.threshold},
          {"default_direction",
           node.default_direction == Direction::kLeft ? "left" : "right"},
          {"left", node_to_json(tree, node.left, schema)},
          {"right", node_to_json(tree, node.right, schema)}};
}

int node_from_json(const json& j, const std::vector<FeatureKey>& schema,
                   std::vector<TreeNode>& nodes) {
  const int id = static_cast<int>(nodes.size());
  nodes.emplace_back();
  if (j.contains("weight")) {
    nodes[id] = TreeNode::leaf(j.at("weight").get<double>());
    return id;
  }
  const FeatureKey key = FeatureKey::parse(j.at("feature").get<std::string>());
  auto it = std::lower_bound(schema.begin(), schema.end(), key);
  if (it == schema.end() || !(*it == key)) {
    throw InputError("split feature " + key.str() + " not in feature_schema");
  }
  const auto direction = j.at("default_direction").get<std::string>();
  if (direction != "left" && direction != "right") {
    throw InputError("default_direction must be left or right");
  }
  const double threshold = j.at("threshold").get<double>();
  const int left = node_from_json(j.at("left"), schema, nodes);
  const int right = node_from_json(j.at("right"), schema, nodes);
  nodes[id] = TreeNode::split(static_cast<int>(it - schema.begin()), threshold,
                              left, right,
                              direction == "left" ? Direction::kLeft : Direction::kRight);
  return id;
}

}  // namespace

std::string serialize_gbdt(const GbdtModel& model) {
  json schema = json::array();
  for (const auto& key : model.feature_schema()) schema.push_back(key.str());
  json trees = json::array();
  for (const auto& tree : model.trees()) {
    trees.push_back(node_to_json(tree, 0, model.feature_schema()));
  }
  json doc = {{"version", kGbdtFormatVersion},
              {"config", config_to_json(model.config())},
              {"base_score", model.base_score()},
              {"feature_schema", std::move(schema)},
              {"trees", std::move(trees)}};
  return doc.dump(1) + "\n";
}

GbdtModel deserialize_gbdt(std::string_view text) {
  try {
    const json doc = json::parse(text);
    const int version = doc.at("version").get<int>();
    if (version != kGbdtFormatVersion) {
      throw InputError("unsupported GBDT model version " + std::to_string(version));
    }
    std::vector<FeatureKey> schema;
    for (const auto& key : doc.at("feature_schema")) {
      schema.push_back(FeatureKey::parse(key.get<std::string>()));
    }
    std::vector<RegressionTree> trees;
    for (const auto& tree_doc : doc.at("trees")) {
      std::vector<TreeNode> nodes;
      node_from_json(tree_doc, schema, nodes);
      trees.emplace_back(std::move(nodes));
    }
    return GbdtModel(std::move(schema), std::move(trees),
                     doc.at("base_score").get<double>(),
                     config_from_json(doc.at("config")));
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed GBDT model: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw InputError(std::string("malformed GBDT model: ") + e.what());
  }
}

void save_gbdt(const std::filesystem::path& path, const GbdtModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write model " + path.string());
  out << serialize_gbdt(model);
  if (!out) throw IoError("write failed for " + path.string());
}

GbdtModel load_gbdt(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return deserialize_gbdt(buffer.str());
}

}  // namespace treemix
