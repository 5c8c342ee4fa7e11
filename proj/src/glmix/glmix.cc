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

#include "treemix/glmix/glmix.h"

#include <cmath>
#include <utility>

#include "treemix/core/errors.h"
#include "treemix/core/logistic.h"
#include "treemix/core/parallel.h"
#include "treemix/glmix/logistic_solver.h"

namespace treemix {
namespace {

double squared_norm(const CoefficientVector& v) {
  double s = 0.0;
  for (const auto& entry : v) s += entry.second * entry.second;
  return s;
}

// Records of one fit: the whole dataset for the fixed effect, or one
// entity's records for a random effect, with columns compacted to the
// features that actually occur.
struct Block {
  std::string entity_id;
  std::vector<std::size_t> rows;
  std::vector<int> global_columns;  // local column -> dataset column
  SparseDesign design;
  std::vector<int> labels;
  std::vector<double> beta;
};

Block make_block(std::string entity_id, std::vector<std::size_t> rows,
                 const Dataset& dataset,
                 const std::vector<std::vector<std::pair<int, double>>>& row_entries,
                 const std::vector<bool>& admitted) {
  Block block;
  block.entity_id = std::move(entity_id);
  block.rows = std::move(rows);
  std::vector<int> local(dataset.feature_index().size(), -1);
  for (std::size_t r : block.rows) {
    for (const auto& [column, value] : row_entries[r]) {
      if (admitted[column]) local[column] = 0;
    }
  }
  for (std::size_t c = 0; c < local.size(); ++c) {
    if (local[c] == 0) {
      local[c] = static_cast<int>(block.global_columns.size());
      block.global_columns.push_back(static_cast<int>(c));
    }
  }
  block.design.num_columns = static_cast<int>(block.global_columns.size());
  std::vector<std::pair<int, double>> entries;
  for (std::size_t r : block.rows) {
    entries.clear();
    for (const auto& [column, value] : row_entries[r]) {
      if (admitted[column]) entries.emplace_back(local[column], value);
    }
    block.design.add_row(entries);
    block.labels.push_back(dataset[r].label);
  }
  block.beta.assign(block.global_columns.size(), 0.0);
  return block;
}

CoefficientVector to_coefficients(const Block& block, const FeatureIndex& index) {
  std::vector<CoefficientVector::Entry> entries;
  for (std::size_t j = 0; j < block.beta.size(); ++j) {
    if (block.beta[j] != 0.0) {
      entries.emplace_back(index.key(block.global_columns[j]), block.beta[j]);
    }
  }
  return CoefficientVector::from_entries(std::move(entries));
}

}  // namespace

std::string_view to_string(Component component) {
  switch (component) {
    case Component::kGlobal:
      return "global";
    case Component::kContract:
      return "contract";
    case Component::kRecruiter:
      return "recruiter";
  }
  return "unknown";
}

Component parse_component(std::string_view text) {
  if (text == "global") return Component::kGlobal;
  if (text == "contract") return Component::kContract;
  if (text == "recruiter") return Component::kRecruiter;
  throw ConfigError("unknown component '" + std::string(text) + "'");
}

std::optional<EntityKind> entity_kind(Component component) {
  switch (component) {
    case Component::kGlobal:
      return std::nullopt;
    case Component::kContract:
      return EntityKind::kContract;
    case Component::kRecruiter:
      return EntityKind::kRecruiter;
  }
  return std::nullopt;
}

double LambdaTriple::of(Component component) const {
  switch (component) {
    case Component::kGlobal:
      return global;
    case Component::kContract:
      return contract;
    case Component::kRecruiter:
      return recruiter;
  }
  return global;
}

void GlmixTrainConfig::validate() const {
  for (Component c : kComponentOrder) {
    if (!(lambdas.of(c) > 0.0)) {
      throw ConfigError("lambda_" + std::string(to_string(c)) + " must be positive");
    }
  }
  if (outer_passes < 1) throw ConfigError("outer_passes must be >= 1");
  if (!(solver_tolerance > 0.0)) throw ConfigError("solver_tolerance must be positive");
  if (max_solver_iterations < 1) {
    throw ConfigError("max_solver_iterations must be >= 1");
  }
  if (enabled.empty()) throw ConfigError("no GLMix component enabled");
}

NamespaceFilter GlmixTrainConfig::features_for(Component component) const {
  auto it = feature_config.find(component);
  return it == feature_config.end() ? NamespaceFilter::all() : it->second;
}

const CoefficientVector* GlmixModel::entity(EntityKind kind,
                                            const std::string& id) const {
  auto kind_it = random_effects.find(kind);
  if (kind_it == random_effects.end()) return nullptr;
  auto it = kind_it->second.find(id);
  return it == kind_it->second.end() ? nullptr : &it->second;
}

GlmixScore score(const GlmixModel& model, const FeatureVector& x,
                 const std::string& recruiter_id, const std::string& contract_id) {
  // Each component only sees its configured namespaces.
  auto component_dot = [&](Component component, const CoefficientVector& beta) {
    auto it = model.feature_config.find(component);
    if (it == model.feature_config.end() || it->second.admits_all()) return dot(x, beta);
    return dot(x.restricted(it->second), beta);
  };
  double margin = component_dot(Component::kGlobal, model.fixed);
  if (const auto* re = model.entity(EntityKind::kRecruiter, recruiter_id)) {
    margin += component_dot(Component::kRecruiter, *re);
  }
  if (const auto* co = model.entity(EntityKind::kContract, contract_id)) {
    margin += component_dot(Component::kContract, *co);
  }
  return GlmixScore{margin, sigmoid(margin)};
}

double penalized_objective(const GlmixModel& model, const Dataset& dataset,
                           const LambdaTriple& lambdas) {
  double loss = 0.0;
  for (const auto& record : dataset.records()) {
    const auto s = score(model, record.features, record.recruiter_id,
                         record.contract_id);
    loss += logistic_loss(s.margin, record.label);
  }
  double penalty = lambdas.global * squared_norm(model.fixed);
  for (const auto& [kind, entities] : model.random_effects) {
    const double lambda = kind == EntityKind::kRecruiter ? lambdas.recruiter
                                                         : lambdas.contract;
    for (const auto& [id, coefficients] : entities) {
      penalty += lambda * squared_norm(coefficients);
    }
  }
  return loss + 0.5 * penalty;
}

GlmixModel train_glmix(const Dataset& dataset, const GlmixTrainConfig& config,
                       GlmixTrace* trace) {
  config.validate();
  if (dataset.empty()) throw TrainingError("cannot train GLMix on an empty dataset");

  const std::size_t n = dataset.size();
  const FeatureIndex& index = dataset.feature_index();
  std::vector<std::vector<std::pair<int, double>>> row_entries(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& [key, value] : dataset[i].features) {
      row_entries[i].emplace_back(index.column(key), value);
    }
  }

  std::vector<Component> components;
  for (Component c : kComponentOrder) {
    if (config.enabled.count(c)) components.push_back(c);
  }

  std::map<Component, std::vector<Block>> blocks;
  for (Component c : components) {
    const NamespaceFilter filter = config.features_for(c);
    std::vector<bool> admitted(index.size());
    for (std::size_t col = 0; col < index.size(); ++col) {
      admitted[col] = filter.admits(index.key(static_cast<int>(col)));
    }
    auto& list = blocks[c];
    if (auto kind = entity_kind(c)) {
      for (auto& [id, rows] : group_by_entity(dataset, *kind)) {
        list.push_back(make_block(id, std::move(rows), dataset, row_entries, admitted));
      }
    } else {
      std::vector<std::size_t> all(n);
      for (std::size_t i = 0; i < n; ++i) all[i] = i;
      list.push_back(make_block("", std::move(all), dataset, row_entries, admitted));
    }
  }

  std::map<Component, std::vector<double>> contribution;
  for (Component c : components) contribution[c].assign(n, 0.0);
  std::vector<double> total(n, 0.0);
  const SolverOptions options{config.solver_tolerance, config.max_solver_iterations};

  auto objective = [&] {
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) loss += logistic_loss(total[i], dataset[i].label);
    double penalty = 0.0;
    for (Component c : components) {
      double sq = 0.0;
      for (const Block& block : blocks[c]) {
        for (double b : block.beta) sq += b * b;
      }
      penalty += config.lambdas.of(c) * sq;
    }
    return loss + 0.5 * penalty;
  };

  if (trace != nullptr) {
    *trace = GlmixTrace{};
    trace->initial_objective = objective();
  }

  std::vector<int> unconverged;
  for (int pass = 0; pass < config.outer_passes; ++pass) {
    for (Component c : components) {
      auto& list = blocks[c];
      auto& contrib = contribution[c];
      const double lambda = config.lambdas.of(c);
      unconverged.assign(list.size(), 0);
      parallel_for(list.size(), config.workers, [&](std::size_t b) {
        Block& block = list[b];
        std::vector<double> offsets(block.rows.size());
        for (std::size_t k = 0; k < block.rows.size(); ++k) {
          const std::size_t r = block.rows[k];
          offsets[k] = total[r] - contrib[r];
        }
        SolveResult solved;
        try {
          const L2LogisticProblem problem(block.design, block.labels, offsets, lambda);
          solved = solve_l2_logistic(problem, options);
        } catch (const TrainingError& e) {
          std::string context = "GLMix " + std::string(to_string(c));
          if (!block.entity_id.empty()) context += " entity '" + block.entity_id + "'";
          throw TrainingError(context + ": " + e.what());
        }
        unconverged[b] = solved.converged ? 0 : 1;
        block.beta = std::move(solved.beta);
        const std::vector<double> xb = block.design.multiply(block.beta);
        for (std::size_t k = 0; k < block.rows.size(); ++k) contrib[block.rows[k]] = xb[k];
      });
      for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (Component other : components) s += contribution[other][i];
        total[i] = s;
      }
      if (trace != nullptr) {
        for (int u : unconverged) trace->unconverged_fits += u;
        trace->updates.push_back(ComponentUpdate{pass, c, objective()});
      }
    }
  }

  GlmixModel model;
  for (Component c : components) {
    if (auto kind = entity_kind(c)) {
      auto& entities = model.random_effects[*kind];
      for (const Block& block : blocks[c]) {
        entities.emplace(block.entity_id, to_coefficients(block, index));
      }
    } else {
      model.fixed = to_coefficients(blocks[c].front(), index);
    }
    model.feature_config[c] = config.features_for(c);
  }
  return model;
}

}  // namespace treemix
