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

#ifndef TREEMIX_GLMIX_GLMIX_H_
#define TREEMIX_GLMIX_GLMIX_H_

#include <array>
#include <compare>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "treemix/core/dataset.h"
#include "treemix/core/feature_vector.h"

namespace treemix {

// Model components in training order: the fixed effect first, then the
// per-contract and per-recruiter random effects.
enum class Component { kGlobal, kContract, kRecruiter };
inline constexpr std::array<Component, 3> kComponentOrder{
    Component::kGlobal, Component::kContract, Component::kRecruiter};

std::string_view to_string(Component component);
Component parse_component(std::string_view text);
std::optional<EntityKind> entity_kind(Component component);

struct LambdaTriple {
  double global = 100.0;
  double contract = 100.0;
  double recruiter = 100.0;

  double of(Component component) const;
  auto operator<=>(const LambdaTriple&) const = default;
};

struct GlmixTrainConfig {
  LambdaTriple lambdas;
  int outer_passes = 3;
  double solver_tolerance = 1e-6;
  int max_solver_iterations = 100;
  std::set<Component> enabled{Component::kGlobal, Component::kContract,
                              Component::kRecruiter};
  // Components without an entry use every namespace.
  std::map<Component, NamespaceFilter> feature_config;
  int workers = 1;

  // Throws ConfigError.
  void validate() const;
  NamespaceFilter features_for(Component component) const;
};

// Fixed-effect coefficients plus per-entity random-effect coefficients. An
// entity without coefficients contributes nothing to the score.
struct GlmixModel {
  CoefficientVector fixed;
  std::map<EntityKind, std::map<std::string, CoefficientVector>> random_effects;
  std::map<Component, NamespaceFilter> feature_config;

  const CoefficientVector* entity(EntityKind kind, const std::string& id) const;
  bool operator==(const GlmixModel&) const = default;
};

struct GlmixScore {
  double margin = 0.0;
  double probability = 0.5;
};

// Fixed-effect dot plus the recruiter's and the contract's dots, each
// skipped when the entity is unknown to the model.
GlmixScore score(const GlmixModel& model, const FeatureVector& x,
                 const std::string& recruiter_id, const std::string& contract_id);

struct ComponentUpdate {
  int pass = 0;
  Component component = Component::kGlobal;
  double objective = 0.0;  // penalized objective after the update
};

struct GlmixTrace {
  double initial_objective = 0.0;
  std::vector<ComponentUpdate> updates;
  int unconverged_fits = 0;  // inner solves that hit max_solver_iterations
};

// Block coordinate descent over the enabled components. Each component is fit
// against offsets equal to the other components' current scores; random
// effects are fit independently per entity. Throws TrainingError with
// component/entity context when a solve fails.
GlmixModel train_glmix(const Dataset& dataset, const GlmixTrainConfig& config,
                       GlmixTrace* trace = nullptr);

// Total logistic loss of the model on the dataset plus every component's L2
// penalty under config's lambdas.
double penalized_objective(const GlmixModel& model, const Dataset& dataset,
                           const LambdaTriple& lambdas);

}  // namespace treemix

#endif  // TREEMIX_GLMIX_GLMIX_H_
