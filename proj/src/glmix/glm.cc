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

#include "treemix/glmix/glm.h"

#include <algorithm>
#include <map>
#include <vector>

#include "treemix/core/errors.h"

namespace treemix {

GlmFit fit_glm(std::span<const GlmRow> rows, double lambda,
               const NamespaceFilter& restrict, const SolverOptions& options) {
  if (!(lambda > 0.0)) throw ConfigError("lambda must be positive");
  GlmFit fit;
  fit.converged = true;
  if (rows.empty()) return fit;

  std::map<FeatureKey, int> columns;
  for (const GlmRow& row : rows) {
    for (const auto& entry : *row.features) {
      if (restrict.admits(entry.first)) columns.emplace(entry.first, 0);
    }
  }
  std::vector<const FeatureKey*> keys;
  keys.reserve(columns.size());
  for (auto& [key, column] : columns) {
    column = static_cast<int>(keys.size());
    keys.push_back(&key);
  }

  SparseDesign design;
  design.num_columns = static_cast<int>(keys.size());
  std::vector<int> labels;
  std::vector<double> offsets;
  std::vector<std::pair<int, double>> entries;
  for (const GlmRow& row : rows) {
    entries.clear();
    for (const auto& [key, value] : *row.features) {
      if (restrict.admits(key)) entries.emplace_back(columns.at(key), value);
    }
    design.add_row(entries);
    labels.push_back(row.label);
    offsets.push_back(row.offset);
  }

  const L2LogisticProblem problem(design, labels, offsets, lambda);
  const SolveResult solved = solve_l2_logistic(problem, options);
  std::vector<CoefficientVector::Entry> coefficients;
  for (std::size_t j = 0; j < keys.size(); ++j) {
    if (solved.beta[j] != 0.0) coefficients.emplace_back(*keys[j], solved.beta[j]);
  }
  fit.coefficients = CoefficientVector::from_entries(std::move(coefficients));
  fit.objective = solved.objective;
  fit.gradient_norm = solved.gradient_norm;
  fit.iterations = solved.iterations;
  fit.converged = solved.converged;
  return fit;
}

}  // namespace treemix
