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

#ifndef TREEMIX_GLMIX_GLM_H_
#define TREEMIX_GLMIX_GLM_H_

#include <span>

#include "treemix/core/feature_vector.h"
#include "treemix/glmix/logistic_solver.h"

namespace treemix {

struct GlmRow {
  const FeatureVector* features = nullptr;
  int label = 0;
  double offset = 0.0;
};

struct GlmFit {
  CoefficientVector coefficients;  // exact zeros omitted
  double objective = 0.0;
  double gradient_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

// L2-regularized logistic regression with fixed per-row offsets over the
// features admitted by restrict. No rows gives exactly the zero vector.
// Throws ConfigError unless lambda > 0 and TrainingError on divergence.
GlmFit fit_glm(std::span<const GlmRow> rows, double lambda,
               const NamespaceFilter& restrict, const SolverOptions& options);

}  // namespace treemix

#endif  // TREEMIX_GLMIX_GLM_H_
