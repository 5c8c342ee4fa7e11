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

#ifndef TREEMIX_GLMIX_LOGISTIC_SOLVER_H_
#define TREEMIX_GLMIX_LOGISTIC_SOLVER_H_

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace treemix {

// Compressed sparse rows.
struct SparseDesign {
  std::vector<std::size_t> row_start{0};
  std::vector<int> columns;
  std::vector<double> values;
  int num_columns = 0;

  std::size_t rows() const { return row_start.size() - 1; }
  void add_row(std::span<const std::pair<int, double>> entries);
  // Xb for every row.
  std::vector<double> multiply(std::span<const double> beta) const;
};

// f(b) = sum_i log(1 + exp(-(2y_i - 1)(offset_i + x_i.b))) + lambda/2 |b|^2
class L2LogisticProblem {
 public:
  L2LogisticProblem(const SparseDesign& design, std::span<const int> labels,
                    std::span<const double> offsets, double lambda);

  int dimension() const { return design_.num_columns; }
  double objective(std::span<const double> beta) const;
  // Objective value; gradient written to grad.
  double evaluate(std::span<const double> beta, std::span<double> grad) const;

  const SparseDesign& design() const { return design_; }
  std::span<const int> labels() const { return labels_; }
  std::span<const double> offsets() const { return offsets_; }
  double lambda() const { return lambda_; }

 private:
  const SparseDesign& design_;
  std::span<const int> labels_;
  std::span<const double> offsets_;
  double lambda_;
};

struct SolverOptions {
  double tolerance = 1e-6;  // on the Euclidean gradient norm
  int max_iterations = 100;
};

struct SolveResult {
  std::vector<double> beta;
  double objective = 0.0;
  double gradient_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Truncated Newton (conjugate gradient inner solve, Armijo backtracking) from
// a zero start. Throws TrainingError if the objective becomes non-finite.
SolveResult solve_l2_logistic(const L2LogisticProblem& problem,
                              const SolverOptions& options);

}  // namespace treemix

#endif  // TREEMIX_GLMIX_LOGISTIC_SOLVER_H_
