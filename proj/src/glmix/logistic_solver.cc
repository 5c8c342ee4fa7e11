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

#include "treemix/glmix/logistic_solver.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "treemix/core/errors.h"
#include "treemix/core/logistic.h"

namespace treemix {
namespace {

// Neumaier-compensated sum; keeps objective comparisons between block updates
// well below the descent slack.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      compensation_ += (sum_ - t) + x;
    } else {
      compensation_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

double squared_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

void SparseDesign::add_row(std::span<const std::pair<int, double>> entries) {
  for (const auto& [column, value] : entries) {
    if (column < 0 || column >= num_columns) {
      throw std::out_of_range("design column out of range");
    }
    columns.push_back(column);
    values.push_back(value);
  }
  row_start.push_back(columns.size());
}

std::vector<double> SparseDesign::multiply(std::span<const double> beta) const {
  std::vector<double> out(rows(), 0.0);
  for (std::size_t r = 0; r < rows(); ++r) {
    double s = 0.0;
    for (std::size_t k = row_start[r]; k < row_start[r + 1]; ++k) {
      s += values[k] * beta[columns[k]];
    }
    out[r] = s;
  }
  return out;
}

L2LogisticProblem::L2LogisticProblem(const SparseDesign& design,
                                     std::span<const int> labels,
                                     std::span<const double> offsets,
                                     double lambda)
    : design_(design), labels_(labels), offsets_(offsets), lambda_(lambda) {
  if (labels.size() != design.rows() || offsets.size() != design.rows()) {
    throw std::invalid_argument("labels/offsets do not match design rows");
  }
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
}

double L2LogisticProblem::objective(std::span<const double> beta) const {
  const std::vector<double> xb = design_.multiply(beta);
  CompensatedSum total;
  for (std::size_t i = 0; i < xb.size(); ++i) {
    total.add(logistic_loss(offsets_[i] + xb[i], labels_[i]));
  }
  total.add(0.5 * lambda_ * squared_norm(beta));
  return total.value();
}

double L2LogisticProblem::evaluate(std::span<const double> beta,
                                   std::span<double> grad) const {
  const std::vector<double> xb = design_.multiply(beta);
  CompensatedSum total;
  for (std::size_t j = 0; j < grad.size(); ++j) grad[j] = lambda_ * beta[j];
  for (std::size_t r = 0; r < xb.size(); ++r) {
    const double margin = offsets_[r] + xb[r];
    total.add(logistic_loss(margin, labels_[r]));
    const double residual = sigmoid(margin) - labels_[r];
    for (std::size_t k = design_.row_start[r]; k < design_.row_start[r + 1]; ++k) {
      grad[design_.columns[k]] += residual * design_.values[k];
    }
  }
  total.add(0.5 * lambda_ * squared_norm(beta));
  return total.value();
}

SolveResult solve_l2_logistic(const L2LogisticProblem& problem,
                              const SolverOptions& options) {
  const int dim = problem.dimension();
  const SparseDesign& x = problem.design();
  const std::size_t n = x.rows();

  SolveResult result;
  result.beta.assign(dim, 0.0);
  std::vector<double> grad(dim);
  double f = problem.evaluate(result.beta, grad);
  if (!std::isfinite(f)) throw TrainingError("non-finite logistic objective");

  std::vector<double> weights(n);
  std::vector<double> direction(dim);
  std::vector<double> residual(dim);
  std::vector<double> search(dim);
  std::vector<double> hs(dim);
  std::vector<double> xs(n);
  std::vector<double> candidate(dim);
  std::vector<double> candidate_grad(dim);

  auto hessian_times = [&](std::span<const double> v, std::span<double> out) {
    for (std::size_t r = 0; r < n; ++r) {
      double s = 0.0;
      for (std::size_t k = x.row_start[r]; k < x.row_start[r + 1]; ++k) {
        s += x.values[k] * v[x.columns[k]];
      }
      xs[r] = s * weights[r];
    }
    for (int j = 0; j < dim; ++j) out[j] = problem.lambda() * v[j];
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t k = x.row_start[r]; k < x.row_start[r + 1]; ++k) {
        out[x.columns[k]] += x.values[k] * xs[r];
      }
    }
  };

  double gnorm = std::sqrt(squared_norm(grad));
  while (gnorm > options.tolerance && result.iterations < options.max_iterations) {
    ++result.iterations;
    const std::vector<double> xb = x.multiply(result.beta);
    for (std::size_t r = 0; r < n; ++r) {
      const double p = sigmoid(problem.offsets()[r] + xb[r]);
      weights[r] = p * (1.0 - p);
    }

    // Conjugate gradient on H d = -g, stopped at a relative residual that
    // tightens as the gradient shrinks.
    std::fill(direction.begin(), direction.end(), 0.0);
    for (int j = 0; j < dim; ++j) residual[j] = -grad[j];
    search = residual;
    double rr = squared_norm(residual);
    const double cg_tol = std::min(0.5, std::sqrt(gnorm)) * gnorm;
    const int max_cg = std::max(dim, 10);
    for (int it = 0; it < max_cg && std::sqrt(rr) > cg_tol; ++it) {
      hessian_times(search, hs);
      const double curvature = dot(search, hs);
      if (!(curvature > 0.0)) break;
      const double alpha = rr / curvature;
      for (int j = 0; j < dim; ++j) {
        direction[j] += alpha * search[j];
        residual[j] -= alpha * hs[j];
      }
      const double rr_next = squared_norm(residual);
      const double beta_cg = rr_next / rr;
      for (int j = 0; j < dim; ++j) search[j] = residual[j] + beta_cg * search[j];
      rr = rr_next;
    }

    const double slope = dot(grad, direction);
    if (!(slope < 0.0)) break;

    // Backtracking; near the optimum the achievable decrease can fall below
    // the rounding of f, so a unit step within that rounding is accepted.
    double step = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      for (int j = 0; j < dim; ++j) {
        candidate[j] = result.beta[j] + step * direction[j];
      }
      const double f_new = problem.evaluate(candidate, candidate_grad);
      if (!std::isfinite(f_new)) throw TrainingError("non-finite logistic objective");
      const bool armijo = f_new <= f + 1e-4 * step * slope;
      const bool within_rounding =
          step == 1.0 && f_new <= f + 1e-13 * (1.0 + std::abs(f));
      if (armijo || within_rounding) {
        result.beta.swap(candidate);
        grad.swap(candidate_grad);
        f = f_new;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    gnorm = std::sqrt(squared_norm(grad));
    if (!accepted) break;
  }

  result.objective = f;
  result.gradient_norm = gnorm;
  result.converged = gnorm <= options.tolerance;
  return result;
}

}  // namespace treemix
