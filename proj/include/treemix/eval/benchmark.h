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

#ifndef TREEMIX_EVAL_BENCHMARK_H_
#define TREEMIX_EVAL_BENCHMARK_H_

#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "treemix/core/dataset.h"
#include "treemix/eval/metrics.h"
#include "treemix/gbdt/gbdt.h"
#include "treemix/glmix/glmix.h"
#include "treemix/glmix/grid_search.h"
#include "treemix/treefeat/tree_features.h"

namespace treemix {

// One row of the benchmark table: either the GBDT baseline (ranking by the
// first-level margin) or a GLMix model over the given components.
struct BenchmarkVariant {
  std::string name;
  bool baseline = false;
  std::set<Component> components;
  bool interaction_features = true;  // false: ltr + score only
};

// Baseline, then global / +contract / +recruiter without and with the tree
// interaction features.
std::vector<BenchmarkVariant> standard_variants();

// Namespaces a GLMix variant may use.
NamespaceFilter variant_features(bool interaction_features);

struct BenchmarkConfig {
  GbdtTrainConfig l1_gbdt;  // baseline ranker and source of the score feature
  GbdtTrainConfig l2_gbdt;  // source of the interaction features
  std::vector<double> lambda_grid{1.0, 10.0, 100.0, 1000.0};
  // Template for every GLMix fit; lambdas, components and feature sets are
  // set per variant.
  GlmixTrainConfig glmix;
  RankingObjective objective;  // validation metric of the grid search
  std::vector<int> ks{1, 5, 25};
  ScoreTransform score_transform = ScoreTransform::kMargin;
  int workers = 1;

  // Throws ConfigError.
  void validate() const;
};

// Both GBDTs trained on train, and all three splits enriched with f_all.
struct PreparedBenchmark {
  GbdtModel l1;
  GbdtModel l2;
  Dataset train;
  Dataset validation;
  Dataset test;
};

PreparedBenchmark prepare_benchmark(const Dataset& train, const Dataset& validation,
                                    const Dataset& test, const BenchmarkConfig& config);

struct VariantResult {
  BenchmarkVariant variant;
  std::optional<LambdaTriple> lambdas;  // selected by grid search; none for the baseline
  MetricReport metrics;                 // on the test split
  std::map<int, double> lift;           // percent vs the baseline row
};

struct BenchmarkResult {
  std::vector<int> ks;
  std::vector<VariantResult> rows;  // in variant order
};

// Ranks every test request fully with each variant. Throws ConfigError when
// the list is empty or lacks a baseline; training errors propagate tagged
// with the variant name.
BenchmarkResult benchmark_variants(const PreparedBenchmark& data,
                                   std::span<const BenchmarkVariant> variants,
                                   const BenchmarkConfig& config);
BenchmarkResult benchmark_variants(const Dataset& train, const Dataset& validation,
                                   const Dataset& test,
                                   std::span<const BenchmarkVariant> variants,
                                   const BenchmarkConfig& config);

// Aligned columns: variant, lift@k...
void write_benchmark_text(std::ostream& out, const BenchmarkResult& result);
// Header "variant,lift@1,..."; lifts in percent with three decimals.
void write_benchmark_csv(std::ostream& out, const BenchmarkResult& result);

}  // namespace treemix

#endif  // TREEMIX_EVAL_BENCHMARK_H_
