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

#ifndef TREEMIX_SYNTHGEN_GENERATOR_H_
#define TREEMIX_SYNTHGEN_GENERATOR_H_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "treemix/core/dataset.h"
#include "treemix/core/ranked_list.h"

namespace treemix {

// XOR-like term: +strength when exactly one of the two features exceeds 0.5,
// -strength otherwise.
struct PairInteraction {
  int feature_a = 0;
  int feature_b = 1;
  double strength = 1.0;
  bool operator==(const PairInteraction&) const = default;
};

struct GeneratorSpec {
  int num_recruiters = 20;
  int num_contracts = 8;
  int contracts_per_recruiter = 2;
  int queries_per_recruiter = 10;
  int candidates_per_query = 50;
  int num_ltr_features = 8;
  // Global coefficients on ltr:f0..f<m-1> followed by the intercept. Empty
  // means draw them from the seed (see default_true_global).
  std::vector<double> true_global;
  double recruiter_deviation_scale = 0.5;
  double contract_deviation_scale = 0.3;
  std::vector<PairInteraction> interactions;
  double label_noise = 0.0;  // probability of flipping a label, in [0, 0.5)
  double train_fraction = 0.6;
  double validation_fraction = 0.2;
  std::uint64_t seed = 1;

  // Throws ConfigError on a degenerate or inconsistent spec.
  void validate() const;
  bool operator==(const GeneratorSpec&) const = default;
};

// The generative model. Parameter vectors are laid out as
// [f0 .. f<m-1>, intercept, pair_0 .. pair_<P-1>]; an entity's effective
// parameters are global + its recruiter deviation + its contract deviation.
struct GroundTruth {
  GeneratorSpec spec;
  std::vector<double> global;
  std::map<std::string, std::vector<double>> recruiter_deviation;
  std::map<std::string, std::vector<double>> contract_deviation;

  std::size_t dimension() const { return global.size(); }
  // Throws InputError if the record's entities or features do not belong to
  // this generator.
  double true_margin(const ImpressionRecord& record) const;
  // P(label = 1), label noise included.
  double true_probability(const ImpressionRecord& record) const;
  // Same without any entity deviations (what a non-personalized model can
  // reach at best).
  double global_margin(const ImpressionRecord& record) const;

  bool operator==(const GroundTruth&) const = default;
};

struct GeneratedData {
  Dataset train;
  Dataset validation;
  Dataset test;
  GroundTruth truth;
};

std::vector<double> default_true_global(int num_ltr_features, std::uint64_t seed);

// Impressions split by request into train/validation/test; candidate order
// within each request is random. Same spec -> identical output.
GeneratedData generate(const GeneratorSpec& spec);

struct GeneratedDays {
  std::vector<Dataset> days;
  GroundTruth truth;
};

// All requests of the spec spread round-robin over num_days partitions; the
// split fractions are ignored.
GeneratedDays generate_days(const GeneratorSpec& spec, int num_days);

// Ranks a request's records by true probability (ties by candidate id).
RankedList oracle_rank(const GroundTruth& truth, const Dataset& dataset,
                       std::span<const std::size_t> rows);

std::string serialize_truth(const GroundTruth& truth);
GroundTruth deserialize_truth(const std::string& text);

}  // namespace treemix

#endif  // TREEMIX_SYNTHGEN_GENERATOR_H_
