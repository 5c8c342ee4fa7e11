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

#include "treemix/synthgen/generator.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include <json.hpp>

#include "treemix/core/errors.h"
#include "treemix/core/logistic.h"

namespace treemix {
namespace {

using nlohmann::json;

// mt19937_64 output is fixed by the standard; the distributions below are
// written out so that datasets are identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  std::size_t below(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::string numbered(const char* prefix, int width, long long n) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%s%0*lld", prefix, width, n);
  return buffer;
}

FeatureKey ltr_key(int j) {
  return FeatureKey{std::string(kLtrNamespace), "f" + std::to_string(j)};
}

std::vector<double> draw_deviation(Rng& rng, std::size_t dim, double scale) {
  std::vector<double> v(dim);
  for (double& x : v) x = scale * rng.normal();
  return v;
}

struct Generated {
  std::vector<std::vector<ImpressionRecord>> queries;  // random order
  GroundTruth truth;
};

Generated generate_queries(const GeneratorSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  const int m = spec.num_ltr_features;
  const std::size_t dim = static_cast<std::size_t>(m) + 1 + spec.interactions.size();

  Generated out;
  GroundTruth& truth = out.truth;
  truth.spec = spec;
  std::vector<double> linear = spec.true_global.empty()
                                   ? default_true_global(m, spec.seed)
                                   : spec.true_global;
  truth.global = linear;
  for (const auto& pair : spec.interactions) truth.global.push_back(pair.strength);
  truth.spec.true_global = linear;

  std::vector<std::string> contract_ids;
  for (int c = 0; c < spec.num_contracts; ++c) {
    contract_ids.push_back(numbered("co", 3, c));
    truth.contract_deviation[contract_ids.back()] =
        draw_deviation(rng, dim, spec.contract_deviation_scale);
  }
  std::vector<std::string> recruiter_ids;
  std::vector<std::vector<int>> recruiter_contracts;
  for (int r = 0; r < spec.num_recruiters; ++r) {
    recruiter_ids.push_back(numbered("re", 3, r));
    truth.recruiter_deviation[recruiter_ids.back()] =
        draw_deviation(rng, dim, spec.recruiter_deviation_scale);
    std::vector<int> owned{r % spec.num_contracts};
    while (static_cast<int>(owned.size()) < spec.contracts_per_recruiter) {
      const int c = static_cast<int>(rng.below(spec.num_contracts));
      if (std::find(owned.begin(), owned.end(), c) == owned.end()) owned.push_back(c);
    }
    recruiter_contracts.push_back(std::move(owned));
  }

  long long query_counter = 0;
  long long candidate_counter = 0;
  for (int r = 0; r < spec.num_recruiters; ++r) {
    for (int q = 0; q < spec.queries_per_recruiter; ++q) {
      const auto& owned = recruiter_contracts[r];
      const std::string& contract = contract_ids[owned[rng.below(owned.size())]];
      const std::string request_id = numbered("q", 5, query_counter);
      const std::string context_id = numbered("c", 5, query_counter);
      ++query_counter;
      std::vector<ImpressionRecord> records;
      records.reserve(spec.candidates_per_query);
      for (int k = 0; k < spec.candidates_per_query; ++k) {
        ImpressionRecord record;
        record.request_id = request_id;
        record.context_id = context_id;
        record.recruiter_id = recruiter_ids[r];
        record.contract_id = contract;
        record.candidate_id = numbered("ca", 7, candidate_counter++);
        std::vector<FeatureVector::Entry> entries;
        for (int j = 0; j < m; ++j) entries.emplace_back(ltr_key(j), rng.uniform());
        entries.emplace_back(FeatureKey::intercept(), 1.0);
        record.features = FeatureVector::from_entries(std::move(entries));
        const double p = truth.true_probability(record);
        record.label = rng.uniform() < p ? 1 : 0;
        records.push_back(std::move(record));
      }
      rng.shuffle(records);
      out.queries.push_back(std::move(records));
    }
  }
  rng.shuffle(out.queries);
  return out;
}

Dataset flatten(std::vector<std::vector<ImpressionRecord>>::iterator first,
                std::vector<std::vector<ImpressionRecord>>::iterator last) {
  std::vector<ImpressionRecord> records;
  for (auto it = first; it != last; ++it) {
    records.insert(records.end(), std::make_move_iterator(it->begin()),
                   std::make_move_iterator(it->end()));
  }
  return Dataset(std::move(records));
}

json spec_to_json(const GeneratorSpec& s) {
  json interactions = json::array();
  for (const auto& p : s.interactions) {
    interactions.push_back({{"feature_a", p.feature_a},
                            {"feature_b", p.feature_b},
                            {"strength", p.strength}});
  }
  return {{"num_recruiters", s.num_recruiters},
          {"num_contracts", s.num_contracts},
          {"contracts_per_recruiter", s.contracts_per_recruiter},
          {"queries_per_recruiter", s.queries_per_recruiter},
          {"candidates_per_query", s.candidates_per_query},
          {"num_ltr_features", s.num_ltr_features},
          {"true_global", s.true_global},
          {"recruiter_deviation_scale", s.recruiter_deviation_scale},
          {"contract_deviation_scale", s.contract_deviation_scale},
          {"interactions", std::move(interactions)},
          {"label_noise", s.label_noise},
          {"train_fraction", s.train_fraction},
          {"validation_fraction", s.validation_fraction},
          {"seed", s.seed}};
}

GeneratorSpec spec_from_json(const json& j) {
  GeneratorSpec s;
  s.num_recruiters = j.at("num_recruiters").get<int>();
  s.num_contracts = j.at("num_contracts").get<int>();
  s.contracts_per_recruiter = j.at("contracts_per_recruiter").get<int>();
  s.queries_per_recruiter = j.at("queries_per_recruiter").get<int>();
  s.candidates_per_query = j.at("candidates_per_query").get<int>();
  s.num_ltr_features = j.at("num_ltr_features").get<int>();
  s.true_global = j.at("true_global").get<std::vector<double>>();
  s.recruiter_deviation_scale = j.at("recruiter_deviation_scale").get<double>();
  s.contract_deviation_scale = j.at("contract_deviation_scale").get<double>();
  for (const auto& p : j.at("interactions")) {
    s.interactions.push_back(PairInteraction{p.at("feature_a").get<int>(),
                                             p.at("feature_b").get<int>(),
                                             p.at("strength").get<double>()});
  }
  s.label_noise = j.at("label_noise").get<double>();
  s.train_fraction = j.at("train_fraction").get<double>();
  s.validation_fraction = j.at("validation_fraction").get<double>();
  s.seed = j.at("seed").get<std::uint64_t>();
  return s;
}

}  // namespace

void GeneratorSpec::validate() const {
  if (num_recruiters < 1 || num_contracts < 1 || queries_per_recruiter < 1 ||
      candidates_per_query < 1) {
    throw ConfigError("generator needs at least one recruiter, contract, query and candidate");
  }
  if (num_ltr_features < 1) throw ConfigError("generator needs at least one feature");
  if (contracts_per_recruiter < 1 || contracts_per_recruiter > num_contracts) {
    throw ConfigError("contracts_per_recruiter must lie in [1, num_contracts]");
  }
  if (!true_global.empty() &&
      true_global.size() != static_cast<std::size_t>(num_ltr_features) + 1) {
    throw ConfigError("true_global needs num_ltr_features + 1 entries");
  }
  if (!(recruiter_deviation_scale >= 0.0) || !(contract_deviation_scale >= 0.0)) {
    throw ConfigError("deviation scales must be >= 0");
  }
  for (const auto& pair : interactions) {
    if (pair.feature_a < 0 || pair.feature_a >= num_ltr_features || pair.feature_b < 0 ||
        pair.feature_b >= num_ltr_features || pair.feature_a == pair.feature_b) {
      throw ConfigError("interaction references invalid features");
    }
  }
  if (!(label_noise >= 0.0 && label_noise < 0.5)) {
    throw ConfigError("label_noise must lie in [0, 0.5)");
  }
  if (!(train_fraction >= 0.0 && validation_fraction >= 0.0 &&
        train_fraction + validation_fraction <= 1.0)) {
    throw ConfigError("split fractions must be non-negative and sum to at most 1");
  }
}

std::vector<double> default_true_global(int num_ltr_features, std::uint64_t seed) {
  // Separate stream from the data so that changing sizes keeps coefficients.
  Rng rng(seed ^ 0x9E3779B97F4A7C15ULL);
  std::vector<double> beta(num_ltr_features + 1);
  for (int j = 0; j < num_ltr_features; ++j) beta[j] = rng.normal();
  beta[num_ltr_features] = -2.0;  // intercept: sparse positives
  return beta;
}

double GroundTruth::global_margin(const ImpressionRecord& record) const {
  const int m = spec.num_ltr_features;
  std::vector<double> x(m);
  for (int j = 0; j < m; ++j) {
    const double* v = record.features.find(ltr_key(j));
    if (v == nullptr) {
      throw InputError("record lacks generator feature " + ltr_key(j).str());
    }
    x[j] = *v;
  }
  double margin = global[m];
  for (int j = 0; j < m; ++j) margin += global[j] * x[j];
  for (std::size_t p = 0; p < spec.interactions.size(); ++p) {
    const auto& pair = spec.interactions[p];
    const bool a = x[pair.feature_a] > 0.5;
    const bool b = x[pair.feature_b] > 0.5;
    margin += global[m + 1 + p] * (a != b ? 1.0 : -1.0);
  }
  return margin;
}

double GroundTruth::true_margin(const ImpressionRecord& record) const {
  auto re = recruiter_deviation.find(record.recruiter_id);
  auto co = contract_deviation.find(record.contract_id);
  if (re == recruiter_deviation.end() || co == contract_deviation.end()) {
    throw InputError("record " + record.request_id + "/" + record.candidate_id +
                     " does not belong to this generator");
  }
  const int m = spec.num_ltr_features;
  std::vector<double> x(m);
  for (int j = 0; j < m; ++j) {
    const double* v = record.features.find(ltr_key(j));
    if (v == nullptr) {
      throw InputError("record lacks generator feature " + ltr_key(j).str());
    }
    x[j] = *v;
  }
  auto coefficient = [&](std::size_t i) {
    return global[i] + re->second[i] + co->second[i];
  };
  double margin = coefficient(m);
  for (int j = 0; j < m; ++j) margin += coefficient(j) * x[j];
  for (std::size_t p = 0; p < spec.interactions.size(); ++p) {
    const auto& pair = spec.interactions[p];
    const bool a = x[pair.feature_a] > 0.5;
    const bool b = x[pair.feature_b] > 0.5;
    margin += coefficient(m + 1 + p) * (a != b ? 1.0 : -1.0);
  }
  return margin;
}

double GroundTruth::true_probability(const ImpressionRecord& record) const {
  const double p = sigmoid(true_margin(record));
  return (1.0 - spec.label_noise) * p + spec.label_noise * (1.0 - p);
}

GeneratedData generate(const GeneratorSpec& spec) {
  Generated gen = generate_queries(spec);
  const std::size_t total = gen.queries.size();
  const auto train_end = static_cast<std::size_t>(std::llround(spec.train_fraction * total));
  const auto validation_end = std::min(
      total, train_end + static_cast<std::size_t>(
                             std::llround(spec.validation_fraction * total)));
  GeneratedData data;
  auto begin = gen.queries.begin();
  data.train = flatten(begin, begin + train_end);
  data.validation = flatten(begin + train_end, begin + validation_end);
  data.test = flatten(begin + validation_end, gen.queries.end());
  data.truth = std::move(gen.truth);
  return data;
}

GeneratedDays generate_days(const GeneratorSpec& spec, int num_days) {
  if (num_days < 1) throw ConfigError("num_days must be >= 1");
  Generated gen = generate_queries(spec);
  std::vector<std::vector<ImpressionRecord>> per_day(num_days);
  for (std::size_t q = 0; q < gen.queries.size(); ++q) {
    auto& day = per_day[q % num_days];
    day.insert(day.end(), std::make_move_iterator(gen.queries[q].begin()),
               std::make_move_iterator(gen.queries[q].end()));
  }
  GeneratedDays out;
  for (auto& records : per_day) out.days.emplace_back(std::move(records));
  out.truth = std::move(gen.truth);
  return out;
}

RankedList oracle_rank(const GroundTruth& truth, const Dataset& dataset,
                       std::span<const std::size_t> rows) {
  if (rows.empty()) throw std::invalid_argument("request has no candidates");
  const std::string& request_id = dataset[rows.front()].request_id;
  std::vector<RankedItem> items;
  for (std::size_t row : rows) {
    const auto& record = dataset[row];
    if (record.request_id != request_id) {
      throw std::invalid_argument("oracle_rank given records of several requests");
    }
    const double p = truth.true_probability(record);
    items.push_back(RankedItem{record.candidate_id, row, p, p, record.label});
  }
  const std::size_t count = items.size();
  return rank_top_k(request_id, std::move(items), count);
}

std::string serialize_truth(const GroundTruth& truth) {
  json doc = {{"spec", spec_to_json(truth.spec)},
              {"global", truth.global},
              {"recruiter_deviation", truth.recruiter_deviation},
              {"contract_deviation", truth.contract_deviation}};
  return doc.dump(1) + "\n";
}

GroundTruth deserialize_truth(const std::string& text) {
  try {
    const json doc = json::parse(text);
    GroundTruth truth;
    truth.spec = spec_from_json(doc.at("spec"));
    truth.global = doc.at("global").get<std::vector<double>>();
    truth.recruiter_deviation =
        doc.at("recruiter_deviation").get<std::map<std::string, std::vector<double>>>();
    truth.contract_deviation =
        doc.at("contract_deviation").get<std::map<std::string, std::vector<double>>>();
    return truth;
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed truth document: ") + e.what());
  }
}

}  // namespace treemix
