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

#include "treemix/eval/benchmark.h"

#include <algorithm>
#include <ostream>

#include "treemix/core/errors.h"
#include "treemix/core/ranked_list.h"

namespace treemix {
namespace {

std::string component_label(const std::set<Component>& components) {
  std::string label;
  for (Component c : kComponentOrder) {
    if (!components.contains(c)) continue;
    if (!label.empty()) label += "+";
    label += to_string(c);
  }
  return label;
}

std::vector<RankedList> rank_baseline(const Dataset& enriched) {
  // The enriched score feature is the first-level margin itself.
  std::vector<double> scores(enriched.size());
  for (std::size_t i = 0; i < enriched.size(); ++i) {
    scores[i] = enriched[i].features.get(score_key());
  }
  return rank_queries(enriched, scores);
}

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string quoted = "\"";
  for (char ch : text) {
    if (ch == '"') quoted += '"';
    quoted += ch;
  }
  return quoted + "\"";
}

}  // namespace

std::vector<BenchmarkVariant> standard_variants() {
  std::vector<BenchmarkVariant> variants;
  variants.push_back({"GBDT baseline", true, {}, false});
  const std::vector<std::set<Component>> stacks{
      {Component::kGlobal},
      {Component::kGlobal, Component::kContract},
      {Component::kGlobal, Component::kContract, Component::kRecruiter}};
  for (bool interactions : {false, true}) {
    for (const auto& stack : stacks) {
      const std::string features = interactions ? "ltr+score+int" : "ltr+score";
      variants.push_back(
          {"GLMix " + component_label(stack) + ", " + features, false, stack, interactions});
    }
  }
  return variants;
}

NamespaceFilter variant_features(bool interaction_features) {
  std::set<std::string> namespaces{std::string(kLtrNamespace), std::string(kScoreNamespace)};
  if (interaction_features) namespaces.insert(std::string(kInteractionNamespace));
  return NamespaceFilter::only(std::move(namespaces));
}

void BenchmarkConfig::validate() const {
  l1_gbdt.validate();
  l2_gbdt.validate();
  glmix.validate();
  if (lambda_grid.empty()) throw ConfigError("lambda grid must not be empty");
  for (double v : lambda_grid) {
    if (!(v > 0.0)) throw ConfigError("lambda grid values must be > 0");
  }
  if (ks.empty()) throw ConfigError("benchmark needs at least one k");
  for (int k : ks) {
    if (k < 1) throw ConfigError("benchmark k values must be >= 1");
  }
  if (workers < 1) throw ConfigError("workers must be >= 1");
}

PreparedBenchmark prepare_benchmark(const Dataset& train, const Dataset& validation,
                                    const Dataset& test, const BenchmarkConfig& config) {
  config.validate();
  GbdtModel l1 = train_gbdt(train, config.l1_gbdt);
  GbdtModel l2 = train_gbdt(train, config.l2_gbdt);
  auto enrich = [&](const Dataset& d) {
    return enrich_dataset(d, l1, l2, config.score_transform, config.workers);
  };
  Dataset train_all = enrich(train);
  Dataset validation_all = enrich(validation);
  Dataset test_all = enrich(test);
  return PreparedBenchmark{std::move(l1), std::move(l2), std::move(train_all),
                           std::move(validation_all), std::move(test_all)};
}

BenchmarkResult benchmark_variants(const PreparedBenchmark& data,
                                   std::span<const BenchmarkVariant> variants,
                                   const BenchmarkConfig& config) {
  config.validate();
  if (variants.empty()) throw ConfigError("benchmark variant list is empty");
  const auto baseline = std::find_if(variants.begin(), variants.end(),
                                     [](const BenchmarkVariant& v) { return v.baseline; });
  if (baseline == variants.end()) throw ConfigError("benchmark variant list lacks a baseline");

  BenchmarkResult result;
  result.ks = config.ks;
  for (const auto& variant : variants) {
    VariantResult row;
    row.variant = variant;
    try {
      std::vector<RankedList> rankings;
      if (variant.baseline) {
        rankings = rank_baseline(data.test);
      } else {
        if (!variant.components.contains(Component::kGlobal)) {
          throw ConfigError("GLMix variant needs the global component");
        }
        GlmixTrainConfig base = config.glmix;
        base.enabled = variant.components;
        base.feature_config.clear();
        for (Component c : variant.components) {
          base.feature_config[c] = variant_features(variant.interaction_features);
        }
        base.workers = config.workers;
        const auto grid = make_grid(config.lambda_grid, variant.components, base.lambdas);
        GridSearchResult search =
            grid_search(data.train, data.validation, grid, base, config.objective);
        row.lambdas = search.best;
        rankings = rank_with_glmix(search.best_model, data.test);
      }
      row.metrics = make_report(rankings, config.ks);
    } catch (const TrainingError& e) {
      throw TrainingError("variant '" + variant.name + "': " + e.what());
    }
    result.rows.push_back(std::move(row));
  }
  const MetricReport& reference =
      result.rows[static_cast<std::size_t>(baseline - variants.begin())].metrics;
  for (auto& row : result.rows) row.lift = lift(row.metrics, reference);
  return result;
}

BenchmarkResult benchmark_variants(const Dataset& train, const Dataset& validation,
                                   const Dataset& test,
                                   std::span<const BenchmarkVariant> variants,
                                   const BenchmarkConfig& config) {
  return benchmark_variants(prepare_benchmark(train, validation, test, config), variants,
                            config);
}

void write_benchmark_text(std::ostream& out, const BenchmarkResult& result) {
  std::size_t name_width = std::string("variant").size();
  for (const auto& row : result.rows) name_width = std::max(name_width, row.variant.name.size());
  std::vector<std::vector<std::string>> cells;
  std::vector<std::string> headers;
  for (int k : result.ks) headers.push_back("lift@" + std::to_string(k));
  std::vector<std::size_t> widths;
  for (const auto& h : headers) widths.push_back(h.size());
  for (const auto& row : result.rows) {
    std::vector<std::string> line;
    for (std::size_t i = 0; i < result.ks.size(); ++i) {
      line.push_back(format_lift(row.lift.at(result.ks[i])));
      widths[i] = std::max(widths[i], line.back().size());
    }
    cells.push_back(std::move(line));
  }
  auto pad_right = [](const std::string& s, std::size_t w) {
    return s + std::string(w - s.size(), ' ');
  };
  auto pad_left = [](const std::string& s, std::size_t w) {
    return std::string(w - s.size(), ' ') + s;
  };
  out << pad_right("variant", name_width);
  for (std::size_t i = 0; i < headers.size(); ++i) out << "  " << pad_left(headers[i], widths[i]);
  out << "\n";
  for (std::size_t r = 0; r < result.rows.size(); ++r) {
    out << pad_right(result.rows[r].variant.name, name_width);
    for (std::size_t i = 0; i < cells[r].size(); ++i) {
      out << "  " << pad_left(cells[r][i], widths[i]);
    }
    out << "\n";
  }
}

void write_benchmark_csv(std::ostream& out, const BenchmarkResult& result) {
  out << "variant";
  for (int k : result.ks) out << ",lift@" << k;
  out << "\n";
  for (const auto& row : result.rows) {
    out << csv_field(row.variant.name);
    for (int k : result.ks) {
      std::string text = format_lift(row.lift.at(k));
      text.pop_back();  // drop the percent sign
      out << "," << text;
    }
    out << "\n";
  }
}

}  // namespace treemix
