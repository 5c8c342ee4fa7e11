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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "treemix/core/dataset.h"
#include "treemix/core/errors.h"
#include "treemix/core/logistic.h"
#include "treemix/eval/metrics.h"
#include "treemix/glmix/glm.h"
#include "treemix/glmix/glmix.h"
#include "treemix/glmix/grid_search.h"
#include "treemix/glmix/logistic_solver.h"
#include "treemix/glmix/model_store.h"
#include "treemix/synthgen/generator.h"

namespace treemix {
namespace {

namespace fs = std::filesystem;

const FeatureKey kX{"ltr", "x"};

// Minimizer of 4 log(1 + e^-w) + w^2 / 2, the reduced objective of the
// symmetric example below (computed offline with an independent minimizer).
constexpr double kSymmetricCoefficient = 1.0425969152464085;

double golden_section(const std::function<double(double)>& f, double a, double b) {
  const double ratio = (std::sqrt(5.0) - 1) / 2;
  double c = b - ratio * (b - a), d = a + ratio * (b - a);
  while (b - a > 1e-12) {
    if (f(c) < f(d)) {
      b = d;
    } else {
      a = c;
    }
    c = b - ratio * (b - a);
    d = a + ratio * (b - a);
  }
  return (a + b) / 2;
}

std::vector<FeatureVector> symmetric_features() {
  std::vector<FeatureVector> xs;
  for (double v : {1.0, -1.0, 1.0, -1.0}) {
    xs.push_back(FeatureVector::from_entries({{kX, v}, {FeatureKey::intercept(), 1.0}}));
  }
  return xs;
}

TEST(FitGlmTest, SymmetricExampleMatchesOneDimensionalOracle) {
  const double oracle = golden_section(
      [](double w) { return 4 * std::log1p(std::exp(-w)) + w * w / 2; }, -5, 5);
  // Golden section on a flat minimum resolves the argmin to about sqrt(eps).
  EXPECT_NEAR(oracle, kSymmetricCoefficient, 1e-7);

  const auto xs = symmetric_features();
  std::vector<GlmRow> rows;
  for (std::size_t i = 0; i < xs.size(); ++i) rows.push_back({&xs[i], i % 2 == 0 ? 1 : 0, 0.0});
  const GlmFit fit = fit_glm(rows, 1.0, NamespaceFilter::all(), SolverOptions{});
  EXPECT_TRUE(fit.converged);
  EXPECT_NEAR(fit.coefficients.get(kX), kSymmetricCoefficient, 1e-6);
  EXPECT_NEAR(fit.coefficients.get(FeatureKey::intercept()), 0.0, 1e-6);
  EXPECT_LE(fit.gradient_norm, 1e-6);
}

TEST(FitGlmTest, EmptyRowsGiveExactlyZero) {
  const GlmFit fit = fit_glm({}, 1.0, NamespaceFilter::all(), SolverOptions{});
  EXPECT_TRUE(fit.coefficients.empty());
  EXPECT_EQ(fit.objective, 0.0);
}

TEST(FitGlmTest, LambdaMustBePositive) {
  EXPECT_THROW(fit_glm({}, 0.0, NamespaceFilter::all(), SolverOptions{}), ConfigError);
  EXPECT_THROW(fit_glm({}, -1.0, NamespaceFilter::all(), SolverOptions{}), ConfigError);
}

TEST(FitGlmTest, HeavyRegularizationShrinksToZero) {
  const auto xs = symmetric_features();
  std::vector<GlmRow> rows;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const int label = i % 2 == 0 ? 1 : 0;
    rows.push_back({&xs[i], label, label == 1 ? 20.0 : -20.0});  // already perfect
  }
  const GlmFit fit = fit_glm(rows, 1e6, NamespaceFilter::all(), SolverOptions{});
  for (const auto& [key, value] : fit.coefficients) EXPECT_NEAR(value, 0.0, 1e-3) << key.str();
}

TEST(FitGlmTest, RestrictLimitsTheSupport) {
  const FeatureKey other{"int", "t0:l1"};
  std::vector<FeatureVector> xs;
  std::vector<GlmRow> rows;
  for (int i = 0; i < 20; ++i) {
    xs.push_back(FeatureVector::from_entries(
        {{kX, i % 3 - 1.0}, {other, 1.0}, {FeatureKey::intercept(), 1.0}}));
  }
  for (int i = 0; i < 20; ++i) rows.push_back({&xs[i], i % 2, 0.0});
  const GlmFit fit = fit_glm(rows, 1.0, NamespaceFilter::only({"ltr"}), SolverOptions{});
  EXPECT_FALSE(fit.coefficients.contains(other));
}

// Random problem: n rows over d sparse columns.
struct RandomProblem {
  SparseDesign design;
  std::vector<int> labels;
  std::vector<double> offsets;
};

RandomProblem random_problem(std::mt19937_64& rng, int n, int d) {
  std::uniform_real_distribution<double> u(-1, 1);
  RandomProblem p;
  p.design.num_columns = d;
  for (int i = 0; i < n; ++i) {
    std::vector<std::pair<int, double>> entries;
    for (int j = 0; j < d; ++j) {
      if (rng() % 3 != 0) entries.emplace_back(j, 2 * u(rng));
    }
    p.design.add_row(entries);
    p.labels.push_back(static_cast<int>(rng() % 2));
    p.offsets.push_back(u(rng));
  }
  return p;
}

TEST(SolverTest, GradientMatchesCentralDifferences) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 2 + static_cast<int>(rng() % 6);
    const RandomProblem p = random_problem(rng, 30, d);
    const L2LogisticProblem problem(p.design, p.labels, p.offsets, 0.5 + trial);
    std::vector<double> beta(d), grad(d);
    for (double& b : beta) b = u(rng);
    problem.evaluate(beta, grad);
    for (int j = 0; j < d; ++j) {
      auto plus = beta, minus = beta;
      plus[j] += 1e-5;
      minus[j] -= 1e-5;
      const double numeric = (problem.objective(plus) - problem.objective(minus)) / 2e-5;
      EXPECT_LE(std::abs(numeric - grad[j]), 1e-4 * std::max(1.0, std::abs(grad[j])))
          << "trial " << trial << " column " << j;
    }
  }
}

TEST(SolverTest, ConvergesBelowTolerance) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const RandomProblem p = random_problem(rng, 60, 8);
    const L2LogisticProblem problem(p.design, p.labels, p.offsets, 0.1 + trial * 0.3);
    const SolveResult r = solve_l2_logistic(problem, SolverOptions{});
    EXPECT_TRUE(r.converged);
    std::vector<double> grad(8);
    problem.evaluate(r.beta, grad);
    double norm = 0;
    for (double g : grad) norm += g * g;
    EXPECT_LE(std::sqrt(norm), 1e-6);
  }
}

ImpressionRecord impression(const std::string& recruiter, const std::string& contract, int i,
                            double x, int label) {
  ImpressionRecord r;
  r.request_id = "q" + std::to_string(i / 5);
  r.context_id = "c";
  r.recruiter_id = recruiter;
  r.candidate_id = "ca" + std::to_string(i);
  r.contract_id = contract;
  r.label = label;
  r.features = FeatureVector::from_entries({{kX, x}});
  return r;
}

Dataset small_mixed_dataset(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<ImpressionRecord> records;
  for (int i = 0; i < 300; ++i) {
    const int re = static_cast<int>(rng() % 6);
    const int co = static_cast<int>(rng() % 3);
    const double x = u(rng);
    const double margin = (re % 2 == 0 ? 2.0 : -1.0) * x + 0.3 * co;
    records.push_back(impression("re" + std::to_string(re), "co" + std::to_string(co), i, x,
                                 (u(rng) + 1) / 2 < sigmoid(margin) ? 1 : 0));
  }
  return Dataset(records);
}

TEST(GlmixTest, GlobalOnlyEqualsPlainGlm) {
  const Dataset d = small_mixed_dataset(1);
  GlmixTrainConfig c;
  c.enabled = {Component::kGlobal};
  c.lambdas.global = 3.0;
  const GlmixModel m = train_glmix(d, c);
  EXPECT_TRUE(m.random_effects.empty() ||
              (m.random_effects.at(EntityKind::kRecruiter).empty() &&
               m.random_effects.at(EntityKind::kContract).empty()));
  std::vector<GlmRow> rows;
  for (const auto& r : d.records()) rows.push_back({&r.features, r.label, 0.0});
  const GlmFit fit = fit_glm(rows, 3.0, NamespaceFilter::all(), SolverOptions{});
  EXPECT_EQ(m.fixed, fit.coefficients);
}

TEST(GlmixTest, ObjectiveDescendsAfterEveryUpdate) {
  const Dataset d = small_mixed_dataset(2);
  GlmixTrainConfig c;
  c.lambdas = {1.0, 1.0, 1.0};
  GlmixTrace trace;
  const GlmixModel m = train_glmix(d, c, &trace);
  ASSERT_EQ(trace.updates.size(), 9u);
  double previous = trace.initial_objective;
  for (const auto& u : trace.updates) {
    EXPECT_LE(u.objective, previous + 1e-8);
    previous = u.objective;
  }
  EXPECT_NEAR(penalized_objective(m, d, c.lambdas), previous, 1e-9 * std::abs(previous));
  EXPECT_EQ(m.random_effects.at(EntityKind::kRecruiter).size(), 6u);
  EXPECT_EQ(m.random_effects.at(EntityKind::kContract).size(), 3u);
}

TEST(GlmixTest, DeterministicAcrossWorkerCounts) {
  const Dataset d = small_mixed_dataset(3);
  GlmixTrainConfig c;
  c.workers = 1;
  const GlmixModel one = train_glmix(d, c);
  c.workers = 4;
  EXPECT_EQ(train_glmix(d, c), one);
}

TEST(GlmixTest, ConfigValidation) {
  GlmixTrainConfig c;
  c.outer_passes = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = GlmixTrainConfig{};
  c.lambdas.recruiter = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = GlmixTrainConfig{};
  c.solver_tolerance = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = GlmixTrainConfig{};
  c.enabled.clear();
  EXPECT_THROW(c.validate(), ConfigError);
  EXPECT_THROW(train_glmix(Dataset(), GlmixTrainConfig{}), TrainingError);
}

CoefficientVector coefficients(double x, double intercept) {
  return CoefficientVector::from_entries({{kX, x}, {FeatureKey::intercept(), intercept}});
}

TEST(ScoreTest, SumsComponentsAndFallsBack) {
  GlmixModel m;
  m.fixed = coefficients(1.2, 0);
  m.random_effects[EntityKind::kRecruiter]["re1"] = coefficients(-0.3, 0);
  m.random_effects[EntityKind::kContract]["co1"] = coefficients(0.1, 0);
  const FeatureVector x = FeatureVector::from_entries({{kX, 1.0}, {FeatureKey::intercept(), 1.0}});
  const GlmixScore s = score(m, x, "re1", "co1");
  EXPECT_NEAR(s.margin, 1.0, 1e-15);
  EXPECT_NEAR(s.probability, 0.731059, 1e-6);
  EXPECT_EQ(score(m, x, "unknown", "unknown").margin, dot(x, m.fixed));
  EXPECT_EQ(score(GlmixModel{}, x, "re1", "co1").probability, 0.5);
}

TEST(ScoreTest, ComponentFeatureConfigRestrictsScoring) {
  GlmixModel m;
  const FeatureKey other{"int", "t0:l0"};
  m.fixed = CoefficientVector::from_entries({{kX, 1.0}});
  m.random_effects[EntityKind::kRecruiter]["re"] = CoefficientVector::from_entries({{kX, 2.0}});
  m.feature_config[Component::kRecruiter] = NamespaceFilter::only({"int"});
  const FeatureVector x = FeatureVector::from_entries({{kX, 1.0}, {other, 1.0}});
  EXPECT_EQ(score(m, x, "re", "co").margin, 1.0);
}

TEST(PersonalizationTest, RecruiterCoefficientsTrackTrueDeviations) {
  GeneratorSpec spec;
  spec.num_recruiters = 50;
  spec.num_contracts = 5;
  spec.queries_per_recruiter = 8;
  spec.candidates_per_query = 50;  // 400 records per recruiter
  spec.num_ltr_features = 4;
  spec.recruiter_deviation_scale = 1.0;
  spec.contract_deviation_scale = 0.0;
  spec.train_fraction = 1.0;
  spec.validation_fraction = 0.0;
  spec.seed = 5;
  const GeneratedData data = generate(spec);
  GlmixTrainConfig c;
  c.enabled = {Component::kGlobal, Component::kRecruiter};
  c.lambdas = {1.0, 1.0, 5.0};
  const GlmixModel m = train_glmix(data.train, c);
  std::vector<double> fitted, truth;
  for (const auto& [id, deviation] : data.truth.recruiter_deviation) {
    const CoefficientVector* beta = m.entity(EntityKind::kRecruiter, id);
    ASSERT_NE(beta, nullptr);
    for (int j = 0; j < spec.num_ltr_features; ++j) {
      fitted.push_back(beta->get(FeatureKey{"ltr", "f" + std::to_string(j)}));
      truth.push_back(deviation[j]);
    }
  }
  const double n = static_cast<double>(fitted.size());
  double mf = 0, mt = 0;
  for (std::size_t i = 0; i < fitted.size(); ++i) {
    mf += fitted[i] / n;
    mt += truth[i] / n;
  }
  double sff = 0, stt = 0, sft = 0;
  for (std::size_t i = 0; i < fitted.size(); ++i) {
    sff += (fitted[i] - mf) * (fitted[i] - mf);
    stt += (truth[i] - mt) * (truth[i] - mt);
    sft += (fitted[i] - mf) * (truth[i] - mt);
  }
  EXPECT_GT(sft / std::sqrt(sff * stt), 0.5);
}

double validation_log_loss(const GlmixModel& m, const Dataset& d) {
  std::vector<ScoredLabel> scored;
  for (const auto& r : d.records()) {
    scored.push_back({score(m, r.features, r.recruiter_id, r.contract_id).margin, r.label});
  }
  return mean_log_loss(scored);
}

TEST(PersonalizationTest, RecruiterEffectsLowerValidationLossOnAverage) {
  double global_total = 0, personal_total = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    GeneratorSpec spec;
    spec.num_recruiters = 10;
    spec.queries_per_recruiter = 10;
    spec.candidates_per_query = 20;
    spec.num_ltr_features = 4;
    spec.recruiter_deviation_scale = 1.0;
    spec.seed = seed;
    const GeneratedData data = generate(spec);
    GlmixTrainConfig c;
    c.lambdas = {1.0, 10.0, 10.0};
    c.enabled = {Component::kGlobal};
    global_total += validation_log_loss(train_glmix(data.train, c), data.validation);
    c.enabled = {Component::kGlobal, Component::kRecruiter};
    personal_total += validation_log_loss(train_glmix(data.train, c), data.validation);
  }
  EXPECT_LE(personal_total, global_total);
}

class StoreTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("treemix_store_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
            "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path dir_;
};

TEST_F(StoreTest, RoundTripsBitExactly) {
  GlmixModel m;
  m.fixed = coefficients(0.1 + 0.2, -1e-300);
  m.random_effects[EntityKind::kRecruiter]["re/../odd id"] = coefficients(1.0 / 3.0, 2.5);
  m.random_effects[EntityKind::kRecruiter][".hidden"] = coefficients(-7, 0);
  m.random_effects[EntityKind::kContract]["co1"] = coefficients(3, 4);
  m.feature_config[Component::kContract] = NamespaceFilter::only({"ltr", "xgb"});
  StoreManifest manifest{{1, 10, 100}, {3, 47, 1234}};
  save_model_store(dir_, m, manifest);
  const ModelStore back = load_model_store(dir_);
  EXPECT_EQ(back.model, m);
  EXPECT_EQ(back.manifest, manifest);
  EXPECT_TRUE(fs::exists(dir_ / "fixed.json"));
  EXPECT_TRUE(fs::exists(dir_ / "recruiter" / (encode_entity_file_name("re/../odd id") + ".json")));
  // Saving again replaces stale entities.
  m.random_effects[EntityKind::kRecruiter].erase(".hidden");
  save_model_store(dir_, m, manifest);
  EXPECT_EQ(load_model_store(dir_).model, m);
}

TEST_F(StoreTest, EncodingAndDocuments) {
  EXPECT_EQ(store_key(EntityKind::kRecruiter, "re7"), "recruiter/re7");
  for (const std::string id : {"a", "re/1", "..", ".x", "100%", "ü"}) {
    const std::string encoded = encode_entity_file_name(id);
    EXPECT_EQ(encoded.find('/'), std::string::npos);
    EXPECT_NE(encoded.front(), '.');
    EXPECT_EQ(decode_entity_file_name(encoded), id);
  }
  const CoefficientVector c = coefficients(0.5, -2);
  const std::string doc = coefficient_document(c);
  EXPECT_LT(doc.find("intercept"), doc.find("ltr:x"));
  EXPECT_EQ(parse_coefficient_document(doc), c);
  EXPECT_THROW(parse_coefficient_document("[1,2]"), InputError);
  EXPECT_THROW(load_model_store(dir_ / "missing"), IoError);
}

TEST(GridTest, MakeGrid) {
  const std::vector<double> values{1, 10};
  EXPECT_EQ(make_grid(values, {Component::kGlobal}, {}).size(), 2u);
  const auto full = make_grid(values, {Component::kGlobal, Component::kContract,
                                       Component::kRecruiter}, {});
  EXPECT_EQ(full.size(), 8u);
  const auto partial = make_grid(values, {Component::kGlobal}, LambdaTriple{5, 6, 7});
  for (const auto& t : partial) {
    EXPECT_EQ(t.contract, 6);
    EXPECT_EQ(t.recruiter, 7);
  }
}

TEST(GridTest, SinglePointAndTieRule) {
  const Dataset train = small_mixed_dataset(4);
  GlmixTrainConfig base;
  base.outer_passes = 1;
  const std::vector<LambdaTriple> one{{10, 10, 10}};
  const GridSearchResult single = grid_search(train, train, one, base);
  EXPECT_EQ(single.best, one[0]);
  ASSERT_EQ(single.table.size(), 1u);

  // All-negative validation labels tie every point at zero positives.
  std::vector<ImpressionRecord> negatives = train.records();
  for (auto& r : negatives) r.label = 0;
  const Dataset validation(negatives);
  const std::vector<LambdaTriple> grid{{1, 100, 1}, {100, 1, 1}, {10, 10, 10}, {1, 1, 100}};
  const GridSearchResult tie = grid_search(train, validation, grid, base);
  EXPECT_EQ(tie.best, (LambdaTriple{100, 1, 1}));
  EXPECT_EQ(tie.best_metric, 0.0);
}

}  // namespace
}  // namespace treemix
