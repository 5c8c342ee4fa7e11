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

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include <gtest/gtest.h>

#include "treemix/core/dataset.h"
#include "treemix/core/errors.h"
#include "treemix/core/feature_vector.h"
#include "treemix/core/logistic.h"
#include "treemix/core/parallel.h"
#include "treemix/core/ranked_list.h"

namespace treemix {
namespace {

FeatureKey key(const std::string& text) { return FeatureKey::parse(text); }

FeatureVector fv(std::vector<std::pair<std::string, double>> entries) {
  std::vector<FeatureVector::Entry> out;
  for (auto& [k, v] : entries) out.emplace_back(key(k), v);
  return FeatureVector::from_entries(std::move(out));
}

CoefficientVector cv(std::vector<std::pair<std::string, double>> entries) {
  std::vector<CoefficientVector::Entry> out;
  for (auto& [k, v] : entries) out.emplace_back(key(k), v);
  return CoefficientVector::from_entries(std::move(out));
}

ImpressionRecord record(const std::string& request, const std::string& recruiter,
                        const std::string& candidate, int label = 0) {
  ImpressionRecord r;
  r.request_id = request;
  r.context_id = "ctx";
  r.recruiter_id = recruiter;
  r.candidate_id = candidate;
  r.contract_id = "co";
  r.label = label;
  r.features = fv({{"ltr:a", 1.0}});
  return r;
}

TEST(FeatureKeyTest, ParsesNamespaceAndName) {
  EXPECT_EQ(key("ltr:f1"), (FeatureKey{"ltr", "f1"}));
  EXPECT_EQ(key("int:t3:l2"), (FeatureKey{"int", "t3:l2"}));
  EXPECT_EQ(key("intercept"), FeatureKey::intercept());
  EXPECT_EQ(FeatureKey::intercept().str(), "intercept");
  EXPECT_EQ(key("xgb:score").str(), "xgb:score");
  EXPECT_THROW(key("nonamespace"), InputError);
  EXPECT_THROW(key(":x"), InputError);
  EXPECT_THROW(key("ltr:"), InputError);
}

TEST(FeatureVectorTest, RejectsDuplicatesAndNonFinite) {
  EXPECT_THROW(fv({{"ltr:a", 1}, {"ltr:a", 2}}), std::invalid_argument);
  EXPECT_THROW(fv({{"ltr:a", std::nan("")}}), std::invalid_argument);
  EXPECT_THROW(fv({{"ltr:a", INFINITY}}), std::invalid_argument);
  FeatureVector v = fv({{"ltr:b", 2}, {"ltr:a", 1}});
  EXPECT_THROW(v.insert(key("ltr:a"), 3), std::invalid_argument);
  v.set(key("ltr:a"), 3);
  EXPECT_EQ(v.get(key("ltr:a")), 3);
  EXPECT_EQ(v.get(key("ltr:zzz")), 0);
  EXPECT_TRUE(std::is_sorted(v.begin(), v.end()));
}

TEST(FeatureVectorTest, RestrictedKeepsInterceptAndAdmittedNamespaces) {
  FeatureVector v = fv({{"ltr:a", 1}, {"xgb:score", 2}, {"int:t0:l1", 1}, {"intercept", 1}});
  FeatureVector r = v.restricted(NamespaceFilter::only({"ltr"}));
  EXPECT_EQ(r, fv({{"ltr:a", 1}, {"intercept", 1}}));
  EXPECT_EQ(v.restricted(NamespaceFilter::all()), v);
}

TEST(DotTest, Examples) {
  EXPECT_EQ(dot(fv({{"ltr:x", 2}}), cv({{"ltr:x", 3}})), 6.0);
  EXPECT_EQ(dot(fv({{"ltr:x", 2}}), cv({{"ltr:y", 3}})), 0.0);
  EXPECT_EQ(dot(fv({{"ltr:x", 1}, {"ltr:y", -1}}), cv({{"ltr:x", 0.5}, {"ltr:y", 0.5}, {"ltr:z", 9}})),
            0.0);
}

TEST(DotTest, OverflowIsAnError) {
  EXPECT_THROW(dot(fv({{"ltr:x", 1e300}}), cv({{"ltr:x", 1e300}})), std::domain_error);
}

TEST(DotTest, BilinearOnRandomSparseVectors) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> value(-3, 3);
  std::uniform_int_distribution<int> pick(0, 19);
  auto random_entries = [&] {
    std::map<std::string, double> m;
    for (int i = 0; i < 8; ++i) m["ltr:f" + std::to_string(pick(rng))] = value(rng);
    return m;
  };
  for (int trial = 0; trial < 200; ++trial) {
    auto a = random_entries(), b = random_entries(), c = random_entries();
    std::map<std::string, double> bc = b;
    for (auto& [k, v] : c) bc[k] += v;
    auto to_fv = [](const std::map<std::string, double>& m) {
      std::vector<FeatureVector::Entry> e;
      for (auto& [k, v] : m) e.emplace_back(FeatureKey::parse(k), v);
      return FeatureVector::from_entries(e);
    };
    auto to_cv = [](const std::map<std::string, double>& m) {
      std::vector<CoefficientVector::Entry> e;
      for (auto& [k, v] : m) e.emplace_back(FeatureKey::parse(k), v);
      return CoefficientVector::from_entries(e);
    };
    const FeatureVector x = to_fv(a);
    EXPECT_NEAR(dot(x, to_cv(bc)), dot(x, to_cv(b)) + dot(x, to_cv(c)), 1e-9);
  }
}

TEST(LogisticTest, LogitAndSigmoid) {
  EXPECT_EQ(logit(0.5), 0.0);
  EXPECT_EQ(sigmoid(0.0), 0.5);
  EXPECT_NEAR(sigmoid(logit(0.9)), 0.9, 1e-12);
  EXPECT_THROW(logit(0.0), std::domain_error);
  EXPECT_THROW(logit(1.0), std::domain_error);
  for (double p = 1e-9; p < 1.0; p *= 1.7) {
    EXPECT_NEAR(sigmoid(logit(p)), p, 1e-12) << p;
    EXPECT_NEAR(sigmoid(logit(1 - p)), 1 - p, 1e-12) << p;
  }
  EXPECT_EQ(sigmoid(-1000.0), 0.0);
  EXPECT_EQ(sigmoid(1000.0), 1.0);
}

TEST(LogisticTest, LossMatchesDefinition) {
  for (double m : {-5.0, -0.3, 0.0, 0.7, 4.0}) {
    EXPECT_NEAR(logistic_loss(m, 1), std::log(1 + std::exp(-m)), 1e-12);
    EXPECT_NEAR(logistic_loss(m, 0), std::log(1 + std::exp(m)), 1e-12);
  }
  EXPECT_NEAR(logistic_loss(-800.0, 1), 800.0, 1e-9);
  EXPECT_NEAR(log1p_exp(800.0), 800.0, 1e-9);
}

TEST(DatasetTest, ParsesThreeLines) {
  std::istringstream in(
      R"({"request_id":"q1","context_id":"c","recruiter_id":"A","candidate_id":"x","contract_id":"k","label":1,"features":{"ltr:b":2,"ltr:a":1}}
{"request_id":"q1","context_id":"c","recruiter_id":"B","candidate_id":"y","contract_id":"k","label":0,"features":{}}
{"request_id":"q2","context_id":"c","recruiter_id":"A","candidate_id":"z","contract_id":"k","label":0,"features":{"ltr:c":-1.5}}
)");
  const Dataset d = parse_dataset(in);
  ASSERT_EQ(d.size(), 3u);
  EXPECT_EQ(d[0].label, 1);
  EXPECT_EQ(d[0].features.get(FeatureKey::intercept()), 1.0);
  EXPECT_EQ(d[1].features.size(), 1u);
  EXPECT_EQ(d.feature_index().size(), 4u);  // a, b, c, intercept
  EXPECT_EQ(d.feature_index().column(key("ltr:a")), 1);
  EXPECT_EQ(d.feature_index().column(key("ltr:zzz")), -1);
  EXPECT_TRUE(std::is_sorted(d.feature_index().keys().begin(), d.feature_index().keys().end()));
}

TEST(DatasetTest, EmptyInputHasOnlyTheIntercept) {
  std::istringstream in("");
  const Dataset d = parse_dataset(in);
  EXPECT_EQ(d.size(), 0u);
  EXPECT_EQ(d.feature_index().size(), 1u);
  EXPECT_EQ(d.feature_index().key(0), FeatureKey::intercept());
}

std::size_t error_line(const std::string& text) {
  std::istringstream in(text);
  try {
    parse_dataset(in);
  } catch (const InputError& e) {
    return e.line();
  }
  return 0;
}

TEST(DatasetTest, SchemaErrorsCarryTheLineNumber) {
  const std::string good =
      R"({"request_id":"q","context_id":"c","recruiter_id":"r","candidate_id":"a","contract_id":"k","label":0,"features":{}})";
  EXPECT_EQ(error_line(good + "\n" +
                       R"({"request_id":"q","context_id":"c","recruiter_id":"r","candidate_id":"b","contract_id":"k","label":2,"features":{}})"),
            2u);
  EXPECT_EQ(error_line(good + "\n" + good + "\n" +
                       R"({"request_id":"q","context_id":"c","recruiter_id":"r","candidate_id":"b","contract_id":"k","label":0,"features":{"ltr:a":1,"ltr:a":2}})"),
            3u);
  EXPECT_EQ(error_line("{not json"), 1u);
  EXPECT_EQ(error_line(R"({"request_id":"","context_id":"c","recruiter_id":"r","candidate_id":"b","contract_id":"k","label":0,"features":{}})"),
            1u);
  EXPECT_EQ(error_line(R"({"request_id":"q","context_id":"c","recruiter_id":"r","candidate_id":"b","contract_id":"k","label":0,"features":{"ltr:a":"x"}})"),
            1u);
  EXPECT_EQ(error_line(R"({"request_id":"q","context_id":"c","recruiter_id":"r","candidate_id":"b","contract_id":"k","label":0,"features":{"intercept":2}})"),
            1u);
}

TEST(DatasetTest, WriteThenParseRoundTrips) {
  std::vector<ImpressionRecord> records{record("q1", "A", "x", 1), record("q1", "B", "y", 0)};
  records[1].features = fv({{"ltr:a", 0.1}, {"xgb:score", -2.5e-7}, {"int:t0:l3", 1}});
  const Dataset d(records);
  std::ostringstream out;
  write_dataset(out, d);
  EXPECT_EQ(out.str().find("intercept"), std::string::npos);
  std::istringstream in(out.str());
  const Dataset back = parse_dataset(in);
  EXPECT_EQ(back, d);
  std::ostringstream again;
  write_dataset(again, back);
  EXPECT_EQ(again.str(), out.str());
}

TEST(DatasetTest, LoadMissingFileIsAnIoError) {
  EXPECT_THROW(load_dataset("/nonexistent/treemix/data.jsonl"), IoError);
}

TEST(GroupTest, Examples) {
  const Dataset d({record("q", "A", "1"), record("q", "B", "2"), record("q", "A", "3")});
  const auto groups = group_by_entity(d, EntityKind::kRecruiter);
  ASSERT_EQ(groups.size(), 2u);
  EXPECT_EQ(groups.at("A"), (std::vector<std::size_t>{0, 2}));
  EXPECT_EQ(groups.at("B"), (std::vector<std::size_t>{1}));
  EXPECT_TRUE(group_by_entity(Dataset(), EntityKind::kRecruiter).empty());
  const auto single = group_by_entity(d, EntityKind::kContract);
  ASSERT_EQ(single.size(), 1u);
  EXPECT_EQ(single.at("co").size(), 3u);
}

TEST(GroupTest, GroupsPartitionRandomDatasets) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<ImpressionRecord> records;
    const int n = static_cast<int>(rng() % 40);
    for (int i = 0; i < n; ++i) {
      records.push_back(record("q" + std::to_string(rng() % 5), "r" + std::to_string(rng() % 6),
                               "c" + std::to_string(i)));
    }
    const Dataset d(records);
    for (EntityKind kind : {EntityKind::kRecruiter, EntityKind::kContract}) {
      std::vector<std::size_t> all;
      for (const auto& [id, rows] : group_by_entity(d, kind)) {
        for (std::size_t r : rows) {
          EXPECT_EQ(d[r].entity_id(kind), id);
          all.push_back(r);
        }
      }
      std::sort(all.begin(), all.end());
      std::vector<std::size_t> expected(d.size());
      std::iota(expected.begin(), expected.end(), 0);
      EXPECT_EQ(all, expected);
    }
    std::size_t total = 0;
    for (const auto& g : group_by_request(d)) total += g.rows.size();
    EXPECT_EQ(total, d.size());
  }
}

TEST(DatasetTest, SubsetAndConcat) {
  const Dataset d({record("q", "A", "1"), record("q", "B", "2"), record("q", "A", "3")});
  const std::vector<std::size_t> rows{2, 0};
  const Dataset s = d.subset(rows);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0].candidate_id, "3");
  const std::vector<Dataset> parts{s, d};
  EXPECT_EQ(Dataset::concat(parts).size(), 5u);
}

TEST(RankTest, SortsByScoreThenCandidateId) {
  std::vector<RankedItem> items{{"b", 0, 1.0, 0, 0}, {"a", 1, 1.0, 0, 1}, {"c", 2, 2.0, 0, 0}};
  const RankedList list = rank_top_k("q", items, 10);
  ASSERT_EQ(list.items.size(), 3u);
  EXPECT_EQ(list.items[0].candidate_id, "c");
  EXPECT_EQ(list.items[1].candidate_id, "a");
  EXPECT_EQ(list.items[2].candidate_id, "b");
  EXPECT_EQ(rank_top_k("q", items, 2).items.size(), 2u);
  items.push_back({"a", 3, -5.0, 0, 0});
  EXPECT_THROW(rank_top_k("q", items, 10), std::invalid_argument);
}

TEST(ParallelTest, VisitsEveryIndexOnceAndRethrowsLowestFailure) {
  for (int workers : {1, 2, 4}) {
    std::vector<std::atomic<int>> hits(100);
    parallel_for(hits.size(), workers, [&](std::size_t i) { hits[i]++; });
    for (auto& h : hits) EXPECT_EQ(h.load(), 1);
    try {
      parallel_for(50, workers, [](std::size_t i) {
        if (i == 7 || i == 31) throw std::runtime_error(std::to_string(i));
      });
      FAIL() << "expected an exception";
    } catch (const std::runtime_error& e) {
      EXPECT_STREQ(e.what(), "7");
    }
  }
  EXPECT_GE(default_workers(), 1);
}

}  // namespace
}  // namespace treemix
