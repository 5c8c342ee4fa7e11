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

#ifndef TREEMIX_CORE_DATASET_H_
#define TREEMIX_CORE_DATASET_H_

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "treemix/core/feature_vector.h"

namespace treemix {

enum class EntityKind { kRecruiter, kContract };

std::string_view to_string(EntityKind kind);
// Accepts "recruiter" or "contract".
EntityKind parse_entity_kind(std::string_view text);

// One candidate shown for one search request.
struct ImpressionRecord {
  std::string request_id;
  std::string context_id;
  std::string recruiter_id;
  std::string candidate_id;
  std::string contract_id;
  int label = 0;  // 1: messaged and responded positively
  FeatureVector features;

  const std::string& entity_id(EntityKind kind) const;
  bool operator==(const ImpressionRecord&) const = default;
};

// Dense column numbering of every feature key in a dataset, lexicographic.
class FeatureIndex {
 public:
  FeatureIndex() = default;
  explicit FeatureIndex(std::vector<FeatureKey> sorted_unique_keys);

  // -1 when the key is unknown.
  int column(const FeatureKey& key) const;
  const FeatureKey& key(int column) const { return keys_[column]; }
  std::size_t size() const { return keys_.size(); }
  const std::vector<FeatureKey>& keys() const { return keys_; }

  bool operator==(const FeatureIndex&) const = default;

 private:
  std::vector<FeatureKey> keys_;
};

// Immutable ordered collection of impressions. Construction validates every
// record and adds intercept = 1 to any record lacking it.
class Dataset {
 public:
  Dataset();
  explicit Dataset(std::vector<ImpressionRecord> records);

  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  const ImpressionRecord& operator[](std::size_t i) const { return records_[i]; }
  const std::vector<ImpressionRecord>& records() const { return records_; }
  const FeatureIndex& feature_index() const { return feature_index_; }

  Dataset subset(std::span<const std::size_t> rows) const;
  static Dataset concat(std::span<const Dataset> parts);

  bool operator==(const Dataset&) const = default;

 private:
  std::vector<ImpressionRecord> records_;
  FeatureIndex feature_index_;
};

// Parses the JSON-lines impression format. Throws InputError carrying the
// 1-based line number on malformed lines.
Dataset parse_dataset(std::istream& in);
// Throws IoError if the file cannot be opened.
Dataset load_dataset(const std::filesystem::path& path);

// Writes the JSON-lines format; the implicit intercept is omitted.
void write_dataset(std::ostream& out, const Dataset& dataset);
void save_dataset(const std::filesystem::path& path, const Dataset& dataset);

// Entity id -> record indices (ascending). Groups partition [0, n).
std::map<std::string, std::vector<std::size_t>> group_by_entity(
    const Dataset& dataset, EntityKind kind);

struct QueryGroup {
  std::string request_id;
  std::vector<std::size_t> rows;
};

// Groups records by request_id, in order of first appearance.
std::vector<QueryGroup> group_by_request(const Dataset& dataset);

}  // namespace treemix

#endif  // TREEMIX_CORE_DATASET_H_
