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

#include "treemix/core/dataset.h"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <unordered_map>

#include <json.hpp>

#include "treemix/core/errors.h"

namespace treemix {
namespace {

using nlohmann::json;

void validate_record(const ImpressionRecord& r, std::size_t index) {
  auto require = [&](const std::string& value, const char* field) {
    if (value.empty()) {
      throw InputError("record " + std::to_string(index) + ": empty " + field);
    }
  };
  require(r.request_id, "request_id");
  require(r.context_id, "context_id");
  require(r.recruiter_id, "recruiter_id");
  require(r.candidate_id, "candidate_id");
  require(r.contract_id, "contract_id");
  if (r.label != 0 && r.label != 1) {
    throw InputError("record " + std::to_string(index) +
                     ": label must be 0 or 1, got " + std::to_string(r.label));
  }
}

std::string required_string(const json& obj, const char* field) {
  auto it = obj.find(field);
  if (it == obj.end() || !it->is_string()) {
    throw InputError(std::string("missing or non-string field '") + field + "'");
  }
  std::string value = it->get<std::string>();
  if (value.empty()) throw InputError(std::string("empty field '") + field + "'");
  return value;
}

ImpressionRecord parse_record(const std::string& line) {
  // The parser keeps the last of duplicated keys, so duplicates are caught
  // while parsing.
  std::set<std::string> top_keys;
  std::set<std::string> feature_keys;
  std::string duplicate;
  auto on_event = [&](int depth, json::parse_event_t event, json& parsed) {
    if (event == json::parse_event_t::key && depth <= 2 && duplicate.empty()) {
      auto& seen = depth == 1 ? top_keys : feature_keys;
      const auto& key = parsed.get_ref<const std::string&>();
      if (!seen.insert(key).second) duplicate = key;
    }
    return true;
  };
  json obj;
  try {
    obj = json::parse(line, on_event);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("invalid JSON: ") + e.what());
  }
  if (!duplicate.empty()) throw InputError("duplicate key '" + duplicate + "'");
  if (!obj.is_object()) throw InputError("record is not a JSON object");

  ImpressionRecord record;
  record.request_id = required_string(obj, "request_id");
  record.context_id = required_string(obj, "context_id");
  record.recruiter_id = required_string(obj, "recruiter_id");
  record.candidate_id = required_string(obj, "candidate_id");
  record.contract_id = required_string(obj, "contract_id");

  auto label = obj.find("label");
  if (label == obj.end() || !label->is_number_integer()) {
    throw InputError("missing or non-integer field 'label'");
  }
  const auto label_value = label->get<long long>();
  if (label_value != 0 && label_value != 1) {
    throw InputError("label must be 0 or 1, got " + std::to_string(label_value));
  }
  record.label = static_cast<int>(label_value);

  auto features = obj.find("features");
  if (features == obj.end() || !features->is_object()) {
    throw InputError("missing or non-object field 'features'");
  }
  std::vector<FeatureVector::Entry> entries;
  entries.reserve(features->size() + 1);
  for (const auto& [text, value] : features->items()) {
    if (!value.is_number()) {
      throw InputError("feature '" + text + "' is not a number");
    }
    FeatureKey key = FeatureKey::parse(text);
    const double v = value.get<double>();
    if (key.is_intercept() && v != 1.0) {
      throw InputError("reserved feature 'intercept' must equal 1");
    }
    entries.emplace_back(std::move(key), v);
  }
  try {
    record.features = FeatureVector::from_entries(std::move(entries));
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  return record;
}

}  // namespace

std::string_view to_string(EntityKind kind) {
  switch (kind) {
    case EntityKind::kRecruiter:
      return "recruiter";
    case EntityKind::kContract:
      return "contract";
  }
  return "unknown";
}

EntityKind parse_entity_kind(std::string_view text) {
  if (text == "recruiter") return EntityKind::kRecruiter;
  if (text == "contract") return EntityKind::kContract;
  throw ConfigError("unknown entity kind '" + std::string(text) + "'");
}

const std::string& ImpressionRecord::entity_id(EntityKind kind) const {
  return kind == EntityKind::kRecruiter ? recruiter_id : contract_id;
}

FeatureIndex::FeatureIndex(std::vector<FeatureKey> sorted_unique_keys)
    : keys_(std::move(sorted_unique_keys)) {}

int FeatureIndex::column(const FeatureKey& key) const {
  auto it = std::lower_bound(keys_.begin(), keys_.end(), key);
  if (it == keys_.end() || !(*it == key)) return -1;
  return static_cast<int>(it - keys_.begin());
}

Dataset::Dataset() : feature_index_({FeatureKey::intercept()}) {}

Dataset::Dataset(std::vector<ImpressionRecord> records)
    : records_(std::move(records)) {
  const FeatureKey intercept = FeatureKey::intercept();
  std::set<FeatureKey> keys{intercept};
  for (std::size_t i = 0; i < records_.size(); ++i) {
    auto& record = records_[i];
    validate_record(record, i);
    if (const double* v = record.features.find(intercept)) {
      if (*v != 1.0) {
        throw InputError("record " + std::to_string(i) +
                         ": intercept must equal 1");
      }
    } else {
      record.features.insert(intercept, 1.0);
    }
    for (const auto& entry : record.features) keys.insert(entry.first);
  }
  feature_index_ = FeatureIndex(std::vector<FeatureKey>(keys.begin(), keys.end()));
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  std::vector<ImpressionRecord> out;
  out.reserve(rows.size());
  for (std::size_t row : rows) out.push_back(records_.at(row));
  return Dataset(std::move(out));
}

Dataset Dataset::concat(std::span<const Dataset> parts) {
  std::vector<ImpressionRecord> out;
  std::size_t total = 0;
  for (const auto& part : parts) total += part.size();
  out.reserve(total);
  for (const auto& part : parts) {
    out.insert(out.end(), part.records_.begin(), part.records_.end());
  }
  return Dataset(std::move(out));
}

Dataset parse_dataset(std::istream& in) {
  std::vector<ImpressionRecord> records;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      records.push_back(parse_record(line));
    } catch (const InputError& e) {
      throw InputError(e.what(), line_number);
    }
  }
  return Dataset(std::move(records));
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset " + path.string());
  return parse_dataset(in);
}

void write_dataset(std::ostream& out, const Dataset& dataset) {
  for (const auto& record : dataset.records()) {
    json features = json::object();
    for (const auto& [key, value] : record.features) {
      if (key.is_intercept()) continue;
      features[key.str()] = value;
    }
    json obj = {{"request_id", record.request_id},
                {"context_id", record.context_id},
                {"recruiter_id", record.recruiter_id},
                {"candidate_id", record.candidate_id},
                {"contract_id", record.contract_id},
                {"label", record.label},
                {"features", std::move(features)}};
    out << obj.dump() << '\n';
  }
}

void save_dataset(const std::filesystem::path& path, const Dataset& dataset) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write dataset " + path.string());
  write_dataset(out, dataset);
  if (!out) throw IoError("write failed for " + path.string());
}

std::map<std::string, std::vector<std::size_t>> group_by_entity(
    const Dataset& dataset, EntityKind kind) {
  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    groups[dataset[i].entity_id(kind)].push_back(i);
  }
  return groups;
}

std::vector<QueryGroup> group_by_request(const Dataset& dataset) {
  std::vector<QueryGroup> groups;
  std::unordered_map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const auto& id = dataset[i].request_id;
    auto [it, inserted] = position.emplace(id, groups.size());
    if (inserted) groups.push_back(QueryGroup{id, {}});
    groups[it->second].rows.push_back(i);
  }
  return groups;
}

}  // namespace treemix
