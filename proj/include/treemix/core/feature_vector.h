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

#ifndef TREEMIX_CORE_FEATURE_VECTOR_H_
#define TREEMIX_CORE_FEATURE_VECTOR_H_

#include <compare>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace treemix {

inline constexpr std::string_view kLtrNamespace = "ltr";
inline constexpr std::string_view kScoreNamespace = "xgb";
inline constexpr std::string_view kInteractionNamespace = "int";

// Canonical identity of a feature. Text form is "namespace:name"; the
// intercept has an empty namespace and prints as plain "intercept".
struct FeatureKey {
  std::string ns;
  std::string name;

  auto operator<=>(const FeatureKey&) const = default;
  bool operator==(const FeatureKey&) const = default;

  std::string str() const;
  bool is_intercept() const;

  // Splits on the first ':'. Throws InputError on an empty namespace or name,
  // or on a bare name other than "intercept".
  static FeatureKey parse(std::string_view text);
  static FeatureKey intercept();
};

// Set of namespaces a model component may use. The intercept is admitted by
// every filter.
class NamespaceFilter {
 public:
  NamespaceFilter() = default;  // admits everything
  static NamespaceFilter all() { return {}; }
  static NamespaceFilter only(std::set<std::string> namespaces);

  bool admits(const FeatureKey& key) const;
  bool admits_all() const { return all_; }
  const std::set<std::string>& namespaces() const { return namespaces_; }

  bool operator==(const NamespaceFilter&) const = default;

 private:
  bool all_ = true;
  std::set<std::string> namespaces_;
};

// Sparse map from FeatureKey to a finite real, stored sorted by key. Absent
// keys read as zero. Tag distinguishes feature vectors from coefficient
// vectors at the type level.
template <class Tag>
class KeyedVector {
 public:
  using Entry = std::pair<FeatureKey, double>;
  using const_iterator = typename std::vector<Entry>::const_iterator;

  KeyedVector() = default;

  // Throws std::invalid_argument on duplicate keys or non-finite values.
  static KeyedVector from_entries(std::vector<Entry> entries);

  // Throws std::invalid_argument if the key is already present.
  void insert(FeatureKey key, double value);
  // Inserts or overwrites.
  void set(FeatureKey key, double value);

  double get(const FeatureKey& key) const;
  const double* find(const FeatureKey& key) const;
  bool contains(const FeatureKey& key) const { return find(key) != nullptr; }

  KeyedVector restricted(const NamespaceFilter& filter) const;

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const_iterator begin() const { return entries_.begin(); }
  const_iterator end() const { return entries_.end(); }
  const std::vector<Entry>& entries() const { return entries_; }

  bool operator==(const KeyedVector&) const = default;

 private:
  std::vector<Entry> entries_;
};

struct FeatureTag;
struct CoefficientTag;
using FeatureVector = KeyedVector<FeatureTag>;
using CoefficientVector = KeyedVector<CoefficientTag>;

extern template class KeyedVector<FeatureTag>;
extern template class KeyedVector<CoefficientTag>;

// Sum over shared keys of a[k] * b[k]. Throws std::domain_error when the
// result is not finite.
double dot(const FeatureVector& a, const CoefficientVector& b);

}  // namespace treemix

#endif  // TREEMIX_CORE_FEATURE_VECTOR_H_
