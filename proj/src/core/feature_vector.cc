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

#include "treemix/core/feature_vector.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "treemix/core/errors.h"

namespace treemix {
namespace {

constexpr std::string_view kInterceptName = "intercept";

void check_finite(const FeatureKey& key, double value) {
  if (!std::isfinite(value)) {
    throw std::invalid_argument("non-finite value for feature " + key.str());
  }
}

}  // namespace

std::string FeatureKey::str() const {
  if (ns.empty()) return name;
  return ns + ":" + name;
}

bool FeatureKey::is_intercept() const {
  return ns.empty() && name == kInterceptName;
}

FeatureKey FeatureKey::parse(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    if (text == kInterceptName) return intercept();
    throw InputError("feature key '" + std::string(text) +
                     "' is not of the form namespace:name");
  }
  if (colon == 0 || colon + 1 == text.size()) {
    throw InputError("feature key '" + std::string(text) +
                     "' has an empty namespace or name");
  }
  return FeatureKey{std::string(text.substr(0, colon)),
                    std::string(text.substr(colon + 1))};
}

FeatureKey FeatureKey::intercept() {
  return FeatureKey{"", std::string(kInterceptName)};
}

NamespaceFilter NamespaceFilter::only(std::set<std::string> namespaces) {
  NamespaceFilter filter;
  filter.all_ = false;
  filter.namespaces_ = std::move(namespaces);
  return filter;
}

bool NamespaceFilter::admits(const FeatureKey& key) const {
  return all_ || key.ns.empty() || namespaces_.count(key.ns) > 0;
}

template <class Tag>
KeyedVector<Tag> KeyedVector<Tag>::from_entries(std::vector<Entry> entries) {
  std::sort(entries.begin(), entries.end(),
            [](const Entry& a, const Entry& b) { return a.first < b.first; });
  for (std::size_t i = 0; i < entries.size(); ++i) {
    check_finite(entries[i].first, entries[i].second);
    if (i > 0 && entries[i].first == entries[i - 1].first) {
      throw std::invalid_argument("duplicate feature key " +
                                  entries[i].first.str());
    }
  }
  KeyedVector out;
  out.entries_ = std::move(entries);
  return out;
}

template <class Tag>
void KeyedVector<Tag>::insert(FeatureKey key, double value) {
  check_finite(key, value);
  auto it = std::lower_bound(
      entries_.begin(), entries_.end(), key,
      [](const Entry& e, const FeatureKey& k) { return e.first < k; });
  if (it != entries_.end() && it->first == key) {
    throw std::invalid_argument("duplicate feature key " + key.str());
  }
  entries_.emplace(it, std::move(key), value);
}

template <class Tag>
void KeyedVector<Tag>::set(FeatureKey key, double value) {
  check_finite(key, value);
  auto it = std::lower_bound(
      entries_.begin(), entries_.end(), key,
      [](const Entry& e, const FeatureKey& k) { return e.first < k; });
  if (it != entries_.end() && it->first == key) {
    it->second = value;
  } else {
    entries_.emplace(it, std::move(key), value);
  }
}

template <class Tag>
const double* KeyedVector<Tag>::find(const FeatureKey& key) const {
  auto it = std::lower_bound(
      entries_.begin(), entries_.end(), key,
      [](const Entry& e, const FeatureKey& k) { return e.first < k; });
  if (it == entries_.end() || !(it->first == key)) return nullptr;
  return &it->second;
}

template <class Tag>
double KeyedVector<Tag>::get(const FeatureKey& key) const {
  const double* value = find(key);
  return value == nullptr ? 0.0 : *value;
}

template <class Tag>
KeyedVector<Tag> KeyedVector<Tag>::restricted(
    const NamespaceFilter& filter) const {
  KeyedVector out;
  for (const auto& entry : entries_) {
    if (filter.admits(entry.first)) out.entries_.push_back(entry);
  }
  return out;
}

template class KeyedVector<FeatureTag>;
template class KeyedVector<CoefficientTag>;

double dot(const FeatureVector& a, const CoefficientVector& b) {
  // Merge over the two sorted entry lists.
  double sum = 0.0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (ia->first < ib->first) {
      ++ia;
    } else if (ib->first < ia->first) {
      ++ib;
    } else {
      sum += ia->second * ib->second;
      ++ia;
      ++ib;
    }
  }
  if (!std::isfinite(sum)) {
    throw std::domain_error("non-finite dot product; corrupt input");
  }
  return sum;
}

}  // namespace treemix
