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

#ifndef TREEMIX_GLMIX_MODEL_STORE_H_
#define TREEMIX_GLMIX_MODEL_STORE_H_

#include <cstddef>
#include <filesystem>
#include <string>

#include "treemix/core/feature_vector.h"
#include "treemix/glmix/glmix.h"

namespace treemix {

// Directory-backed key-value store of GLMix coefficients:
//   manifest.json            lambdas, feature config, training window
//   fixed.json               key "fixed"
//   <kind>/<entity>.json     key "<kind>/<entity_id>", entity id
//                            percent-encoded in the file name
// Every document is a JSON object of feature key -> coefficient, keys sorted.

struct TrainingWindow {
  int first_day = -1;  // -1 when not produced by the daily pipeline
  int last_day = -1;
  std::size_t num_records = 0;
  bool operator==(const TrainingWindow&) const = default;
};

struct StoreManifest {
  LambdaTriple lambdas;
  TrainingWindow window;
  bool operator==(const StoreManifest&) const = default;
};

struct ModelStore {
  GlmixModel model;
  StoreManifest manifest;
};

std::string store_key(EntityKind kind, const std::string& entity_id);

// Percent-encodes every byte outside [A-Za-z0-9_-] and any leading '.'.
std::string encode_entity_file_name(const std::string& entity_id);
std::string decode_entity_file_name(const std::string& file_stem);

std::string coefficient_document(const CoefficientVector& coefficients);
CoefficientVector parse_coefficient_document(const std::string& text);

// Replaces any previous store contents under dir. Throws IoError.
void save_model_store(const std::filesystem::path& dir, const GlmixModel& model,
                      const StoreManifest& manifest);
// Throws IoError or InputError.
ModelStore load_model_store(const std::filesystem::path& dir);

}  // namespace treemix

#endif  // TREEMIX_GLMIX_MODEL_STORE_H_
