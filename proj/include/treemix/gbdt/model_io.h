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

#ifndef TREEMIX_GBDT_MODEL_IO_H_
#define TREEMIX_GBDT_MODEL_IO_H_

#include <filesystem>
#include <string>
#include <string_view>

#include "treemix/gbdt/gbdt.h"

namespace treemix {

inline constexpr int kGbdtFormatVersion = 1;

// Versioned JSON document {version, config, base_score, feature_schema,
// trees}. Keys are sorted and doubles printed round-trip exact, so
// serialize(deserialize(s)) == s.
std::string serialize_gbdt(const GbdtModel& model);
// Throws InputError on schema violations.
GbdtModel deserialize_gbdt(std::string_view text);

void save_gbdt(const std::filesystem::path& path, const GbdtModel& model);
GbdtModel load_gbdt(const std::filesystem::path& path);

}  // namespace treemix

#endif  // TREEMIX_GBDT_MODEL_IO_H_
