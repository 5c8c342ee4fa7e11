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

#include "treemix/glmix/model_store.h"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "treemix/core/errors.h"

namespace treemix {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr int kStoreVersion = 1;
constexpr EntityKind kKinds[] = {EntityKind::kRecruiter, EntityKind::kContract};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

json filter_to_json(const NamespaceFilter& filter) {
  if (filter.admits_all()) return "*";
  return json(filter.namespaces());
}

NamespaceFilter filter_from_json(const json& j) {
  if (j.is_string() && j.get<std::string>() == "*") return NamespaceFilter::all();
  return NamespaceFilter::only(j.get<std::set<std::string>>());
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  return -1;
}

}  // namespace

std::string store_key(EntityKind kind, const std::string& entity_id) {
  return std::string(to_string(kind)) + "/" + entity_id;
}

std::string encode_entity_file_name(const std::string& entity_id) {
  std::string out;
  for (std::size_t i = 0; i < entity_id.size(); ++i) {
    const unsigned char c = static_cast<unsigned char>(entity_id[i]);
    const bool plain = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') ||
                       (c >= '0' && c <= '9') || c == '_' || c == '-' ||
                       (c == '.' && i > 0);
    if (plain) {
      out.push_back(static_cast<char>(c));
    } else {
      char buffer[4];
      std::snprintf(buffer, sizeof(buffer), "%%%02X", c);
      out += buffer;
    }
  }
  return out;
}

std::string decode_entity_file_name(const std::string& file_stem) {
  std::string out;
  for (std::size_t i = 0; i < file_stem.size(); ++i) {
    if (file_stem[i] != '%') {
      out.push_back(file_stem[i]);
      continue;
    }
    if (i + 2 >= file_stem.size() || hex_value(file_stem[i + 1]) < 0 ||
        hex_value(file_stem[i + 2]) < 0) {
      throw InputError("bad percent-encoding in store file name " + file_stem);
    }
    out.push_back(static_cast<char>(hex_value(file_stem[i + 1]) * 16 +
                                    hex_value(file_stem[i + 2])));
    i += 2;
  }
  return out;
}

std::string coefficient_document(const CoefficientVector& coefficients) {
  json doc = json::object();
  for (const auto& [key, value] : coefficients) doc[key.str()] = value;
  return doc.dump(1) + "\n";
}

CoefficientVector parse_coefficient_document(const std::string& text) {
  try {
    const json doc = json::parse(text);
    if (!doc.is_object()) throw InputError("coefficient document is not an object");
    std::vector<CoefficientVector::Entry> entries;
    for (const auto& [key, value] : doc.items()) {
      entries.emplace_back(FeatureKey::parse(key), value.get<double>());
    }
    return CoefficientVector::from_entries(std::move(entries));
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed coefficient document: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw InputError(std::string("malformed coefficient document: ") + e.what());
  }
}

void save_model_store(const fs::path& dir, const GlmixModel& model,
                      const StoreManifest& manifest) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create store " + dir.string() + ": " + ec.message());
  for (EntityKind kind : kKinds) {
    fs::remove_all(dir / std::string(to_string(kind)), ec);
  }

  json feature_config = json::object();
  for (const auto& [component, filter] : model.feature_config) {
    feature_config[std::string(to_string(component))] = filter_to_json(filter);
  }
  json entities = json::object();
  for (EntityKind kind : kKinds) {
    auto it = model.random_effects.find(kind);
    if (it == model.random_effects.end()) continue;
    entities[std::string(to_string(kind))] = it->second.size();
    const fs::path kind_dir = dir / std::string(to_string(kind));
    fs::create_directories(kind_dir, ec);
    if (ec) throw IoError("cannot create " + kind_dir.string() + ": " + ec.message());
    for (const auto& [id, coefficients] : it->second) {
      write_file(kind_dir / (encode_entity_file_name(id) + ".json"),
                 coefficient_document(coefficients));
    }
  }
  write_file(dir / "fixed.json", coefficient_document(model.fixed));

  const json doc = {
      {"version", kStoreVersion},
      {"feature_config", std::move(feature_config)},
      {"lambdas",
       {{"global", manifest.lambdas.global},
        {"contract", manifest.lambdas.contract},
        {"recruiter", manifest.lambdas.recruiter}}},
      {"training_window",
       {{"first_day", manifest.window.first_day},
        {"last_day", manifest.window.last_day},
        {"num_records", manifest.window.num_records}}},
      {"entities", std::move(entities)}};
  write_file(dir / "manifest.json", doc.dump(1) + "\n");
}

ModelStore load_model_store(const fs::path& dir) {
  ModelStore store;
  json doc;
  try {
    doc = json::parse(read_file(dir / "manifest.json"));
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed store manifest: ") + e.what());
  }
  try {
    if (doc.at("version").get<int>() != kStoreVersion) {
      throw InputError("unsupported model store version");
    }
    for (const auto& [name, filter] : doc.at("feature_config").items()) {
      store.model.feature_config[parse_component(name)] = filter_from_json(filter);
    }
    const auto& lambdas = doc.at("lambdas");
    store.manifest.lambdas = LambdaTriple{lambdas.at("global").get<double>(),
                                          lambdas.at("contract").get<double>(),
                                          lambdas.at("recruiter").get<double>()};
    const auto& window = doc.at("training_window");
    store.manifest.window.first_day = window.at("first_day").get<int>();
    store.manifest.window.last_day = window.at("last_day").get<int>();
    store.manifest.window.num_records = window.at("num_records").get<std::size_t>();

    store.model.fixed = parse_coefficient_document(read_file(dir / "fixed.json"));
    for (const auto& [kind_name, count] : doc.at("entities").items()) {
      const EntityKind kind = parse_entity_kind(kind_name);
      auto& entities = store.model.random_effects[kind];
      const fs::path kind_dir = dir / kind_name;
      if (fs::is_directory(kind_dir)) {
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(kind_dir)) {
          if (entry.path().extension() == ".json") files.push_back(entry.path());
        }
        std::sort(files.begin(), files.end());
        for (const auto& file : files) {
          entities.emplace(decode_entity_file_name(file.stem().string()),
                           parse_coefficient_document(read_file(file)));
        }
      }
      if (entities.size() != count.get<std::size_t>()) {
        throw InputError("store lists " + std::to_string(count.get<std::size_t>()) +
                         " " + kind_name + " entities but holds " +
                         std::to_string(entities.size()));
      }
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed store manifest: ") + e.what());
  } catch (const ConfigError& e) {
    throw InputError(std::string("malformed store manifest: ") + e.what());
  }
  return store;
}

}  // namespace treemix
