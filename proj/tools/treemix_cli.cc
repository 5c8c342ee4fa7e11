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

// Command-line front end: data generation, GBDT training, feature
// extraction, GLMix training and grid search, two-level ranking, evaluation,
// the daily pipeline and the variant benchmark.
//
// Exit codes: 0 success, 2 bad arguments or configuration, 3 malformed input,
// 4 training failure, 5 I/O failure, 1 anything else.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "treemix/core/dataset.h"
#include "treemix/core/errors.h"
#include "treemix/core/parallel.h"
#include "treemix/core/ranked_list.h"
#include "treemix/eval/benchmark.h"
#include "treemix/eval/metrics.h"
#include "treemix/gbdt/gbdt.h"
#include "treemix/gbdt/model_io.h"
#include "treemix/glmix/glmix.h"
#include "treemix/glmix/grid_search.h"
#include "treemix/glmix/model_store.h"
#include "treemix/synthgen/generator.h"
#include "treemix/treefeat/tree_features.h"
#include "treemix/twolevel/daily_pipeline.h"
#include "treemix/twolevel/two_level.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace treemix {
namespace {

enum class Format { kText, kCsv, kJsonl };

Format parse_format(const std::string& text) {
  if (text == "text") return Format::kText;
  if (text == "csv") return Format::kCsv;
  if (text == "jsonl") return Format::kJsonl;
  throw ConfigError("--format must be one of text, csv, jsonl (got '" + text + "')");
}

std::string extension(Format format) {
  switch (format) {
    case Format::kText: return ".txt";
    case Format::kCsv: return ".csv";
    case Format::kJsonl: return ".jsonl";
  }
  return ".txt";
}

SplitMode parse_split_mode(const std::string& text) {
  if (text == "exact") return SplitMode::kExact;
  if (text == "quantile") return SplitMode::kQuantile;
  throw ConfigError("--split-mode must be exact or quantile (got '" + text + "')");
}

ScoreTransform parse_score_transform(const std::string& text) {
  if (text == "margin") return ScoreTransform::kMargin;
  if (text == "probability") return ScoreTransform::kProbability;
  throw ConfigError("--score-transform must be margin or probability (got '" + text + "')");
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string part;
  std::istringstream in(text);
  while (std::getline(in, part, sep)) parts.push_back(part);
  return parts;
}

double parse_number(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const double value = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return value;
  } catch (const std::exception&) {
    throw ConfigError(what + ": '" + text + "' is not a number");
  }
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> values;
  for (const auto& part : split(text, ',')) values.push_back(parse_number(part, "--grid"));
  if (values.empty()) throw ConfigError("--grid must list at least one value");
  for (double v : values) {
    if (!(v > 0.0)) throw ConfigError("--grid values must be > 0");
  }
  return values;
}

std::vector<int> parse_ks(const std::string& text) {
  std::vector<int> ks;
  for (const auto& part : split(text, ',')) {
    const double v = parse_number(part, "--ks");
    if (v < 1 || v != static_cast<int>(v)) throw ConfigError("--ks values must be integers >= 1");
    ks.push_back(static_cast<int>(v));
  }
  if (ks.empty()) throw ConfigError("--ks must list at least one value");
  return ks;
}

std::set<Component> parse_components(const std::string& text) {
  std::set<Component> components;
  for (const auto& part : split(text, ',')) {
    try {
      components.insert(parse_component(part));
    } catch (const std::exception&) {
      throw ConfigError("--components: unknown component '" + part + "'");
    }
  }
  return components;
}

NamespaceFilter parse_namespaces(const std::string& text) {
  if (text == "all") return NamespaceFilter::all();
  std::set<std::string> namespaces;
  for (const auto& part : split(text, ',')) {
    if (part.empty()) throw ConfigError("--features: empty namespace");
    namespaces.insert(part);
  }
  return NamespaceFilter::only(std::move(namespaces));
}

PairInteraction parse_interaction(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() != 3) {
    throw ConfigError("--interaction expects a:b:strength (got '" + text + "')");
  }
  return PairInteraction{static_cast<int>(parse_number(parts[0], "--interaction")),
                         static_cast<int>(parse_number(parts[1], "--interaction")),
                         parse_number(parts[2], "--interaction")};
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + path.parent_path().string());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << content;
  if (!out) throw IoError("failed writing " + path.string());
}

void make_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string());
}

std::string format_double(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", v);
  return buffer;
}

// --- option groups shared by several subcommands ---------------------------

struct GbdtOptions {
  int num_trees = 100;
  int max_depth = 2;
  double learning_rate = 0.1;
  double l2_leaf = 1.0;
  double min_split_gain = 0.0;
  std::string split_mode = "exact";
  int bins = 256;

  void add(CLI::App* app, const std::string& prefix = "") {
    app->add_option("--" + prefix + "num-trees", num_trees, "boosting rounds")
        ->capture_default_str();
    app->add_option("--" + prefix + "max-depth", max_depth, "maximum tree depth")
        ->capture_default_str();
    app->add_option("--" + prefix + "learning-rate", learning_rate, "shrinkage")
        ->capture_default_str();
    app->add_option("--" + prefix + "l2-leaf", l2_leaf, "leaf L2 regularization")
        ->capture_default_str();
    app->add_option("--" + prefix + "min-split-gain", min_split_gain, "gain penalty")
        ->capture_default_str();
    app->add_option("--" + prefix + "split-mode", split_mode, "exact or quantile")
        ->capture_default_str();
    app->add_option("--" + prefix + "bins", bins, "quantile candidates per feature")
        ->capture_default_str();
  }

  GbdtTrainConfig config(std::uint64_t seed) const {
    GbdtTrainConfig c;
    c.num_trees = num_trees;
    c.max_depth = max_depth;
    c.learning_rate = learning_rate;
    c.l2_leaf = l2_leaf;
    c.min_split_gain = min_split_gain;
    c.split_mode = parse_split_mode(split_mode);
    c.bins = bins;
    c.seed = seed;
    c.validate();
    return c;
  }
};

struct GlmixOptions {
  double lambda_global = 100.0;
  double lambda_contract = 100.0;
  double lambda_recruiter = 100.0;
  int outer_passes = 3;
  double tolerance = 1e-6;
  int max_iterations = 100;
  std::string components = "global,contract,recruiter";
  std::string features = "all";

  void add(CLI::App* app) {
    app->add_option("--lambda-global", lambda_global)->capture_default_str();
    app->add_option("--lambda-contract", lambda_contract)->capture_default_str();
    app->add_option("--lambda-recruiter", lambda_recruiter)->capture_default_str();
    app->add_option("--outer-passes", outer_passes, "coordinate descent sweeps")
        ->capture_default_str();
    app->add_option("--tolerance", tolerance, "solver gradient-norm tolerance")
        ->capture_default_str();
    app->add_option("--max-iterations", max_iterations, "solver iteration cap")
        ->capture_default_str();
    app->add_option("--components", components, "comma list of global,contract,recruiter")
        ->capture_default_str();
    app->add_option("--features", features,
                    "namespaces every component may use (comma list, or 'all')")
        ->capture_default_str();
  }

  GlmixTrainConfig config(int workers) const {
    GlmixTrainConfig c;
    c.lambdas = LambdaTriple{lambda_global, lambda_contract, lambda_recruiter};
    c.outer_passes = outer_passes;
    c.solver_tolerance = tolerance;
    c.max_solver_iterations = max_iterations;
    c.enabled = parse_components(components);
    const NamespaceFilter filter = parse_namespaces(features);
    if (!filter.admits_all()) {
      for (Component component : c.enabled) c.feature_config[component] = filter;
    }
    c.workers = workers;
    c.validate();
    return c;
  }
};

// --- report rendering --------------------------------------------------------

struct NamedReport {
  std::string name;
  MetricReport report;
};

std::string render_reports(const std::vector<NamedReport>& reports, const std::vector<int>& ks,
                           Format format) {
  std::ostringstream out;
  auto auc_text = [](const MetricReport& r) {
    return r.auc ? format_double(*r.auc) : std::string("n/a");
  };
  if (format == Format::kJsonl) {
    for (const auto& [name, report] : reports) {
      json row = {{"model", name},
                  {"log_loss", report.log_loss},
                  {"query_count", report.query_count}};
      row["auc"] = report.auc ? json(*report.auc) : json(nullptr);
      for (int k : ks) row["positive_responses@" + std::to_string(k)] = report.positive_responses.at(k);
      out << row.dump() << "\n";
    }
    return out.str();
  }
  const char sep = format == Format::kCsv ? ',' : '\t';
  out << "model";
  for (int k : ks) out << sep << "positive_responses@" << k;
  out << sep << "log_loss" << sep << "auc" << sep << "query_count\n";
  for (const auto& [name, report] : reports) {
    out << name;
    for (int k : ks) out << sep << format_double(report.positive_responses.at(k));
    out << sep << format_double(report.log_loss) << sep << auc_text(report) << sep
        << report.query_count << "\n";
  }
  return out.str();
}

std::string render_rankings(const std::vector<RankedList>& rankings, Format format) {
  std::ostringstream out;
  if (format == Format::kJsonl) {
    write_rankings(out, rankings);
    return out.str();
  }
  const char sep = format == Format::kCsv ? ',' : '\t';
  out << "request_id" << sep << "rank" << sep << "candidate_id" << sep << "l1_score" << sep
      << "l2_score\n";
  for (const auto& list : rankings) {
    for (std::size_t i = 0; i < list.items.size(); ++i) {
      const auto& item = list.items[i];
      out << list.request_id << sep << i + 1 << sep << item.candidate_id << sep
          << format_double(item.l1_score) << sep << format_double(item.score) << "\n";
    }
  }
  return out.str();
}

std::vector<Dataset> load_day_partitions(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && name.starts_with("day-") && name.ends_with(".jsonl")) {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  std::vector<Dataset> days;
  for (const auto& file : files) days.push_back(load_dataset(file));
  return days;
}

// --- the application ------------------------------------------------------------

class Cli {
 public:
  Cli() : app_("treemix: tree interaction features with GLMix re-ranking") {
    app_.set_config("--config", "", "TOML file of option values (flags win)");
    app_.require_subcommand(1);
    app_.fallthrough();  // global options may follow the subcommand
    app_.add_option("--workers", workers_, "worker threads (default: all cores)")
        ->capture_default_str();
    app_.add_option("--seed", seed_, "random seed")->capture_default_str();
    app_.add_option("--format", format_, "text, csv or jsonl")->capture_default_str();
    add_generate();
    add_train_gbdt();
    add_extract();
    add_train_glmix();
    add_grid();
    add_rank();
    add_eval();
    add_pipeline();
    add_benchmark();
  }

  int main(int argc, char** argv) {
    try {
      app_.parse(argc, argv);
    } catch (const CLI::Success& e) {
      return app_.exit(e);
    } catch (const CLI::ParseError& e) {
      app_.exit(e);
      return 2;
    }
    try {
      if (workers_ < 1) throw ConfigError("--workers must be >= 1");
      format_value_ = parse_format(format_);
      dispatch_();
      return 0;
    } catch (const ConfigError& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 2;
    } catch (const InputError& e) {
      std::cerr << "malformed input: " << e.what() << "\n";
      return 3;
    } catch (const TrainingError& e) {
      std::cerr << "training failed: " << e.what() << "\n";
      return 4;
    } catch (const IoError& e) {
      std::cerr << "i/o error: " << e.what() << "\n";
      return 5;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 1;
    }
  }

 private:
  // Registers opts that take effect when sub is chosen; the options are
  // shared by reference with the run function.
  CLI::App* subcommand(const std::string& name, const std::string& description,
                       std::function<void()> run) {
    CLI::App* sub = app_.add_subcommand(name, description);
    sub->callback([this, run, name] {
      dispatch_ = run;
      chosen_ = name;
    });
    return sub;
  }

  // The resolved configuration, written next to every output.
  // Only the global options and those of the chosen subcommand are kept.
  void persist_config(const fs::path& location) const {
    std::istringstream all(app_.config_to_str(true, false));
    std::string resolved;
    std::string line;
    while (std::getline(all, line)) {
      const auto eq = line.find('=');
      const std::string key = line.substr(0, eq);
      if (key.find('.') == std::string::npos || key.starts_with(chosen_ + ".")) {
        resolved += line + "\n";
      }
    }
    write_file(location, resolved);
  }

  static fs::path config_beside(const fs::path& file) {
    return fs::path(file.string() + ".config.toml");
  }

  void emit(const std::optional<fs::path>& path, const std::string& content) const {
    if (path) {
      write_file(*path, content);
      persist_config(config_beside(*path));
    } else {
      std::cout << content;
    }
  }

  // generate ------------------------------------------------------------------
  struct GenerateOptions {
    std::string output;
    int num_recruiters = 20;
    int num_contracts = 8;
    int contracts_per_recruiter = 2;
    int queries_per_recruiter = 10;
    int candidates_per_query = 50;
    int num_features = 8;
    double recruiter_scale = 0.5;
    double contract_scale = 0.3;
    double label_noise = 0.0;
    std::vector<std::string> interactions{"0:1:1.5"};
    int days = 0;
  } gen_;

  void add_generate() {
    CLI::App* sub = subcommand("generate", "write a synthetic dataset with ground truth",
                               [this] { run_generate(); });
    sub->add_option("--output", gen_.output, "output directory")->required();
    sub->add_option("--num-recruiters", gen_.num_recruiters)->capture_default_str();
    sub->add_option("--num-contracts", gen_.num_contracts)->capture_default_str();
    sub->add_option("--contracts-per-recruiter", gen_.contracts_per_recruiter)
        ->capture_default_str();
    sub->add_option("--queries-per-recruiter", gen_.queries_per_recruiter)
        ->capture_default_str();
    sub->add_option("--candidates-per-query", gen_.candidates_per_query)
        ->capture_default_str();
    sub->add_option("--num-features", gen_.num_features)->capture_default_str();
    sub->add_option("--recruiter-scale", gen_.recruiter_scale)->capture_default_str();
    sub->add_option("--contract-scale", gen_.contract_scale)->capture_default_str();
    sub->add_option("--label-noise", gen_.label_noise)->capture_default_str();
    sub->add_option("--interaction", gen_.interactions,
                    "XOR pair term a:b:strength (repeatable)")
        ->capture_default_str();
    sub->add_option("--days", gen_.days,
                    "when > 0, write day-NNN.jsonl partitions instead of splits")
        ->capture_default_str();
  }

  void run_generate() {
    GeneratorSpec spec;
    spec.num_recruiters = gen_.num_recruiters;
    spec.num_contracts = gen_.num_contracts;
    spec.contracts_per_recruiter = gen_.contracts_per_recruiter;
    spec.queries_per_recruiter = gen_.queries_per_recruiter;
    spec.candidates_per_query = gen_.candidates_per_query;
    spec.num_ltr_features = gen_.num_features;
    spec.recruiter_deviation_scale = gen_.recruiter_scale;
    spec.contract_deviation_scale = gen_.contract_scale;
    spec.label_noise = gen_.label_noise;
    for (const auto& text : gen_.interactions) spec.interactions.push_back(parse_interaction(text));
    spec.seed = seed_;
    if (gen_.days < 0) throw ConfigError("--days must be >= 0");
    const fs::path dir = gen_.output;
    make_directory(dir);
    if (gen_.days > 0) {
      GeneratedDays data = generate_days(spec, gen_.days);
      for (std::size_t t = 0; t < data.days.size(); ++t) {
        char name[32];
        std::snprintf(name, sizeof(name), "day-%03zu.jsonl", t);
        save_dataset(dir / name, data.days[t]);
      }
      write_file(dir / "truth.json", serialize_truth(data.truth));
    } else {
      GeneratedData data = generate(spec);
      save_dataset(dir / "train.jsonl", data.train);
      save_dataset(dir / "validation.jsonl", data.validation);
      save_dataset(dir / "test.jsonl", data.test);
      write_file(dir / "truth.json", serialize_truth(data.truth));
    }
    persist_config(dir / "config.toml");
  }

  // train-gbdt ----------------------------------------------------------------
  struct TrainGbdtOptions {
    std::string input;
    std::string output;
    GbdtOptions gbdt;
  } tg_;

  void add_train_gbdt() {
    CLI::App* sub = subcommand("train-gbdt", "train a GBDT on raw features",
                               [this] { run_train_gbdt(); });
    sub->add_option("--input", tg_.input, "training dataset (JSON lines)")->required();
    sub->add_option("--output", tg_.output, "model file")->required();
    tg_.gbdt.add(sub);
  }

  void run_train_gbdt() {
    const GbdtTrainConfig config = tg_.gbdt.config(seed_);
    const Dataset data = load_dataset(tg_.input);
    save_gbdt(tg_.output, train_gbdt(data, config));
    persist_config(config_beside(tg_.output));
  }

  // extract -------------------------------------------------------------------
  struct ExtractOptions {
    std::string input;
    std::string output;
    std::string l1_model;
    std::string l2_model;
    std::string score_transform = "margin";
  } ex_;

  void add_extract() {
    CLI::App* sub = subcommand("extract", "write the dataset enriched with tree features",
                               [this] { run_extract(); });
    sub->add_option("--input", ex_.input, "raw dataset")->required();
    sub->add_option("--output", ex_.output, "enriched dataset")->required();
    sub->add_option("--l1-model", ex_.l1_model, "GBDT providing xgb:score")->required();
    sub->add_option("--l2-model", ex_.l2_model,
                    "GBDT providing int:* features (default: the L1 model)");
    sub->add_option("--score-transform", ex_.score_transform, "margin or probability")
        ->capture_default_str();
  }

  void run_extract() {
    const ScoreTransform transform = parse_score_transform(ex_.score_transform);
    const GbdtModel l1 = load_gbdt(ex_.l1_model);
    const GbdtModel l2 = ex_.l2_model.empty() ? l1 : load_gbdt(ex_.l2_model);
    const Dataset data = load_dataset(ex_.input);
    save_dataset(ex_.output, enrich_dataset(data, l1, l2, transform, workers_));
    persist_config(config_beside(ex_.output));
  }

  // train-glmix ---------------------------------------------------------------
  struct TrainGlmixOptions {
    std::string input;
    std::string output;
    GlmixOptions glmix;
  } tm_;

  void add_train_glmix() {
    CLI::App* sub = subcommand("train-glmix", "train GLMix and write a model store",
                               [this] { run_train_glmix(); });
    sub->add_option("--input", tm_.input, "enriched training dataset")->required();
    sub->add_option("--output", tm_.output, "model store directory")->required();
    tm_.glmix.add(sub);
  }

  void run_train_glmix() {
    const GlmixTrainConfig config = tm_.glmix.config(workers_);
    const Dataset data = load_dataset(tm_.input);
    const GlmixModel model = train_glmix(data, config);
    StoreManifest manifest;
    manifest.lambdas = config.lambdas;
    manifest.window.num_records = data.size();
    save_model_store(tm_.output, model, manifest);
    persist_config(fs::path(tm_.output) / "config.toml");
  }

  // grid ------------------------------------------------------------------------
  struct GridOptions {
    std::string input;
    std::string validation;
    std::string output;
    std::string grid = "1,10,100,1000";
    int k = 25;
    std::string objective = "positive-responses";
    GlmixOptions glmix;
  } gr_;

  void add_grid() {
    CLI::App* sub = subcommand("grid", "grid-search the regularization triple",
                               [this] { run_grid(); });
    sub->add_option("--input", gr_.input, "enriched training dataset")->required();
    sub->add_option("--validation", gr_.validation, "enriched validation dataset")
        ->required();
    sub->add_option("--output", gr_.output,
                    "directory for the metric table and the best model store")
        ->required();
    sub->add_option("--grid", gr_.grid, "lambda values per enabled component")
        ->capture_default_str();
    sub->add_option("--objective", gr_.objective,
                    "positive-responses, neg-log-loss or auc")
        ->capture_default_str();
    sub->add_option("--k", gr_.k, "cutoff of positive-responses")->capture_default_str();
    gr_.glmix.add(sub);
  }

  void run_grid() {
    const GlmixTrainConfig base = gr_.glmix.config(workers_);
    const auto values = parse_grid(gr_.grid);
    RankingObjective objective;
    if (gr_.objective == "positive-responses") {
      objective.kind = RankingObjective::Kind::kPositiveResponses;
    } else if (gr_.objective == "neg-log-loss") {
      objective.kind = RankingObjective::Kind::kNegLogLoss;
    } else if (gr_.objective == "auc") {
      objective.kind = RankingObjective::Kind::kAuc;
    } else {
      throw ConfigError("unknown --objective '" + gr_.objective + "'");
    }
    if (gr_.k < 1) throw ConfigError("--k must be >= 1");
    objective.k = gr_.k;
    const Dataset train = load_dataset(gr_.input);
    const Dataset validation = load_dataset(gr_.validation);
    const auto grid = make_grid(values, base.enabled, base.lambdas);
    const GridSearchResult result = grid_search(train, validation, grid, base, objective);

    std::ostringstream table;
    if (format_value_ == Format::kJsonl) {
      for (const auto& point : result.table) {
        table << json{{"lambda_global", point.lambdas.global},
                      {"lambda_contract", point.lambdas.contract},
                      {"lambda_recruiter", point.lambdas.recruiter},
                      {objective.name(), point.metric},
                      {"best", point.lambdas == result.best}}
                     .dump()
              << "\n";
      }
    } else {
      const char sep = format_value_ == Format::kCsv ? ',' : '\t';
      table << "lambda_global" << sep << "lambda_contract" << sep << "lambda_recruiter" << sep
            << objective.name() << sep << "best\n";
      for (const auto& point : result.table) {
        table << format_double(point.lambdas.global) << sep
              << format_double(point.lambdas.contract) << sep
              << format_double(point.lambdas.recruiter) << sep << format_double(point.metric)
              << sep << (point.lambdas == result.best ? "yes" : "no") << "\n";
      }
    }
    const fs::path dir = gr_.output;
    make_directory(dir);
    write_file(dir / ("grid" + extension(format_value_)), table.str());
    StoreManifest manifest;
    manifest.lambdas = result.best;
    manifest.window.num_records = train.size();
    save_model_store(dir / "model", result.best_model, manifest);
    persist_config(dir / "config.toml");
  }

  // rank ------------------------------------------------------------------------
  struct RankOptions {
    std::string input;
    std::optional<std::string> output;
    std::string model;
    std::string l1_model;
    std::string l2_model;
    std::size_t k1 = 50;
    std::size_t k2 = 10;
    std::string score_transform = "margin";
  } rk_;

  void add_ranking_options(CLI::App* sub, RankOptions& opts) {
    sub->add_option("--input", opts.input, "raw dataset to rank")->required();
    sub->add_option("--model", opts.model, "GLMix model store directory")->required();
    sub->add_option("--l1-model", opts.l1_model, "first-level GBDT")->required();
    sub->add_option("--l2-model", opts.l2_model,
                    "GBDT providing interaction features (default: the L1 model)");
    sub->add_option("--k1", opts.k1, "first-level cutoff")->capture_default_str();
    sub->add_option("--k2", opts.k2, "second-level cutoff")->capture_default_str();
    sub->add_option("--score-transform", opts.score_transform, "margin or probability")
        ->capture_default_str();
  }

  void add_rank() {
    CLI::App* sub = subcommand("rank", "two-level ranking of every request",
                               [this] { run_rank(); });
    add_ranking_options(sub, rk_);
    sub->add_option("--output", rk_.output, "ranking file (default: stdout)");
  }

  struct LoadedPipeline {
    GbdtModel l1;
    GbdtModel l2;
    GlmixModel glmix;
    PipelineConfig config;
  };

  static std::unique_ptr<LoadedPipeline> load_pipeline(const RankOptions& opts) {
    PipelineConfig probe;
    probe.k1 = opts.k1;
    probe.k2 = opts.k2;
    if (probe.k1 < 1 || probe.k2 < 1 || probe.k2 > probe.k1) {
      throw ConfigError("k2 (" + std::to_string(opts.k2) + ") must not exceed k1 (" +
                        std::to_string(opts.k1) + ") and both must be >= 1");
    }
    const ScoreTransform transform = parse_score_transform(opts.score_transform);
    GbdtModel l1 = load_gbdt(opts.l1_model);
    GbdtModel l2 = opts.l2_model.empty() ? l1 : load_gbdt(opts.l2_model);
    auto loaded = std::make_unique<LoadedPipeline>(LoadedPipeline{
        std::move(l1), std::move(l2), load_model_store(opts.model).model, {}});
    loaded->config.k1 = opts.k1;
    loaded->config.k2 = opts.k2;
    loaded->config.l1_model = &loaded->l1;
    loaded->config.l2_interaction_model = &loaded->l2;
    loaded->config.glmix = &loaded->glmix;
    loaded->config.score_transform = transform;
    loaded->config.validate();
    return loaded;
  }

  void run_rank() {
    const auto pipeline = load_pipeline(rk_);
    const Dataset data = load_dataset(rk_.input);
    const auto rankings = rank_two_level(data, pipeline->config, workers_);
    emit(rk_.output ? std::optional<fs::path>(*rk_.output) : std::nullopt,
         render_rankings(rankings, format_value_));
  }

  // eval ------------------------------------------------------------------------
  static RankOptions eval_defaults() {
    RankOptions opts;
    opts.k2 = 25;  // long enough lists for positive-responses@25
    return opts;
  }

  RankOptions ev_ = eval_defaults();
  std::optional<std::string> ev_output_;
  std::string ev_ks_ = "1,5,25";

  void add_eval() {
    CLI::App* sub = subcommand("eval",
                               "metrics of the two-level ranking and of the L1 ranking alone",
                               [this] { run_eval(); });
    add_ranking_options(sub, ev_);
    sub->add_option("--ks", ev_ks_, "cutoffs of positive-responses")->capture_default_str();
    sub->add_option("--output", ev_output_, "report file (default: stdout)");
  }

  void run_eval() {
    const auto ks = parse_ks(ev_ks_);
    const auto pipeline = load_pipeline(ev_);
    const Dataset data = load_dataset(ev_.input);
    const auto two_level = rank_two_level(data, pipeline->config, workers_);
    std::vector<RankedList> l1_only;
    for (const auto& group : group_by_request(data)) {
      l1_only.push_back(rank_l1(data, group.rows, pipeline->l1, ev_.k2));
    }
    const MetricReport baseline = make_report(l1_only, ks);
    const MetricReport candidate = make_report(two_level, ks);
    std::string content = render_reports({{"gbdt-l1", baseline}, {"two-level", candidate}},
                                         ks, format_value_);
    std::map<int, double> lifts;
    try {
      lifts = lift(candidate, baseline);
    } catch (const std::invalid_argument&) {
      // Zero baseline at some k: no lift line.
    }
    if (!lifts.empty() && format_value_ != Format::kJsonl) {
      const char sep = format_value_ == Format::kCsv ? ',' : '\t';
      content += "lift";
      for (int k : ks) content += sep + format_lift(lifts.at(k));
      content += "\n";
    } else if (!lifts.empty()) {
      json row = {{"model", "lift"}};
      for (int k : ks) row["lift@" + std::to_string(k)] = format_lift(lifts.at(k));
      content += row.dump() + "\n";
    }
    emit(ev_output_ ? std::optional<fs::path>(*ev_output_) : std::nullopt, content);
  }

  // pipeline --------------------------------------------------------------------
  struct PipelineOptions {
    std::string input;
    std::string output;
    std::string l1_model;
    std::string l2_model;
    int window_days = 45;
    std::size_t k1 = 50;
    std::size_t k2 = 10;
    std::string ks = "1,5,25";
    GlmixOptions glmix;
  } pl_;

  void add_pipeline() {
    CLI::App* sub = subcommand("pipeline", "daily retraining over day partitions",
                               [this] { run_pipeline(); });
    sub->add_option("--input", pl_.input, "directory of day-NNN.jsonl partitions")
        ->required();
    sub->add_option("--output", pl_.output, "directory for per-day stores and metrics")
        ->required();
    sub->add_option("--l1-model", pl_.l1_model, "first-level GBDT")->required();
    sub->add_option("--l2-model", pl_.l2_model,
                    "GBDT providing interaction features (default: the L1 model)");
    sub->add_option("--window-days", pl_.window_days, "training window")
        ->capture_default_str();
    sub->add_option("--k1", pl_.k1, "first-level cutoff")->capture_default_str();
    sub->add_option("--k2", pl_.k2, "second-level cutoff")->capture_default_str();
    sub->add_option("--ks", pl_.ks, "cutoffs of positive-responses")->capture_default_str();
    pl_.glmix.add(sub);
  }

  void run_pipeline() {
    if (pl_.window_days < 1) throw ConfigError("--window-days must be >= 1");
    if (pl_.k1 < 1 || pl_.k2 < 1 || pl_.k2 > pl_.k1) {
      throw ConfigError("k2 (" + std::to_string(pl_.k2) + ") must not exceed k1 (" +
                        std::to_string(pl_.k1) + ") and both must be >= 1");
    }
    DailyPipelineConfig config;
    config.train_window = pl_.window_days;
    config.glmix = pl_.glmix.config(workers_);
    config.k1 = pl_.k1;
    config.k2 = pl_.k2;
    config.ks = parse_ks(pl_.ks);
    config.workers = workers_;
    const fs::path dir = pl_.output;
    config.store_root = dir;
    const GbdtModel l1 = load_gbdt(pl_.l1_model);
    const GbdtModel l2 = pl_.l2_model.empty() ? l1 : load_gbdt(pl_.l2_model);
    config.l1_model = &l1;
    config.l2_interaction_model = &l2;
    const auto days = load_day_partitions(pl_.input);
    make_directory(dir);
    const auto results = run_daily_pipeline(days, config);
    std::vector<NamedReport> reports;
    for (const auto& day : results) {
      reports.push_back({"day-" + std::to_string(day.day), day.metrics});
    }
    write_file(dir / ("metrics" + extension(format_value_)),
               render_reports(reports, config.ks, format_value_));
    persist_config(dir / "config.toml");
  }

  // benchmark -------------------------------------------------------------------
  static GbdtOptions l2_defaults() {
    GbdtOptions opts;
    opts.num_trees = 20;
    return opts;
  }

  struct BenchmarkOptions {
    std::string input;
    std::string output;
    GbdtOptions l1;
    GbdtOptions l2 = l2_defaults();
    std::string grid = "10,100";
    int outer_passes = 3;
  } bm_;

  void add_benchmark() {
    CLI::App* sub = subcommand("benchmark", "lift table of the seven standard variants",
                               [this] { run_benchmark(); });
    sub->add_option("--input", bm_.input,
                    "directory holding train.jsonl, validation.jsonl and test.jsonl")
        ->required();
    sub->add_option("--output", bm_.output, "directory for benchmark.txt and benchmark.csv")
        ->required();
    bm_.l1.add(sub);
    bm_.l2.add(sub, "l2-");
    sub->add_option("--grid", bm_.grid, "lambda values per enabled component")
        ->capture_default_str();
    sub->add_option("--outer-passes", bm_.outer_passes, "coordinate descent sweeps")
        ->capture_default_str();
  }

  void run_benchmark() {
    BenchmarkConfig config;
    config.l1_gbdt = bm_.l1.config(seed_);
    config.l2_gbdt = bm_.l2.config(seed_);
    config.lambda_grid = parse_grid(bm_.grid);
    config.glmix.outer_passes = bm_.outer_passes;
    config.workers = workers_;
    config.validate();
    const fs::path in = bm_.input;
    const Dataset train = load_dataset(in / "train.jsonl");
    const Dataset validation = load_dataset(in / "validation.jsonl");
    const Dataset test = load_dataset(in / "test.jsonl");
    const auto variants = standard_variants();
    const BenchmarkResult result = benchmark_variants(train, validation, test, variants, config);
    std::ostringstream text;
    std::ostringstream csv;
    write_benchmark_text(text, result);
    write_benchmark_csv(csv, result);
    const fs::path dir = bm_.output;
    make_directory(dir);
    write_file(dir / "benchmark.txt", text.str());
    write_file(dir / "benchmark.csv", csv.str());
    persist_config(dir / "config.toml");
    std::cout << (format_value_ == Format::kCsv ? csv.str() : text.str());
  }

  CLI::App app_;
  int workers_ = default_workers();
  std::uint64_t seed_ = 1;
  std::string format_ = "text";
  Format format_value_ = Format::kText;
  std::function<void()> dispatch_;
  std::string chosen_;
};

}  // namespace
}  // namespace treemix

int main(int argc, char** argv) {
  treemix::Cli cli;
  return cli.main(argc, argv);
}
