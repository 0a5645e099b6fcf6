// Copyright (c) 2026, the tabembed authors
// SPDX-License-Identifier: Apache-2.0
#include "tabembed/commands.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "tabembed/checkpoint.hpp"

namespace tabembed {

namespace fs = std::filesystem;

TrainConfig RunConfig::to_train_config() const {
  TrainConfig tc;
  tc.model.num.d = d;
  tc.model.num.layers = layers;
  tc.model.num.width = width;
  tc.model.num.cap = cap;
  tc.model.num.buckets = buckets;
  tc.model.num.temperature = temperature;
  tc.model.cat.d = d;
  tc.model.cat.d_hat = d_hat;
  tc.model.cat.layers = layers;
  tc.model.cat.cap = cap;
  tc.model.cat.hash_k = hash_k;
  tc.model.cat.hash_vhat = hash_vhat;
  tc.model.methods.by_field = methods;
  tc.lr = lr;
  tc.batch_size = batch_size;
  tc.patience = patience;
  tc.max_epochs = max_epochs;
  tc.seeds.clear();
  for (std::size_t i = 0; i < seed_count; ++i)
    tc.seeds.push_back(master_seed + i);
  return tc;
}

std::map<std::string, std::string> RunConfig::to_kv() const {
  std::map<std::string, std::string> kv;
  kv["data"] = data_path;
  kv["schema"] = schema_path;
  kv["label"] = label_column;
  kv["synth"] = synth;
  kv["n"] = std::to_string(n);
  kv["v"] = std::to_string(v);
  for (const auto& [field, method] : methods) kv["method." + field] = method;
  kv["d"] = std::to_string(d);
  kv["dhat"] = std::to_string(d_hat);
  kv["layers"] = std::to_string(layers);
  kv["width"] = std::to_string(width);
  kv["cap"] = std::to_string(cap);
  kv["buckets"] = std::to_string(buckets);
  kv["temperature"] = std::to_string(temperature);
  kv["hash_k"] = std::to_string(hash_k);
  kv["hash_vhat"] = std::to_string(hash_vhat);
  kv["lr"] = std::to_string(lr);
  kv["batch"] = std::to_string(batch_size);
  kv["patience"] = std::to_string(patience);
  kv["max_epochs"] = std::to_string(max_epochs);
  kv["seeds"] = std::to_string(seed_count);
  kv["seed"] = std::to_string(master_seed);
  return kv;
}

namespace {

std::size_t parse_size(const std::string& value, const std::string& key) {
  try {
    return static_cast<std::size_t>(std::stoull(value));
  } catch (const std::exception&) {
    throw ConfigError("config: invalid integer for '" + key + "': " + value);
  }
}

double parse_real(const std::string& value, const std::string& key) {
  try {
    return std::stod(value);
  } catch (const std::exception&) {
    throw ConfigError("config: invalid number for '" + key + "': " + value);
  }
}

}  // namespace

void apply_kv(RunConfig& config, const std::string& key,
              const std::string& value) {
  if (key == "data") config.data_path = value;
  else if (key == "schema") config.schema_path = value;
  else if (key == "label") config.label_column = value;
  else if (key == "synth") {
    if (!value.empty() && value != "numeric" && value != "categorical")
      throw ConfigError("config: synth must be 'numeric' or 'categorical'");
    config.synth = value;
  }
  else if (key == "n") config.n = parse_size(value, key);
  else if (key == "v") config.v = parse_size(value, key);
  else if (key.rfind("method.", 0) == 0)
    config.methods[key.substr(7)] = value;
  else if (key == "d") config.d = parse_size(value, key);
  else if (key == "dhat") config.d_hat = parse_size(value, key);
  else if (key == "layers") config.layers = parse_size(value, key);
  else if (key == "width") config.width = parse_size(value, key);
  else if (key == "cap") config.cap = parse_real(value, key);
  else if (key == "buckets") config.buckets = parse_size(value, key);
  else if (key == "temperature") config.temperature = parse_real(value, key);
  else if (key == "hash_k") config.hash_k = parse_size(value, key);
  else if (key == "hash_vhat") config.hash_vhat = parse_size(value, key);
  else if (key == "lr") config.lr = parse_real(value, key);
  else if (key == "batch") config.batch_size = parse_size(value, key);
  else if (key == "patience") config.patience = parse_size(value, key);
  else if (key == "max_epochs") config.max_epochs = parse_size(value, key);
  else if (key == "seeds") config.seed_count = parse_size(value, key);
  else if (key == "seed") config.master_seed = parse_size(value, key);
  else if (key == "out") config.out_dir = value;
  else
    throw ConfigError("config: unknown key '" + key + "'");
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  RunConfig config;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      if (b == std::string::npos) return std::string();
      const auto e = s.find_last_not_of(" \t\r");
      return s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!key.empty()) apply_kv(config, key, value);
  }
  return config;
}

Dataset prepare_dataset(const RunConfig& config) {
  Dataset dataset;
  if (config.synth == "numeric") {
    dataset = synth_numeric(config.n, config.master_seed);
  } else if (config.synth == "categorical") {
    dataset = synth_categorical(config.n, config.v, config.master_seed);
  } else {
    if (config.data_path.empty())
      throw ConfigError("config: either --synth or --data is required");
    if (config.schema_path.empty())
      throw ConfigError("config: --schema is required for CSV input");
    const FeatureSchema schema = parse_schema_file(config.schema_path);
    dataset = load_csv(config.data_path, schema, config.label_column);
  }
  split_dataset(dataset, config.master_seed);
  encode_categoricals(dataset);
  normalize(dataset);
  return dataset;
}

std::string report_to_json(const TrainReport& report) {
  nlohmann::json j;
  j["test_auc_mean"] = report.test_auc_mean;
  j["test_auc_std"] = report.test_auc_std;
  j["embedding_params"] = report.embedding_params;
  j["backbone_params"] = report.backbone_params;
  j["total_params"] = report.total_params;
  j["cache_hits"] = report.cache_hits;
  j["cache_misses"] = report.cache_misses;
  j["wall_clock_seconds"] = report.wall_clock_seconds;
  auto& runs = j["runs"] = nlohmann::json::array();
  for (const RunResult& run : report.runs) {
    nlohmann::json rj;
    rj["seed"] = run.seed;
    rj["best_epoch"] = run.best_epoch;
    rj["best_val_auc"] = run.best_val_auc;
    rj["test_auc"] = run.test_auc;
    auto& epochs = rj["epochs"] = nlohmann::json::array();
    for (const EpochStats& e : run.epochs)
      epochs.push_back({{"epoch", e.epoch},
                        {"train_loss", e.train_loss},
                        {"val_auc", e.val_auc}});
    runs.push_back(std::move(rj));
  }
  return j.dump(2);
}

namespace {
// CSV numbers carry 6 significant digits; the JSON report keeps full
// precision.
std::string fmt6(double v) {
  std::ostringstream out;
  out.precision(6);
  out << v;
  return out.str();
}
}  // namespace

void write_epochs_csv(const std::string& path, const TrainReport& report) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out << "seed,epoch,train_loss,val_auc\n";
  for (const RunResult& run : report.runs)
    for (const EpochStats& e : run.epochs)
      out << run.seed << ',' << e.epoch << ',' << fmt6(e.train_loss) << ','
          << fmt6(e.val_auc) << "\n";
}

TrainReport cmd_train(const RunConfig& config) {
  Dataset dataset = prepare_dataset(config);
  TrainConfig tc = config.to_train_config();
  TrainOutcome outcome = train_model_full(dataset, tc);

  fs::create_directories(config.out_dir);
  {
    std::ofstream out(fs::path(config.out_dir) / "report.json");
    out << report_to_json(outcome.report) << "\n";
  }
  write_epochs_csv((fs::path(config.out_dir) / "epochs.csv").string(),
                   outcome.report);

  auto kv = config.to_kv();
  for (const Field& f : dataset.schema.fields)
    if (f.kind == FieldKind::kCategorical)
      kv["cardinality." + f.name] = std::to_string(f.cardinality);
  Checkpoint ckpt = checkpoint_from_model(*outcome.model, kv,
                                          schema_to_text(dataset.schema));
  save_checkpoint((fs::path(config.out_dir) / "model.ckpt").string(), ckpt);
  return outcome.report;
}

std::vector<ParamReportRow> cmd_param_report(const RunConfig& config,
                                             bool write_csv) {
  FeatureSchema schema;
  if (config.synth == "numeric") {
    schema = parse_schema_text("x1 = numerical:minmax\nx2 = numerical:minmax");
  } else if (config.synth == "categorical") {
    schema = parse_schema_text("c1 = categorical");
    schema.fields[0].cardinality = config.v;
  } else if (!config.schema_path.empty()) {
    schema = parse_schema_file(config.schema_path);
    for (Field& f : schema.fields)
      if (f.kind == FieldKind::kCategorical && f.cardinality == 0)
        f.cardinality = config.v;
  } else {
    throw ConfigError("param-report: --schema or --synth is required");
  }

  MethodMap methods;
  methods.by_field = config.methods;
  std::vector<ParamReportRow> rows;
  for (const Field& field : schema.fields) {
    ParamReportRow row;
    row.field = field.name;
    row.method = methods.resolve(field);
    if (field.kind == FieldKind::kNumerical) {
      const NumMethod m = parse_num_method(row.method);
      row.dim = m == NumMethod::kNone ? 1 : config.d;
      row.params = param_count_numerical(m, config.d, config.layers,
                                         config.width, config.buckets);
      if (m == NumMethod::kDiscretize) row.extra_params = 2 * config.buckets;
    } else {
      const CatMethod m = parse_cat_method(row.method);
      const std::size_t v = field.cardinality ? field.cardinality : config.v;
      switch (m) {
        case CatMethod::kOnehot: row.dim = v; break;
        case CatMethod::kBinary: row.dim = binary_code_length(v); break;
        default: row.dim = config.d;
      }
      row.params = param_count_categorical(m, v, config.d, config.d_hat,
                                           config.hash_k, config.hash_vhat,
                                           config.layers);
      if (m == CatMethod::kHashing) row.extra_params = config.hash_k;
    }
    rows.push_back(std::move(row));
  }

  if (write_csv) {
    fs::create_directories(config.out_dir);
    std::ofstream out(fs::path(config.out_dir) / "params.csv");
    out << "field,method,dim,params,extra_params\n";
    std::size_t total = 0, total_extra = 0;
    for (const ParamReportRow& row : rows) {
      out << row.field << ',' << row.method << ',' << row.dim << ','
          << row.params << ',' << row.extra_params << "\n";
      total += row.params;
      total_extra += row.extra_params;
    }
    out << "total,," << "," << total << ',' << total_extra << "\n";
  }
  return rows;
}

void cmd_precompute(const std::string& checkpoint_path,
                    const std::string& field, const std::string& out_path) {
  const Checkpoint ckpt = load_checkpoint(checkpoint_path);
  FeatureSchema schema = parse_schema_text(ckpt.schema_text);
  RunConfig config;
  for (const auto& [key, value] : ckpt.config) {
    if (key.rfind("cardinality.", 0) == 0) {
      const std::string name = key.substr(12);
      for (Field& f : schema.fields)
        if (f.name == name) f.cardinality = parse_size(value, key);
    } else if (key == "out" || key == "data" || key == "schema") {
      continue;  // paths from the original run are irrelevant here
    } else if (!value.empty()) {
      apply_kv(config, key, value);
    }
  }

  const Field* target = schema.find(field);
  if (!target) throw ConfigError("precompute: unknown field '" + field + "'");
  if (target->kind != FieldKind::kCategorical)
    throw ConfigError("precompute: field '" + field + "' is not categorical");
  MethodMap methods;
  methods.by_field = config.methods;
  if (methods.resolve(*target) != "deep")
    throw ConfigError("precompute: field '" + field +
                      "' does not use the deep method");

  TrainConfig tc = config.to_train_config();
  Rng rng(config.master_seed);
  Model model(schema, tc.model, rng);
  restore_model(model, ckpt);

  std::size_t cat_index = 0;
  for (const Field& f : schema.fields) {
    if (f.kind != FieldKind::kCategorical) continue;
    if (f.name == field) break;
    ++cat_index;
  }
  DeepCatEmbedder* embedder = model.deep_cat_embedder(cat_index);
  if (!embedder)
    throw ConfigError("precompute: field '" + field +
                      "' is not a deep categorical embedder");

  PrecomputedCache cache(*embedder);
  cache.precompute_all();

  std::ofstream out(out_path);
  if (!out) throw DataError("precompute: cannot write " + out_path);
  out << "# param_version=" << ckpt.param_version << "\n";
  const Tensor& table = cache.full_table();
  out.precision(17);
  for (std::size_t r = 0; r < table.rows(); ++r) {
    for (std::size_t c = 0; c < table.cols(); ++c)
      out << (c ? "," : "") << table.at(r, c);
    out << "\n";
  }
}

std::vector<SweepRow> cmd_sweep(const RunConfig& config, SweepAxis axis,
                                std::vector<std::size_t> values) {
  std::vector<std::size_t> unique_values;
  for (std::size_t v : values) {
    if (std::find(unique_values.begin(), unique_values.end(), v) !=
        unique_values.end()) {
      std::cerr << "warning: duplicate sweep value " << v << " dropped\n";
      continue;
    }
    unique_values.push_back(v);
  }

  Dataset dataset = prepare_dataset(config);
  const auto rows = sweep(dataset, config.to_train_config(), axis,
                          unique_values);

  fs::create_directories(config.out_dir);
  std::ofstream out(fs::path(config.out_dir) / "sweep.csv");
  out << (axis == SweepAxis::kDepth ? "depth" : "embed_dim")
      << ",auc_mean,auc_std,total_params\n";
  for (const SweepRow& row : rows)
    out << row.value << ',' << fmt6(row.auc_mean) << ',' << fmt6(row.auc_std)
        << ',' << row.total_params << "\n";
  return rows;
}

}  // namespace tabembed
