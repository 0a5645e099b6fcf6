// Copyright (c) 2026, the tabembed authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tabembed/train.hpp"

namespace tabembed {

// Flat key-value run configuration; CLI flags override file entries.
struct RunConfig {
  // data source: either a CSV path + schema, or a synthetic task
  std::string data_path;
  std::string schema_path;
  std::string label_column = "label";
  std::string synth;  // "", "numeric" or "categorical"
  std::size_t n = 10000;
  std::size_t v = 100;

  std::map<std::string, std::string> methods;  // field -> method
  std::size_t d = 8;
  std::size_t d_hat = 0;  // 0: derived from d
  std::size_t layers = 2;
  std::size_t width = 500;
  double cap = 1.0;
  std::size_t buckets = 20;
  double temperature = 1.0;
  std::size_t hash_k = 2;
  std::size_t hash_vhat = 16;

  double lr = 1e-3;
  std::size_t batch_size = 1024;
  std::size_t patience = 5;
  std::size_t max_epochs = 100;
  std::size_t seed_count = 5;
  std::uint64_t master_seed = 0;

  std::string out_dir = ".";

  TrainConfig to_train_config() const;
  std::map<std::string, std::string> to_kv() const;
};

// Parses a flat `key = value` config file.
RunConfig parse_config_file(const std::string& path);
void apply_kv(RunConfig& config, const std::string& key,
              const std::string& value);

// Loads or synthesizes the dataset, splits 8:1:1 with the master seed,
// encodes categoricals and normalizes.
Dataset prepare_dataset(const RunConfig& config);

// Writes report.json, epochs.csv and model.ckpt into out_dir.
TrainReport cmd_train(const RunConfig& config);

struct ParamReportRow {
  std::string field;
  std::string method;
  std::size_t dim = 0;
  std::size_t params = 0;        // headline Table-style count
  std::size_t extra_params = 0;  // itemized (scorer, aggregation weights)
};

// Per-field parameter accounting; writes params.csv when out_dir is set.
std::vector<ParamReportRow> cmd_param_report(const RunConfig& config,
                                             bool write_csv = true);

// Rebuilds the full embedding table of one deep categorical field from a
// checkpoint and writes it as CSV next to the checkpoint.
void cmd_precompute(const std::string& checkpoint_path,
                    const std::string& field, const std::string& out_path);

// One train per sweep value; writes sweep.csv. Duplicate values are
// dropped with a warning.
std::vector<SweepRow> cmd_sweep(const RunConfig& config, SweepAxis axis,
                                std::vector<std::size_t> values);

std::string report_to_json(const TrainReport& report);
void write_epochs_csv(const std::string& path, const TrainReport& report);

}  // namespace tabembed
