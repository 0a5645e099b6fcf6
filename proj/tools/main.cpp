// Copyright (c) 2026, the tabembed authors
// SPDX-License-Identifier: Apache-2.0
//
// tabembed command line front end.
//
// Exit codes: 0 success, 2 configuration error, 3 data error,
// 4 any other runtime failure.

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tabembed/commands.hpp"

namespace {

using tabembed::RunConfig;

// Flags common to every subcommand that trains or sizes a model.
// CLI flags override config-file entries, which override defaults.
struct CliState {
  RunConfig config;
  std::string config_path;
  std::vector<std::string> method_specs;  // field=method
  bool seed_given = false;
};

void add_common_options(CLI::App* cmd, CliState& state) {
  cmd->add_option("--config", state.config_path,
                  "flat key = value config file");
  cmd->add_option("--data", state.config.data_path, "CSV input path");
  cmd->add_option("--schema", state.config.schema_path, "schema file path");
  cmd->add_option("--label", state.config.label_column, "label column name");
  cmd->add_option("--synth", state.config.synth, "synthetic task")
      ->check(CLI::IsMember({"numeric", "categorical"}));
  cmd->add_option("--n", state.config.n, "synthetic sample count");
  cmd->add_option("--v", state.config.v, "synthetic vocabulary size");
  cmd->add_option("--method", state.method_specs,
                  "per-field method, field=method; repeatable");
  cmd->add_option("--d", state.config.d, "embedding dimension");
  cmd->add_option("--dhat", state.config.d_hat,
                  "identification dimension (0: derived from --d)");
  cmd->add_option("--layers", state.config.layers, "embedding network depth");
  cmd->add_option("--width", state.config.width,
                  "numerical embedding hidden width");
  cmd->add_option("--buckets", state.config.buckets,
                  "discretize bucket count");
  cmd->add_option("--hash-k", state.config.hash_k, "hashing table count");
  cmd->add_option("--hash-vhat", state.config.hash_vhat,
                  "hashing bucket count per table");
  cmd->add_option("--lr", state.config.lr, "Adam learning rate");
  cmd->add_option("--batch", state.config.batch_size, "mini-batch size");
  cmd->add_option("--patience", state.config.patience,
                  "early stopping patience, epochs");
  cmd->add_option("--max-epochs", state.config.max_epochs, "epoch cap");
  cmd->add_option("--seeds", state.config.seed_count, "number of runs");
  cmd->add_option("--seed", state.config.master_seed, "master seed")
      ->each([&state](const std::string&) { state.seed_given = true; });
  cmd->add_option("--out", state.config.out_dir, "output directory");
}

// Resolves file config, flag overrides and the DTE_SEED fallback into a
// final RunConfig.
RunConfig finalize(const CLI::App* cmd, CliState& state) {
  RunConfig config;
  if (!state.config_path.empty())
    config = tabembed::parse_config_file(state.config_path);

  auto take = [&](const std::string& flag, auto member_ptr) {
    if (cmd->count(flag)) config.*member_ptr = state.config.*member_ptr;
  };
  take("--data", &RunConfig::data_path);
  take("--schema", &RunConfig::schema_path);
  take("--label", &RunConfig::label_column);
  take("--synth", &RunConfig::synth);
  take("--n", &RunConfig::n);
  take("--v", &RunConfig::v);
  take("--d", &RunConfig::d);
  take("--dhat", &RunConfig::d_hat);
  take("--layers", &RunConfig::layers);
  take("--width", &RunConfig::width);
  take("--buckets", &RunConfig::buckets);
  take("--hash-k", &RunConfig::hash_k);
  take("--hash-vhat", &RunConfig::hash_vhat);
  take("--lr", &RunConfig::lr);
  take("--batch", &RunConfig::batch_size);
  take("--patience", &RunConfig::patience);
  take("--max-epochs", &RunConfig::max_epochs);
  take("--seeds", &RunConfig::seed_count);
  take("--seed", &RunConfig::master_seed);
  take("--out", &RunConfig::out_dir);

  for (const std::string& spec : state.method_specs) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size())
      throw tabembed::ConfigError("--method expects field=method, got '" +
                                  spec + "'");
    config.methods[spec.substr(0, eq)] = spec.substr(eq + 1);
  }

  if (!state.seed_given && config.master_seed == 0) {
    if (const char* env = std::getenv("DTE_SEED")) {
      try {
        config.master_seed = std::stoull(env);
      } catch (const std::exception&) {
        throw tabembed::ConfigError("DTE_SEED is not an integer: " +
                                    std::string(env));
      }
    }
  }
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tabembed: learned feature embeddings for tabular data"};
  app.require_subcommand(1);

  CliState train_state, param_state, sweep_state, pre_state;
  CLI::App* train_cmd =
      app.add_subcommand("train", "train a model, write report and checkpoint");
  add_common_options(train_cmd, train_state);

  CLI::App* param_cmd =
      app.add_subcommand("param-report", "per-field parameter accounting");
  add_common_options(param_cmd, param_state);

  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "train across depth or embedding dimension");
  add_common_options(sweep_cmd, sweep_state);
  std::string sweep_axis = "depth";
  std::vector<std::size_t> sweep_values;
  sweep_cmd->add_option("--axis", sweep_axis, "sweep axis")
      ->check(CLI::IsMember({"depth", "dim"}));
  sweep_cmd->add_option("--values", sweep_values, "axis values")->required();

  CLI::App* pre_cmd = app.add_subcommand(
      "precompute", "export the embedding table of one categorical field");
  std::string ckpt_path, pre_field, pre_out = "table.csv";
  pre_cmd->add_option("--checkpoint", ckpt_path, "model.ckpt path")
      ->required();
  pre_cmd->add_option("--field", pre_field, "categorical field name")
      ->required();
  pre_cmd->add_option("--out", pre_out, "output CSV path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train_cmd) {
      const auto report = tabembed::cmd_train(finalize(train_cmd, train_state));
      std::cout << "test_auc_mean=" << report.test_auc_mean
                << " test_auc_std=" << report.test_auc_std
                << " total_params=" << report.total_params << "\n";
    } else if (*param_cmd) {
      const auto rows =
          tabembed::cmd_param_report(finalize(param_cmd, param_state));
      for (const auto& row : rows)
        std::cout << row.field << " method=" << row.method
                  << " dim=" << row.dim << " params=" << row.params
                  << " extra=" << row.extra_params << "\n";
    } else if (*sweep_cmd) {
      const auto axis = sweep_axis == "depth" ? tabembed::SweepAxis::kDepth
                                              : tabembed::SweepAxis::kEmbedDim;
      const auto rows = tabembed::cmd_sweep(finalize(sweep_cmd, sweep_state),
                                            axis, sweep_values);
      for (const auto& row : rows)
        std::cout << row.value << " auc_mean=" << row.auc_mean
                  << " total_params=" << row.total_params << "\n";
    } else if (*pre_cmd) {
      tabembed::cmd_precompute(ckpt_path, pre_field, pre_out);
      std::cout << "wrote " << pre_out << "\n";
    }
  } catch (const tabembed::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const tabembed::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
