// Copyright (c) 2026, the tabembed authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "tabembed/model.hpp"

namespace tabembed {

// Bias-corrected Adam over a fixed parameter list.
class Adam {
 public:
  explicit Adam(std::vector<Tensor> params, double lr = 1e-3,
                double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

  // Applies one update from the gradients currently on the parameters.
  void step();
  void zero_grad();

  std::size_t step_count() const { return step_count_; }

 private:
  std::vector<Tensor> params_;
  std::vector<std::vector<double>> m_, v_;
  double lr_, beta1_, beta2_, eps_;
  std::size_t step_count_ = 0;
};

// Rank-based AUC; ties contribute one half. Requires both classes present.
double auc(const std::vector<double>& preds, const std::vector<double>& labels);

struct TrainConfig {
  ModelOptions model;
  double lr = 1e-3;
  std::size_t batch_size = 1024;
  std::size_t patience = 5;
  std::size_t max_epochs = 100;
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4};
};

struct EpochStats {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double val_auc = 0.0;
};

struct RunResult {
  std::uint64_t seed = 0;
  std::vector<EpochStats> epochs;
  std::size_t best_epoch = 0;
  double best_val_auc = 0.0;
  double test_auc = 0.0;
};

struct TrainReport {
  std::vector<RunResult> runs;
  double test_auc_mean = 0.0;
  double test_auc_std = 0.0;
  std::size_t embedding_params = 0;
  std::size_t backbone_params = 0;
  std::size_t total_params = 0;
  std::size_t cache_hits = 0;
  std::size_t cache_misses = 0;
  double wall_clock_seconds = 0.0;
};

// Model scores for a row subset, computed off any gradient bookkeeping.
std::vector<double> predict(const Model& model, const Dataset& dataset,
                            const std::vector<std::size_t>& rows);

// One full training run for one seed: mini-batch Adam with early stopping
// on validation AUC and best-epoch parameter restore.
RunResult train_once(Model& model, const Dataset& dataset,
                     const TrainConfig& config, std::uint64_t seed);

struct TrainOutcome {
  TrainReport report;
  // Model from the last seed's run, carrying its best-epoch parameters.
  std::unique_ptr<Model> model;
};

// The full protocol: one run per seed on a freshly initialized model,
// test AUC averaged across runs.
TrainOutcome train_model_full(const Dataset& dataset,
                              const TrainConfig& config);
TrainReport train_model(const Dataset& dataset, const TrainConfig& config);

struct SweepRow {
  std::size_t value = 0;
  double auc_mean = 0.0;
  double auc_std = 0.0;
  std::size_t total_params = 0;
};

enum class SweepAxis { kDepth, kEmbedDim };

// One train_model per value with everything else fixed.
std::vector<SweepRow> sweep(const Dataset& dataset, const TrainConfig& config,
                            SweepAxis axis,
                            const std::vector<std::size_t>& values);

}  // namespace tabembed
