// Copyright (c) 2026, the tabembed authors
// SPDX-License-Identifier: Apache-2.0
#include "tabembed/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

namespace tabembed {

Adam::Adam(std::vector<Tensor> params, double lr, double beta1, double beta2,
           double eps)
    : params_(std::move(params)), lr_(lr), beta1_(beta1), beta2_(beta2),
      eps_(eps) {
  for (const Tensor& p : params_) {
    m_.emplace_back(p.numel(), 0.0);
    v_.emplace_back(p.numel(), 0.0);
  }
}

void Adam::step() {
  ++step_count_;
  const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(step_count_));
  const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(step_count_));
  for (std::size_t i = 0; i < params_.size(); ++i) {
    Tensor& p = params_[i];
    if (!p.has_grad())
      throw ContractError("adam: parameter has no gradient");
    const auto& g = p.grad();
    auto& m = m_[i];
    auto& v = v_[i];
    auto& values = p.values();
    for (std::size_t j = 0; j < values.size(); ++j) {
      m[j] = beta1_ * m[j] + (1.0 - beta1_) * g[j];
      v[j] = beta2_ * v[j] + (1.0 - beta2_) * g[j] * g[j];
      const double mhat = m[j] / bc1;
      const double vhat = v[j] / bc2;
      values[j] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
    }
  }
}

void Adam::zero_grad() {
  for (Tensor& p : params_) p.zero_grad();
}

double auc(const std::vector<double>& preds,
           const std::vector<double>& labels) {
  if (preds.size() != labels.size())
    throw DimensionError("auc: prediction/label length mismatch");
  const std::size_t n = preds.size();
  std::size_t positives = 0;
  for (double y : labels) positives += y == 1.0 ? 1 : 0;
  const std::size_t negatives = n - positives;
  if (positives == 0 || negatives == 0)
    throw MetricError("auc: both classes must be present");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return preds[a] < preds[b];
  });

  // Midranks for ties, then the Mann-Whitney identity.
  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && preds[order[j]] == preds[order[i]]) ++j;
    const double midrank = 0.5 * (static_cast<double>(i + 1) +
                                  static_cast<double>(j));
    for (std::size_t t = i; t < j; ++t)
      if (labels[order[t]] == 1.0) rank_sum_pos += midrank;
    i = j;
  }
  const double p = static_cast<double>(positives);
  return (rank_sum_pos - p * (p + 1.0) / 2.0) /
         (p * static_cast<double>(negatives));
}

std::vector<double> predict(const Model& model, const Dataset& dataset,
                            const std::vector<std::size_t>& rows) {
  std::vector<double> preds;
  preds.reserve(rows.size());
  const std::size_t chunk = 4096;
  Tape tape;
  for (std::size_t start = 0; start < rows.size(); start += chunk) {
    const std::size_t len = std::min(chunk, rows.size() - start);
    Tensor probs = model.forward_batch(
        tape, dataset, std::span<const std::size_t>(rows).subspan(start, len));
    for (std::size_t i = 0; i < len; ++i) preds.push_back(probs.at(i));
    tape.clear();
  }
  return preds;
}

namespace {

std::vector<double> labels_of(const Dataset& dataset,
                              const std::vector<std::size_t>& rows) {
  std::vector<double> out;
  out.reserve(rows.size());
  for (std::size_t i : rows) out.push_back(dataset.labels[i]);
  return out;
}

std::vector<std::vector<double>> snapshot(const std::vector<Tensor>& params) {
  std::vector<std::vector<double>> out;
  out.reserve(params.size());
  for (const Tensor& p : params) out.push_back(p.values());
  return out;
}

void restore(std::vector<Tensor>& params,
             const std::vector<std::vector<double>>& snap) {
  for (std::size_t i = 0; i < params.size(); ++i)
    params[i].values() = snap[i];
}

}  // namespace

RunResult train_once(Model& model, const Dataset& dataset,
                     const TrainConfig& config, std::uint64_t seed) {
  const auto train_rows = dataset.rows_in(Split::kTrain);
  const auto val_rows = dataset.rows_in(Split::kVal);
  const auto test_rows = dataset.rows_in(Split::kTest);
  if (train_rows.empty() || val_rows.empty() || test_rows.empty())
    throw DataError("train: dataset must carry non-empty train/val/test "
                    "splits");

  RunResult result;
  result.seed = seed;

  std::vector<Tensor> params = model.parameters();
  Adam optimizer(params, config.lr);
  Rng shuffle_rng(seed ^ 0x5eedf00dULL);

  const std::vector<double> val_labels = labels_of(dataset, val_rows);
  auto best = snapshot(params);
  double best_val = -1.0;
  std::size_t since_best = 0;

  std::vector<std::size_t> order = train_rows;
  Tape tape;
  for (std::size_t epoch = 0; epoch < config.max_epochs; ++epoch) {
    for (std::size_t i = order.size() - 1; i > 0; --i)
      std::swap(order[i], order[shuffle_rng.below(i + 1)]);

    double loss_sum = 0.0;
    std::size_t batches = 0;
    const std::size_t bs = std::min(config.batch_size, order.size());
    for (std::size_t start = 0; start < order.size(); start += bs) {
      const std::size_t len = std::min(bs, order.size() - start);
      const std::span<const std::size_t> rows(order.data() + start, len);
      Tensor probs = model.forward_batch(tape, dataset, rows);
      std::vector<double> batch_labels(len);
      for (std::size_t i = 0; i < len; ++i)
        batch_labels[i] = dataset.labels[rows[i]];
      Tensor loss =
          ops::bce_loss(tape, probs, Tensor::vector(std::move(batch_labels)));
      optimizer.zero_grad();
      tape.backward(loss);
      optimizer.step();
      model.bump_version();
      loss_sum += loss.at(0);
      ++batches;
      tape.clear();
    }

    const double val_auc_now =
        auc(predict(model, dataset, val_rows), val_labels);
    result.epochs.push_back(
        {epoch, loss_sum / static_cast<double>(batches), val_auc_now});

    if (val_auc_now > best_val) {
      best_val = val_auc_now;
      best = snapshot(params);
      result.best_epoch = epoch;
      since_best = 0;
    } else if (++since_best > config.patience) {
      break;
    }
  }

  restore(params, best);
  model.bump_version();
  result.best_val_auc = best_val;
  result.test_auc =
      auc(predict(model, dataset, test_rows), labels_of(dataset, test_rows));
  return result;
}

TrainOutcome train_model_full(const Dataset& dataset,
                              const TrainConfig& config) {
  if (config.seeds.empty()) throw ConfigError("train: seed list is empty");
  const auto start = std::chrono::steady_clock::now();

  TrainOutcome outcome;
  for (std::uint64_t seed : config.seeds) {
    Rng init_rng(seed);
    auto model = std::make_unique<Model>(dataset.schema, config.model,
                                         init_rng);
    outcome.report.runs.push_back(
        train_once(*model, dataset, config, seed));
    outcome.report.embedding_params = model->embedding_param_count();
    outcome.report.backbone_params = model->backbone_param_count();
    outcome.model = std::move(model);
  }

  double mean = 0.0;
  for (const RunResult& run : outcome.report.runs) mean += run.test_auc;
  mean /= static_cast<double>(outcome.report.runs.size());
  double var = 0.0;
  for (const RunResult& run : outcome.report.runs)
    var += (run.test_auc - mean) * (run.test_auc - mean);
  var /= static_cast<double>(outcome.report.runs.size());
  outcome.report.test_auc_mean = mean;
  outcome.report.test_auc_std = std::sqrt(var);
  outcome.report.total_params =
      outcome.report.embedding_params + outcome.report.backbone_params;
  outcome.report.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return outcome;
}

TrainReport train_model(const Dataset& dataset, const TrainConfig& config) {
  return train_model_full(dataset, config).report;
}

std::vector<SweepRow> sweep(const Dataset& dataset, const TrainConfig& config,
                            SweepAxis axis,
                            const std::vector<std::size_t>& values) {
  if (values.empty()) throw ConfigError("sweep: value list is empty");
  std::vector<SweepRow> rows;
  for (std::size_t value : values) {
    TrainConfig run_config = config;
    if (axis == SweepAxis::kDepth) {
      run_config.model.num.layers = value;
      run_config.model.cat.layers = value;
    } else {
      run_config.model.num.d = value;
      run_config.model.cat.d = value;
      run_config.model.cat.d_hat = 0;  // re-derive from the new d
    }
    const TrainReport report = train_model(dataset, run_config);
    rows.push_back({value, report.test_auc_mean, report.test_auc_std,
                    report.total_params});
  }
  return rows;
}

}  // namespace tabembed
