// Copyright (c) 2026, the tabembed authors
// SPDX-License-Identifier: Apache-2.0
//
// Shared test oracles. Everything here is intentionally independent of the
// library's own math: finite differences for gradients, brute-force pairs
// for AUC.
#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "tabembed/tensor.hpp"

namespace tabembed::test {

// Central finite-difference check of d(loss)/d(param[i]) for every element
// of every listed parameter. `loss_fn` must rebuild the forward pass from
// the current parameter values. Returns the maximum relative error, with
// absolute error used near zero.
inline double max_grad_error(const std::function<double()>& loss_fn,
                             const std::function<void()>& backward_fn,
                             const std::vector<Tensor>& params,
                             double eps = 1e-6) {
  for (const Tensor& p : params) p.zero_grad();
  backward_fn();
  double worst = 0.0;
  for (const Tensor& p : params) {
    for (std::size_t i = 0; i < p.numel(); ++i) {
      const double saved = p.at(i);
      p.at(i) = saved + eps;
      const double up = loss_fn();
      p.at(i) = saved - eps;
      const double down = loss_fn();
      p.at(i) = saved;
      const double numeric = (up - down) / (2.0 * eps);
      const double analytic = p.grad()[i];
      const double scale = std::max({std::abs(numeric), std::abs(analytic),
                                     1.0});
      worst = std::max(worst, std::abs(numeric - analytic) / scale);
    }
  }
  return worst;
}

// O(n^2) pairwise AUC: wins + half ties over all positive/negative pairs.
inline double pairwise_auc(const std::vector<double>& preds,
                           const std::vector<double>& labels) {
  double score = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (labels[i] != 1.0) continue;
    for (std::size_t j = 0; j < preds.size(); ++j) {
      if (labels[j] != 0.0) continue;
      ++pairs;
      if (preds[i] > preds[j]) score += 1.0;
      else if (preds[i] == preds[j]) score += 0.5;
    }
  }
  return score / static_cast<double>(pairs);
}

}  // namespace tabembed::test
