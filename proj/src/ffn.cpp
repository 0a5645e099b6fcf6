// Copyright (c) 2026, the tabembed authors
// SPDX-License-Identifier: Apache-2.0
#include "tabembed/ffn.hpp"

#include <cmath>

namespace tabembed {

Ffn::Ffn(const FfnConfig& config, Rng& rng) : config_(config) {
  if (config.input == 0 || config.output == 0 || config.layers == 0)
    throw ConfigError("ffn: input, output and layer count must be positive");
  if (config.layers > 1 && config.hidden == 0)
    throw ConfigError("ffn: hidden width must be positive");
  if (config.cap <= 0.0) throw ConfigError("ffn: exu cap must be positive");
  for (std::size_t i = 0; i < config.layers; ++i) {
    const std::size_t in = ffn_layer_input(config, i);
    const std::size_t out = ffn_layer_output(config, i);
    Layer layer;
    layer.weight = Tensor::zeros({out, in}, true);
    const double std = 1.0 / std::sqrt(static_cast<double>(in));
    for (auto& w : layer.weight.values()) w = rng.normal(0.0, std);
    layer.bias = Tensor::zeros({out}, true);
    if (ffn_layer_has_exu(config, i)) {
      layer.exu_w = Tensor::zeros({out}, true);
      layer.exu_b = Tensor::zeros({out}, true);
      for (auto& w : layer.exu_w.values()) w = rng.normal(0.0, 0.5);
      for (auto& b : layer.exu_b.values()) b = rng.normal(0.0, 0.2);
    }
    layers_.push_back(std::move(layer));
  }
}

Tensor Ffn::forward(Tape& tape, Tensor x) const {
  if (x.rank() != 1 || x.numel() != config_.input)
    throw ConfigError("ffn: input width mismatch");
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const Layer& layer = layers_[i];
    x = ops::affine(tape, x, layer.weight, layer.bias);
    if (ffn_layer_has_exu(config_, i))
      x = ops::exu(tape, x, layer.exu_w, layer.exu_b, config_.cap);
  }
  return x;
}

Tensor Ffn::forward_batch(Tape& tape, Tensor x) const {
  if (x.rank() != 2 || x.cols() != config_.input)
    throw ConfigError("ffn: input width mismatch");
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const Layer& layer = layers_[i];
    x = ops::add_rowvec(tape, ops::matmul_nt(tape, x, layer.weight),
                        layer.bias);
    if (ffn_layer_has_exu(config_, i))
      x = ops::exu(tape, x, layer.exu_w, layer.exu_b, config_.cap);
  }
  return x;
}

std::vector<Tensor> Ffn::parameters() const {
  std::vector<Tensor> params;
  for (const Layer& layer : layers_) {
    params.push_back(layer.weight);
    params.push_back(layer.bias);
    if (layer.exu_w.defined()) {
      params.push_back(layer.exu_w);
      params.push_back(layer.exu_b);
    }
  }
  return params;
}

void Ffn::collect_named(
    const std::string& prefix,
    std::vector<std::pair<std::string, Tensor>>& out) const {
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const std::string base = prefix + ".layer" + std::to_string(i);
    out.emplace_back(base + ".weight", layers_[i].weight);
    out.emplace_back(base + ".bias", layers_[i].bias);
    if (layers_[i].exu_w.defined()) {
      out.emplace_back(base + ".exu_w", layers_[i].exu_w);
      out.emplace_back(base + ".exu_b", layers_[i].exu_b);
    }
  }
}

}  // namespace tabembed
