// Copyright (c) 2026, the tabembed authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "tabembed/ops.hpp"
#include "tabembed/rng.hpp"
#include "tabembed/tensor.hpp"

namespace tabembed {

// Layer stack used by both embedding transformations. Every layer is an
// affine map; layers with ExU apply the activation after the affine.
struct FfnConfig {
  std::size_t input = 0;
  std::size_t output = 0;
  std::size_t hidden = 0;  // width of all but the last layer
  std::size_t layers = 1;
  bool exu_on_last = true;  // numerical transformation: yes; categorical: no
  double cap = 1.0;
};

inline std::size_t ffn_layer_input(const FfnConfig& c, std::size_t i) {
  return i == 0 ? c.input : c.hidden;
}
inline std::size_t ffn_layer_output(const FfnConfig& c, std::size_t i) {
  return i + 1 == c.layers ? c.output : c.hidden;
}
inline bool ffn_layer_has_exu(const FfnConfig& c, std::size_t i) {
  return i + 1 < c.layers || c.exu_on_last;
}

// Exact learnable-scalar count: affine W+b per layer, plus per-unit ExU
// w and b on activated layers.
inline std::size_t ffn_param_count(const FfnConfig& c) {
  std::size_t total = 0;
  for (std::size_t i = 0; i < c.layers; ++i) {
    const std::size_t in = ffn_layer_input(c, i);
    const std::size_t out = ffn_layer_output(c, i);
    total += in * out + out;
    if (ffn_layer_has_exu(c, i)) total += 2 * out;
  }
  return total;
}

class Ffn {
 public:
  Ffn() = default;
  Ffn(const FfnConfig& config, Rng& rng);

  Tensor forward(Tape& tape, Tensor x) const;
  Tensor forward_batch(Tape& tape, Tensor x) const;

  const FfnConfig& config() const { return config_; }
  std::vector<Tensor> parameters() const;
  void collect_named(const std::string& prefix,
                     std::vector<std::pair<std::string, Tensor>>& out) const;

 private:
  struct Layer {
    Tensor weight;  // [out x in]
    Tensor bias;    // [out]
    Tensor exu_w;   // [out], undefined for linear layers
    Tensor exu_b;   // [out]
  };
  FfnConfig config_;
  std::vector<Layer> layers_;
};

}  // namespace tabembed
