// Copyright (c) 2026, the tabembed authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tabembed/ffn.hpp"
#include "tabembed/ops.hpp"
#include "tabembed/rng.hpp"
#include "tabembed/tensor.hpp"

namespace tabembed {

enum class NumMethod { kNone, kHandcrafted, kLinear, kDiscretize, kDeep };

NumMethod parse_num_method(const std::string& name);
std::string num_method_name(NumMethod method);

struct NumEmbedOptions {
  std::size_t d = 8;
  std::size_t layers = 2;    // deep transformation depth
  std::size_t width = 500;   // hidden width of the deep transformation
  double cap = 1.0;          // ExU clipping bound
  std::size_t buckets = 20;  // soft discretization meta-embedding count
  double temperature = 1.0;
};

// Embedding of a single numerical field. embed() maps one scalar to a
// vector; embed_batch() maps a column of scalars to a [B x dim] matrix.
class NumEmbedder {
 public:
  virtual ~NumEmbedder() = default;
  virtual NumMethod method() const = 0;
  virtual std::size_t dim() const = 0;
  virtual Tensor embed(Tape& tape, double x) const = 0;
  virtual Tensor embed_batch(Tape& tape, std::span<const double> xs) const = 0;
  virtual std::vector<Tensor> parameters() const { return {}; }
  virtual void collect_named(
      const std::string& prefix,
      std::vector<std::pair<std::string, Tensor>>& out) const {}

  // Learnable scalars actually allocated.
  std::size_t allocated_params() const;
  // Itemized extras reported outside the headline count (e.g. the
  // discretization scorer).
  virtual std::size_t extra_params() const { return 0; }
};

std::unique_ptr<NumEmbedder> make_num_embedder(NumMethod method,
                                               const NumEmbedOptions& options,
                                               Rng& rng);

// Headline per-field parameter count: none/handcrafted 0, linear d,
// discretize v*d, deep 2d + n_w.
std::size_t param_count_numerical(NumMethod method, std::size_t d,
                                  std::size_t layers, std::size_t width,
                                  std::size_t buckets);

// --- concrete embedders (exposed for direct testing) ------------------------

class NoneEmbedder final : public NumEmbedder {
 public:
  NumMethod method() const override { return NumMethod::kNone; }
  std::size_t dim() const override { return 1; }
  Tensor embed(Tape& tape, double x) const override;
  Tensor embed_batch(Tape& tape, std::span<const double> xs) const override;
};

class HandcraftedEmbedder final : public NumEmbedder {
 public:
  explicit HandcraftedEmbedder(std::size_t d) : d_(d) {}
  NumMethod method() const override { return NumMethod::kHandcrafted; }
  std::size_t dim() const override { return d_; }
  Tensor embed(Tape& tape, double x) const override;
  Tensor embed_batch(Tape& tape, std::span<const double> xs) const override;

 private:
  std::size_t d_;
};

// Deterministic parameter-free function vector, cycled to length d.
std::vector<double> handcrafted(double x, std::size_t d);

class LinearEmbedder final : public NumEmbedder {
 public:
  LinearEmbedder(std::size_t d, Rng& rng);
  NumMethod method() const override { return NumMethod::kLinear; }
  std::size_t dim() const override { return weights_.numel(); }
  Tensor embed(Tape& tape, double x) const override;
  Tensor embed_batch(Tape& tape, std::span<const double> xs) const override;
  std::vector<Tensor> parameters() const override { return {weights_}; }
  void collect_named(
      const std::string& prefix,
      std::vector<std::pair<std::string, Tensor>>& out) const override;

 private:
  Tensor weights_;  // e_i, scaled by the feature value
};

class DiscretizeEmbedder final : public NumEmbedder {
 public:
  DiscretizeEmbedder(std::size_t d, std::size_t buckets, double temperature,
                     Rng& rng);
  NumMethod method() const override { return NumMethod::kDiscretize; }
  std::size_t dim() const override { return meta_.cols(); }
  Tensor embed(Tape& tape, double x) const override;
  Tensor embed_batch(Tape& tape, std::span<const double> xs) const override;
  std::vector<Tensor> parameters() const override;
  void collect_named(
      const std::string& prefix,
      std::vector<std::pair<std::string, Tensor>>& out) const override;
  std::size_t extra_params() const override {
    return scorer_w_.numel() + scorer_b_.numel();
  }
  const Tensor& meta_embeddings() const { return meta_; }

 private:
  Tensor meta_;      // [buckets x d]
  Tensor scorer_w_;  // [buckets]: affine scalar -> bucket logits
  Tensor scorer_b_;  // [buckets]
  double temperature_;
};

class DeepNumEmbedder final : public NumEmbedder {
 public:
  DeepNumEmbedder(const NumEmbedOptions& options, Rng& rng);
  NumMethod method() const override { return NumMethod::kDeep; }
  std::size_t dim() const override { return gamma_.numel(); }
  Tensor embed(Tape& tape, double x) const override;
  Tensor embed_batch(Tape& tape, std::span<const double> xs) const override;
  std::vector<Tensor> parameters() const override;
  void collect_named(
      const std::string& prefix,
      std::vector<std::pair<std::string, Tensor>>& out) const override;

  // Step-1 only: x * gamma + beta.
  Tensor expand(Tape& tape, double x) const;
  // Step-2 only: residual FFN refinement of the expanded vector.
  Tensor deep_transform(Tape& tape, const Tensor& xhat) const;

  const Tensor& gamma() const { return gamma_; }
  const Tensor& beta() const { return beta_; }
  const Ffn& ffn() const { return ffn_; }

 private:
  Tensor gamma_;  // embedding sensitivity, init ones
  Tensor beta_;   // embedding bias, init zeros
  Ffn ffn_;
};

}  // namespace tabembed
