// Copyright (c) 2026, the tabembed authors
// SPDX-License-Identifier: Apache-2.0
#include "tabembed/embed_num.hpp"

#include <cmath>

namespace tabembed {

NumMethod parse_num_method(const std::string& name) {
  if (name == "none") return NumMethod::kNone;
  if (name == "handcrafted") return NumMethod::kHandcrafted;
  if (name == "linear") return NumMethod::kLinear;
  if (name == "discretize") return NumMethod::kDiscretize;
  if (name == "deep") return NumMethod::kDeep;
  throw ConfigError("unknown numerical embedding method: " + name);
}

std::string num_method_name(NumMethod method) {
  switch (method) {
    case NumMethod::kNone: return "none";
    case NumMethod::kHandcrafted: return "handcrafted";
    case NumMethod::kLinear: return "linear";
    case NumMethod::kDiscretize: return "discretize";
    case NumMethod::kDeep: return "deep";
  }
  throw ConfigError("unknown numerical embedding method");
}

std::size_t NumEmbedder::allocated_params() const {
  std::size_t total = 0;
  for (const Tensor& p : parameters()) total += p.numel();
  return total;
}

std::unique_ptr<NumEmbedder> make_num_embedder(NumMethod method,
                                               const NumEmbedOptions& options,
                                               Rng& rng) {
  switch (method) {
    case NumMethod::kNone:
      return std::make_unique<NoneEmbedder>();
    case NumMethod::kHandcrafted:
      return std::make_unique<HandcraftedEmbedder>(options.d);
    case NumMethod::kLinear:
      return std::make_unique<LinearEmbedder>(options.d, rng);
    case NumMethod::kDiscretize:
      return std::make_unique<DiscretizeEmbedder>(
          options.d, options.buckets, options.temperature, rng);
    case NumMethod::kDeep:
      return std::make_unique<DeepNumEmbedder>(options, rng);
  }
  throw ConfigError("unknown numerical embedding method");
}

std::size_t param_count_numerical(NumMethod method, std::size_t d,
                                  std::size_t layers, std::size_t width,
                                  std::size_t buckets) {
  if (d == 0) throw ConfigError("param_count_numerical: d must be positive");
  switch (method) {
    case NumMethod::kNone:
    case NumMethod::kHandcrafted:
      return 0;
    case NumMethod::kLinear:
      return d;
    case NumMethod::kDiscretize:
      return buckets * d;  // meta table; scorer itemized separately
    case NumMethod::kDeep: {
      FfnConfig ffn{d, d, width, layers, /*exu_on_last=*/true, 1.0};
      return 2 * d + ffn_param_count(ffn);
    }
  }
  throw ConfigError("unknown numerical embedding method");
}

// --- none -------------------------------------------------------------------

Tensor NoneEmbedder::embed(Tape&, double x) const {
  return Tensor::vector({x});
}

Tensor NoneEmbedder::embed_batch(Tape&, std::span<const double> xs) const {
  return Tensor::from({xs.size(), 1}, {xs.begin(), xs.end()});
}

// --- handcrafted ------------------------------------------------------------

std::vector<double> handcrafted(double x, std::size_t d) {
  // Function cycle: x, x^2, sqrt(x), log(1+x). Root/log components require
  // x >= 0 (inputs are min-max normalized).
  if (x < 0.0 && d >= 3)
    throw DomainError("handcrafted: negative input to root/log components");
  std::vector<double> out(d);
  for (std::size_t k = 0; k < d; ++k) {
    switch (k % 4) {
      case 0: out[k] = x; break;
      case 1: out[k] = x * x; break;
      case 2: out[k] = std::sqrt(x); break;
      case 3: out[k] = std::log1p(x); break;
    }
  }
  return out;
}

Tensor HandcraftedEmbedder::embed(Tape&, double x) const {
  return Tensor::vector(handcrafted(x, d_));
}

Tensor HandcraftedEmbedder::embed_batch(Tape&,
                                        std::span<const double> xs) const {
  Tensor out = Tensor::zeros({xs.size(), d_});
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const auto row = handcrafted(xs[i], d_);
    for (std::size_t k = 0; k < d_; ++k) out.at(i, k) = row[k];
  }
  return out;
}

// --- linearly-scaled --------------------------------------------------------

LinearEmbedder::LinearEmbedder(std::size_t d, Rng& rng) {
  weights_ = Tensor::zeros({d}, true);
  const double std = 1.0 / std::sqrt(static_cast<double>(d));
  for (auto& w : weights_.values()) w = rng.normal(0.0, std);
}

Tensor LinearEmbedder::embed(Tape& tape, double x) const {
  return ops::scale(tape, weights_, x);
}

Tensor LinearEmbedder::embed_batch(Tape& tape,
                                   std::span<const double> xs) const {
  Tensor beta = Tensor::zeros({weights_.numel()});  // untracked zero shift
  return ops::expand_batch(tape, xs, weights_, beta);
}

void LinearEmbedder::collect_named(
    const std::string& prefix,
    std::vector<std::pair<std::string, Tensor>>& out) const {
  out.emplace_back(prefix + ".weights", weights_);
}

// --- soft discretization ----------------------------------------------------

DiscretizeEmbedder::DiscretizeEmbedder(std::size_t d, std::size_t buckets,
                                       double temperature, Rng& rng)
    : temperature_(temperature) {
  if (temperature <= 0.0)
    throw ConfigError("discretize: temperature must be positive");
  if (buckets == 0) throw ConfigError("discretize: bucket count must be >= 1");
  meta_ = Tensor::zeros({buckets, d}, true);
  for (auto& v : meta_.values()) v = rng.normal(0.0, 1.0);
  scorer_w_ = Tensor::zeros({buckets}, true);
  scorer_b_ = Tensor::zeros({buckets}, true);
  for (auto& v : scorer_w_.values()) v = rng.normal(0.0, 1.0);
}

Tensor DiscretizeEmbedder::embed(Tape& tape, double x) const {
  Tensor out = embed_batch(tape, std::span<const double>(&x, 1));
  return ops::row_lookup(tape, out, 0);
}

Tensor DiscretizeEmbedder::embed_batch(Tape& tape,
                                       std::span<const double> xs) const {
  Tensor logits = ops::expand_batch(tape, xs, scorer_w_, scorer_b_);
  Tensor probs =
      ops::softmax_rows(tape, ops::scale(tape, logits, 1.0 / temperature_));
  return ops::matmul(tape, probs, meta_);
}

std::vector<Tensor> DiscretizeEmbedder::parameters() const {
  return {meta_, scorer_w_, scorer_b_};
}

void DiscretizeEmbedder::collect_named(
    const std::string& prefix,
    std::vector<std::pair<std::string, Tensor>>& out) const {
  out.emplace_back(prefix + ".meta", meta_);
  out.emplace_back(prefix + ".scorer_w", scorer_w_);
  out.emplace_back(prefix + ".scorer_b", scorer_b_);
}

// --- deep (feature expansion + deep transformation) -------------------------

DeepNumEmbedder::DeepNumEmbedder(const NumEmbedOptions& options, Rng& rng) {
  gamma_ = Tensor::full({options.d}, 1.0, true);
  beta_ = Tensor::zeros({options.d}, true);
  FfnConfig config{options.d, options.d, options.width, options.layers,
                   /*exu_on_last=*/true, options.cap};
  ffn_ = Ffn(config, rng);
}

Tensor DeepNumEmbedder::expand(Tape& tape, double x) const {
  return ops::add(tape, ops::scale(tape, gamma_, x), beta_);
}

Tensor DeepNumEmbedder::deep_transform(Tape& tape, const Tensor& xhat) const {
  return ops::add(tape, xhat, ffn_.forward(tape, xhat));
}

Tensor DeepNumEmbedder::embed(Tape& tape, double x) const {
  return deep_transform(tape, expand(tape, x));
}

Tensor DeepNumEmbedder::embed_batch(Tape& tape,
                                    std::span<const double> xs) const {
  Tensor xhat = ops::expand_batch(tape, xs, gamma_, beta_);
  return ops::add(tape, xhat, ffn_.forward_batch(tape, xhat));
}

std::vector<Tensor> DeepNumEmbedder::parameters() const {
  std::vector<Tensor> params{gamma_, beta_};
  for (const Tensor& p : ffn_.parameters()) params.push_back(p);
  return params;
}

void DeepNumEmbedder::collect_named(
    const std::string& prefix,
    std::vector<std::pair<std::string, Tensor>>& out) const {
  out.emplace_back(prefix + ".gamma", gamma_);
  out.emplace_back(prefix + ".beta", beta_);
  ffn_.collect_named(prefix + ".ffn", out);
}

}  // namespace tabembed
