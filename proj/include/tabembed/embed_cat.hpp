// Copyright (c) 2026, the tabembed authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "tabembed/ffn.hpp"
#include "tabembed/ops.hpp"
#include "tabembed/rng.hpp"
#include "tabembed/tensor.hpp"

namespace tabembed {

enum class CatMethod { kOnehot, kBinary, kLookup, kHashing, kDeep };

CatMethod parse_cat_method(const std::string& name);
std::string cat_method_name(CatMethod method);

struct CatEmbedOptions {
  std::size_t d = 16;
  std::size_t d_hat = 0;     // 0: default max(2, d/8)
  std::size_t layers = 2;    // deep transformation depth (last layer linear)
  double cap = 1.0;
  std::size_t hash_k = 2;    // number of hash functions
  std::size_t hash_vhat = 16;  // buckets per hash table
  std::uint64_t hash_seed = 0x7ab3ebd5u;
};

std::size_t default_d_hat(std::size_t d);

// Code length of the binary encoding: max(1, ceil(log2(v))).
std::size_t binary_code_length(std::size_t v);

// Embedding of a single categorical field of cardinality v. Index v is the
// reserved out-of-vocabulary slot; indices beyond v are rejected.
class CatEmbedder {
 public:
  virtual ~CatEmbedder() = default;
  virtual CatMethod method() const = 0;
  virtual std::size_t dim() const = 0;
  virtual std::size_t cardinality() const = 0;
  virtual Tensor embed(Tape& tape, std::uint32_t x) const = 0;
  virtual Tensor embed_batch(Tape& tape,
                             std::span<const std::uint32_t> xs) const = 0;
  virtual std::vector<Tensor> parameters() const { return {}; }
  virtual void collect_named(
      const std::string& prefix,
      std::vector<std::pair<std::string, Tensor>>& out) const {}

  std::size_t allocated_params() const;
  virtual std::size_t extra_params() const { return 0; }
};

std::unique_ptr<CatEmbedder> make_cat_embedder(CatMethod method, std::size_t v,
                                               const CatEmbedOptions& options,
                                               Rng& rng);

// Headline per-field count: onehot/binary 0, lookup v*d, hashing k*vhat*d,
// deep v*d_hat + n_w of the configured FFN.
std::size_t param_count_categorical(CatMethod method, std::size_t v,
                                    std::size_t d, std::size_t d_hat,
                                    std::size_t hash_k, std::size_t hash_vhat,
                                    std::size_t layers);

// --- concrete embedders -----------------------------------------------------

class OnehotEmbedder final : public CatEmbedder {
 public:
  explicit OnehotEmbedder(std::size_t v) : v_(v) {}
  CatMethod method() const override { return CatMethod::kOnehot; }
  std::size_t dim() const override { return v_; }
  std::size_t cardinality() const override { return v_; }
  Tensor embed(Tape& tape, std::uint32_t x) const override;
  Tensor embed_batch(Tape& tape,
                     std::span<const std::uint32_t> xs) const override;

 private:
  std::size_t v_;
};

class BinaryEmbedder final : public CatEmbedder {
 public:
  explicit BinaryEmbedder(std::size_t v) : v_(v) {}
  CatMethod method() const override { return CatMethod::kBinary; }
  std::size_t dim() const override { return binary_code_length(v_); }
  std::size_t cardinality() const override { return v_; }
  Tensor embed(Tape& tape, std::uint32_t x) const override;
  Tensor embed_batch(Tape& tape,
                     std::span<const std::uint32_t> xs) const override;

 private:
  std::size_t v_;
};

class LookupEmbedder final : public CatEmbedder {
 public:
  LookupEmbedder(std::size_t v, std::size_t d, Rng& rng);
  CatMethod method() const override { return CatMethod::kLookup; }
  std::size_t dim() const override { return table_.cols(); }
  std::size_t cardinality() const override { return table_.rows(); }
  Tensor embed(Tape& tape, std::uint32_t x) const override;
  Tensor embed_batch(Tape& tape,
                     std::span<const std::uint32_t> xs) const override;
  std::vector<Tensor> parameters() const override { return {table_}; }
  void collect_named(
      const std::string& prefix,
      std::vector<std::pair<std::string, Tensor>>& out) const override;
  const Tensor& table() const { return table_; }

 private:
  Tensor table_;  // [v x d]
};

class HashEmbedder final : public CatEmbedder {
 public:
  HashEmbedder(std::size_t v, const CatEmbedOptions& options, Rng& rng);
  CatMethod method() const override { return CatMethod::kHashing; }
  std::size_t dim() const override { return d_; }
  std::size_t cardinality() const override { return v_; }
  Tensor embed(Tape& tape, std::uint32_t x) const override;
  Tensor embed_batch(Tape& tape,
                     std::span<const std::uint32_t> xs) const override;
  std::vector<Tensor> parameters() const override;
  void collect_named(
      const std::string& prefix,
      std::vector<std::pair<std::string, Tensor>>& out) const override;
  std::size_t extra_params() const override { return agg_weights_.numel(); }

  std::size_t bucket(std::size_t table_index, std::uint32_t x) const;
  std::size_t table_count() const { return tables_.size(); }
  std::size_t bucket_count() const { return vhat_; }

 private:
  std::size_t v_, d_, vhat_;
  std::vector<Tensor> tables_;        // k tensors [vhat x d]
  std::vector<std::uint64_t> seeds_;  // one per hash function
  Tensor agg_weights_;                // [k], softmaxed at aggregation
};

// Deep factorization: compact identification table + shared deep
// transformation restoring the uniform embedding size.
class DeepCatEmbedder final : public CatEmbedder {
 public:
  DeepCatEmbedder(std::size_t v, const CatEmbedOptions& options, Rng& rng);
  CatMethod method() const override { return CatMethod::kDeep; }
  std::size_t dim() const override { return ffn_.config().output; }
  std::size_t cardinality() const override { return id_table_.rows(); }
  std::size_t id_dim() const { return id_table_.cols(); }
  Tensor embed(Tape& tape, std::uint32_t x) const override;
  Tensor embed_batch(Tape& tape,
                     std::span<const std::uint32_t> xs) const override;
  std::vector<Tensor> parameters() const override;
  void collect_named(
      const std::string& prefix,
      std::vector<std::pair<std::string, Tensor>>& out) const override;

  // Step-1: unique identification vector (row x of the id table).
  Tensor identify(Tape& tape, std::uint32_t x) const;
  // Step-2: shared FFN from d_hat to d.
  Tensor deep_transform(Tape& tape, const Tensor& xhat) const;

  const Tensor& id_table() const { return id_table_; }
  const Ffn& ffn() const { return ffn_; }

  // Parameter-version stamp; the trainer bumps it on every update step.
  std::uint64_t version() const { return version_; }
  void bump_version() { ++version_; }
  void freeze();

 private:
  Tensor id_table_;  // [v x d_hat]
  Ffn ffn_;
  std::uint64_t version_ = 0;
};

// Cached deep-transformed rows, valid for one parameter version.
class PrecomputedCache {
 public:
  explicit PrecomputedCache(const DeepCatEmbedder& embedder);

  // Full reconstruction of the v x d table at the current version.
  void precompute_all();

  // Returns the embedding row for entity x, recomputing on version
  // mismatch (stale cache) or first access.
  std::vector<double> fetch(std::uint32_t x);

  const Tensor& full_table() const { return full_table_; }
  bool complete() const { return complete_; }
  std::uint64_t version_stamp() const { return version_stamp_; }
  std::size_t hits() const { return hits_; }
  std::size_t misses() const { return misses_; }

 private:
  std::vector<double> compute_row(std::uint32_t x) const;

  const DeepCatEmbedder& embedder_;
  Tensor full_table_;  // [v x d], untracked
  std::vector<bool> present_;
  bool complete_ = false;
  std::uint64_t version_stamp_ = 0;
  std::size_t hits_ = 0;
  std::size_t misses_ = 0;
};

}  // namespace tabembed
