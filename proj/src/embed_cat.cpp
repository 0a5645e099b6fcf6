// Copyright (c) 2026, the tabembed authors
// SPDX-License-Identifier: Apache-2.0
#include "tabembed/embed_cat.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

namespace tabembed {

CatMethod parse_cat_method(const std::string& name) {
  if (name == "onehot") return CatMethod::kOnehot;
  if (name == "binary") return CatMethod::kBinary;
  if (name == "lookup") return CatMethod::kLookup;
  if (name == "hashing") return CatMethod::kHashing;
  if (name == "deep") return CatMethod::kDeep;
  throw ConfigError("unknown categorical embedding method: " + name);
}

std::string cat_method_name(CatMethod method) {
  switch (method) {
    case CatMethod::kOnehot: return "onehot";
    case CatMethod::kBinary: return "binary";
    case CatMethod::kLookup: return "lookup";
    case CatMethod::kHashing: return "hashing";
    case CatMethod::kDeep: return "deep";
  }
  throw ConfigError("unknown categorical embedding method");
}

std::size_t default_d_hat(std::size_t d) {
  const std::size_t d_hat = std::max<std::size_t>(2, d / 8);
  return d_hat < d ? d_hat : (d > 1 ? d - 1 : 1);
}

std::size_t binary_code_length(std::size_t v) {
  std::size_t bits = 0;
  std::size_t capacity = 1;
  while (capacity < v) {
    capacity *= 2;
    ++bits;
  }
  return std::max<std::size_t>(1, bits);
}

std::size_t CatEmbedder::allocated_params() const {
  std::size_t total = 0;
  for (const Tensor& p : parameters()) total += p.numel();
  return total;
}

std::unique_ptr<CatEmbedder> make_cat_embedder(CatMethod method, std::size_t v,
                                               const CatEmbedOptions& options,
                                               Rng& rng) {
  switch (method) {
    case CatMethod::kOnehot:
      return std::make_unique<OnehotEmbedder>(v);
    case CatMethod::kBinary:
      return std::make_unique<BinaryEmbedder>(v);
    case CatMethod::kLookup:
      return std::make_unique<LookupEmbedder>(v, options.d, rng);
    case CatMethod::kHashing:
      return std::make_unique<HashEmbedder>(v, options, rng);
    case CatMethod::kDeep:
      return std::make_unique<DeepCatEmbedder>(v, options, rng);
  }
  throw ConfigError("unknown categorical embedding method");
}

std::size_t param_count_categorical(CatMethod method, std::size_t v,
                                    std::size_t d, std::size_t d_hat,
                                    std::size_t hash_k, std::size_t hash_vhat,
                                    std::size_t layers) {
  if (v == 0) throw ConfigError("param_count_categorical: v must be positive");
  switch (method) {
    case CatMethod::kOnehot:
    case CatMethod::kBinary:
      return 0;
    case CatMethod::kLookup:
      return v * d;
    case CatMethod::kHashing:
      return hash_k * hash_vhat * d;  // aggregation weights itemized apart
    case CatMethod::kDeep: {
      if (d_hat == 0) d_hat = default_d_hat(d);
      FfnConfig ffn{d_hat, d, d, layers, /*exu_on_last=*/false, 1.0};
      return v * d_hat + ffn_param_count(ffn);
    }
  }
  throw ConfigError("unknown categorical embedding method");
}

namespace {
void check_index(std::uint32_t x, std::size_t v, const char* method) {
  // x == v is the reserved OOV slot.
  if (x > v)
    throw OovError(std::string(method) + ": index " + std::to_string(x) +
                   " out of range for cardinality " + std::to_string(v));
}
}  // namespace

// --- one-hot ----------------------------------------------------------------

Tensor OnehotEmbedder::embed(Tape&, std::uint32_t x) const {
  check_index(x, v_, "onehot");
  Tensor out = Tensor::zeros({v_});
  if (x < v_) out.at(x) = 1.0;  // OOV encodes as all-zeros
  return out;
}

Tensor OnehotEmbedder::embed_batch(Tape&,
                                   std::span<const std::uint32_t> xs) const {
  Tensor out = Tensor::zeros({xs.size(), v_});
  for (std::size_t i = 0; i < xs.size(); ++i) {
    check_index(xs[i], v_, "onehot");
    if (xs[i] < v_) out.at(i, xs[i]) = 1.0;
  }
  return out;
}

// --- binary -----------------------------------------------------------------

namespace {
void binary_encode(std::uint32_t x, std::size_t bits, double* out) {
  // MSB first; codes that do not fit (only the OOV slot at some
  // cardinalities) encode as all-zeros.
  if (x >= (1ULL << bits)) {
    std::memset(out, 0, bits * sizeof(double));
    return;
  }
  for (std::size_t i = 0; i < bits; ++i)
    out[i] = (x >> (bits - 1 - i)) & 1u ? 1.0 : 0.0;
}
}  // namespace

Tensor BinaryEmbedder::embed(Tape&, std::uint32_t x) const {
  check_index(x, v_, "binary");
  const std::size_t bits = dim();
  Tensor out = Tensor::zeros({bits});
  binary_encode(x, bits, out.values().data());
  return out;
}

Tensor BinaryEmbedder::embed_batch(Tape&,
                                   std::span<const std::uint32_t> xs) const {
  const std::size_t bits = dim();
  Tensor out = Tensor::zeros({xs.size(), bits});
  for (std::size_t i = 0; i < xs.size(); ++i) {
    check_index(xs[i], v_, "binary");
    binary_encode(xs[i], bits, &out.at(i, 0));
  }
  return out;
}

// --- embedding lookup -------------------------------------------------------

LookupEmbedder::LookupEmbedder(std::size_t v, std::size_t d, Rng& rng) {
  table_ = Tensor::zeros({v, d}, true);
  const double std = 1.0 / std::sqrt(static_cast<double>(d));
  for (auto& w : table_.values()) w = rng.normal(0.0, std);
}

Tensor LookupEmbedder::embed(Tape& tape, std::uint32_t x) const {
  check_index(x, table_.rows(), "lookup");
  if (x == table_.rows()) return Tensor::zeros({table_.cols()});
  return ops::row_lookup(tape, table_, x);
}

Tensor LookupEmbedder::embed_batch(Tape& tape,
                                   std::span<const std::uint32_t> xs) const {
  return ops::gather_rows(tape, table_, xs);
}

void LookupEmbedder::collect_named(
    const std::string& prefix,
    std::vector<std::pair<std::string, Tensor>>& out) const {
  out.emplace_back(prefix + ".table", table_);
}

// --- hashing & lookup -------------------------------------------------------

HashEmbedder::HashEmbedder(std::size_t v, const CatEmbedOptions& options,
                           Rng& rng)
    : v_(v), d_(options.d), vhat_(options.hash_vhat) {
  if (options.hash_k == 0 || options.hash_vhat == 0)
    throw ConfigError("hashing: k and bucket count must be >= 1");
  Rng seeder(options.hash_seed);
  const double std = 1.0 / std::sqrt(static_cast<double>(d_));
  for (std::size_t t = 0; t < options.hash_k; ++t) {
    seeds_.push_back(seeder.derive());
    Tensor table = Tensor::zeros({vhat_, d_}, true);
    for (auto& w : table.values()) w = rng.normal(0.0, std);
    tables_.push_back(std::move(table));
  }
  agg_weights_ = Tensor::zeros({options.hash_k}, true);
}

std::size_t HashEmbedder::bucket(std::size_t table_index,
                                 std::uint32_t x) const {
  return mix64(seeds_[table_index] ^ static_cast<std::uint64_t>(x)) % vhat_;
}

Tensor HashEmbedder::embed(Tape& tape, std::uint32_t x) const {
  Tensor weights = ops::softmax(tape, agg_weights_);
  Tensor acc;
  for (std::size_t t = 0; t < tables_.size(); ++t) {
    Tensor row = ops::row_lookup(tape, tables_[t], bucket(t, x));
    Tensor scaled = ops::scale_by_element(tape, row, weights, t);
    acc = acc.defined() ? ops::add(tape, acc, scaled) : scaled;
  }
  return acc;
}

Tensor HashEmbedder::embed_batch(Tape& tape,
                                 std::span<const std::uint32_t> xs) const {
  Tensor weights = ops::softmax(tape, agg_weights_);
  Tensor acc;
  std::vector<std::uint32_t> buckets(xs.size());
  for (std::size_t t = 0; t < tables_.size(); ++t) {
    for (std::size_t i = 0; i < xs.size(); ++i)
      buckets[i] = static_cast<std::uint32_t>(bucket(t, xs[i]));
    Tensor rows = ops::gather_rows(tape, tables_[t], buckets);
    Tensor scaled = ops::scale_by_element(tape, rows, weights, t);
    acc = acc.defined() ? ops::add(tape, acc, scaled) : scaled;
  }
  return acc;
}

std::vector<Tensor> HashEmbedder::parameters() const {
  std::vector<Tensor> params = tables_;
  params.push_back(agg_weights_);
  return params;
}

void HashEmbedder::collect_named(
    const std::string& prefix,
    std::vector<std::pair<std::string, Tensor>>& out) const {
  for (std::size_t t = 0; t < tables_.size(); ++t)
    out.emplace_back(prefix + ".table" + std::to_string(t), tables_[t]);
  out.emplace_back(prefix + ".agg_weights", agg_weights_);
}

// --- deep factorization -----------------------------------------------------

DeepCatEmbedder::DeepCatEmbedder(std::size_t v, const CatEmbedOptions& options,
                                 Rng& rng) {
  std::size_t d_hat = options.d_hat ? options.d_hat : default_d_hat(options.d);
  if (d_hat >= options.d)
    throw ConfigError("deep categorical embedding requires d_hat < d");
  id_table_ = Tensor::zeros({v, d_hat}, true);
  for (auto& w : id_table_.values()) w = rng.normal(0.0, 1.0);
  FfnConfig config{d_hat, options.d, options.d, options.layers,
                   /*exu_on_last=*/false, options.cap};
  ffn_ = Ffn(config, rng);
}

Tensor DeepCatEmbedder::identify(Tape& tape, std::uint32_t x) const {
  check_index(x, id_table_.rows(), "identify");
  if (x == id_table_.rows()) return Tensor::zeros({id_table_.cols()});
  return ops::row_lookup(tape, id_table_, x);
}

Tensor DeepCatEmbedder::deep_transform(Tape& tape, const Tensor& xhat) const {
  return ffn_.forward(tape, xhat);
}

Tensor DeepCatEmbedder::embed(Tape& tape, std::uint32_t x) const {
  return deep_transform(tape, identify(tape, x));
}

Tensor DeepCatEmbedder::embed_batch(Tape& tape,
                                    std::span<const std::uint32_t> xs) const {
  return ffn_.forward_batch(tape, ops::gather_rows(tape, id_table_, xs));
}

std::vector<Tensor> DeepCatEmbedder::parameters() const {
  std::vector<Tensor> params{id_table_};
  for (const Tensor& p : ffn_.parameters()) params.push_back(p);
  return params;
}

void DeepCatEmbedder::collect_named(
    const std::string& prefix,
    std::vector<std::pair<std::string, Tensor>>& out) const {
  out.emplace_back(prefix + ".id_table", id_table_);
  ffn_.collect_named(prefix + ".ffn", out);
}

void DeepCatEmbedder::freeze() {
  id_table_.set_tracked(false);
  for (Tensor p : ffn_.parameters()) p.set_tracked(false);
}

// --- precomputed cache ------------------------------------------------------

PrecomputedCache::PrecomputedCache(const DeepCatEmbedder& embedder)
    : embedder_(embedder),
      full_table_(
          Tensor::zeros({embedder.cardinality(), embedder.dim()})),
      present_(embedder.cardinality(), false),
      version_stamp_(embedder.version()) {}

std::vector<double> PrecomputedCache::compute_row(std::uint32_t x) const {
  Tape tape;
  Tensor row = embedder_.embed(tape, x);
  return row.values();
}

void PrecomputedCache::precompute_all() {
  const std::size_t v = embedder_.cardinality();
  const std::size_t d = embedder_.dim();
  for (std::size_t x = 0; x < v; ++x) {
    const auto row = compute_row(static_cast<std::uint32_t>(x));
    std::memcpy(&full_table_.at(x, 0), row.data(), d * sizeof(double));
    present_[x] = true;
  }
  complete_ = true;
  version_stamp_ = embedder_.version();
}

std::vector<double> PrecomputedCache::fetch(std::uint32_t x) {
  if (x >= embedder_.cardinality())
    throw OovError("precomputed cache: index out of range");
  if (version_stamp_ != embedder_.version()) {
    // Stale: parameters moved since the rows were computed.
    std::fill(present_.begin(), present_.end(), false);
    complete_ = false;
    version_stamp_ = embedder_.version();
  }
  const std::size_t d = embedder_.dim();
  if (!present_[x]) {
    ++misses_;
    const auto row = compute_row(x);
    std::memcpy(&full_table_.at(x, 0), row.data(), d * sizeof(double));
    present_[x] = true;
    return row;
  }
  ++hits_;
  return {&full_table_.at(x, 0), &full_table_.at(x, 0) + d};
}

}  // namespace tabembed
