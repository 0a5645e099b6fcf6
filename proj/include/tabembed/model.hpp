// Copyright (c) 2026, the tabembed authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "tabembed/data.hpp"
#include "tabembed/embed_cat.hpp"
#include "tabembed/embed_num.hpp"

namespace tabembed {

// Per-field embedding method assignment; missing fields fall back to the
// defaults (numerical -> deep, categorical -> deep).
struct MethodMap {
  std::map<std::string, std::string> by_field;
  std::string default_numerical = "deep";
  std::string default_categorical = "deep";

  std::string resolve(const Field& field) const;
};

struct ModelOptions {
  NumEmbedOptions num;
  CatEmbedOptions cat;
  MethodMap methods;
  std::size_t backbone_width = 64;  // two ReLU hidden layers
};

// Per-field embedders feeding a flatten-and-concatenate FFN scorer with a
// sigmoid head. Field order follows the schema: numerical then categorical.
class Model {
 public:
  Model(const FeatureSchema& schema, const ModelOptions& options, Rng& rng);

  const FeatureSchema& schema() const { return schema_; }
  std::size_t input_width() const { return input_width_; }

  // Embedded row for one sample: per-field embeddings concatenated in
  // schema field order.
  Tensor embed_row(Tape& tape, std::span<const double> nums,
                   std::span<const std::uint32_t> cats) const;

  // Probability for one sample.
  Tensor forward(Tape& tape, std::span<const double> nums,
                 std::span<const std::uint32_t> cats) const;

  // Probabilities for a batch of dataset rows.
  Tensor forward_batch(Tape& tape, const Dataset& dataset,
                       std::span<const std::size_t> rows) const;

  std::vector<Tensor> parameters() const;
  std::vector<std::pair<std::string, Tensor>> named_parameters() const;

  std::size_t embedding_param_count() const;
  std::size_t backbone_param_count() const;

  const std::vector<std::unique_ptr<NumEmbedder>>& num_embedders() const {
    return num_embedders_;
  }
  const std::vector<std::unique_ptr<CatEmbedder>>& cat_embedders() const {
    return cat_embedders_;
  }
  DeepCatEmbedder* deep_cat_embedder(std::size_t cat_field) const;

  std::uint64_t version() const { return version_; }
  void bump_version();

 private:
  Tensor backbone_scores(Tape& tape, const Tensor& flat_rows) const;

  FeatureSchema schema_;
  std::vector<std::unique_ptr<NumEmbedder>> num_embedders_;
  std::vector<std::unique_ptr<CatEmbedder>> cat_embedders_;
  std::vector<std::string> num_field_names_, cat_field_names_;
  std::size_t input_width_ = 0;

  struct Dense {
    Tensor weight, bias;
  };
  std::vector<Dense> backbone_;  // hidden layers + 1-logit output layer
  std::uint64_t version_ = 0;
};

}  // namespace tabembed
