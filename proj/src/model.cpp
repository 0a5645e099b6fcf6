// Copyright (c) 2026, the tabembed authors
// SPDX-License-Identifier: Apache-2.0
#include "tabembed/model.hpp"

#include <cmath>

namespace tabembed {

std::string MethodMap::resolve(const Field& field) const {
  auto it = by_field.find(field.name);
  if (it != by_field.end()) return it->second;
  return field.kind == FieldKind::kNumerical ? default_numerical
                                             : default_categorical;
}

Model::Model(const FeatureSchema& schema, const ModelOptions& options,
             Rng& rng)
    : schema_(schema) {
  for (const Field& field : schema.fields) {
    const std::string method = options.methods.resolve(field);
    if (field.kind == FieldKind::kNumerical) {
      num_embedders_.push_back(
          make_num_embedder(parse_num_method(method), options.num, rng));
      num_field_names_.push_back(field.name);
      input_width_ += num_embedders_.back()->dim();
    } else {
      if (field.cardinality < 2)
        throw ConfigError("model: field '" + field.name +
                          "' has cardinality < 2 (dataset not encoded?)");
      cat_embedders_.push_back(make_cat_embedder(
          parse_cat_method(method), field.cardinality, options.cat, rng));
      cat_field_names_.push_back(field.name);
      input_width_ += cat_embedders_.back()->dim();
    }
  }

  const std::size_t hidden = options.backbone_width;
  const std::size_t widths[3][2] = {
      {hidden, input_width_}, {hidden, hidden}, {1, hidden}};
  for (const auto& [out, in] : widths) {
    Dense layer;
    layer.weight = Tensor::zeros({out, in}, true);
    const double std = std::sqrt(2.0 / static_cast<double>(in));
    for (auto& w : layer.weight.values()) w = rng.normal(0.0, std);
    // Small positive bias keeps ReLU units off the kink at init.
    layer.bias = Tensor::full({out}, 0.01, true);
    backbone_.push_back(std::move(layer));
  }
}

Tensor Model::embed_row(Tape& tape, std::span<const double> nums,
                        std::span<const std::uint32_t> cats) const {
  if (nums.size() != num_embedders_.size() ||
      cats.size() != cat_embedders_.size())
    throw DataError("embed_row: field count does not match the schema");
  std::vector<Tensor> parts;
  std::size_t num_i = 0, cat_i = 0;
  for (const Field& field : schema_.fields) {
    if (field.kind == FieldKind::kNumerical)
      parts.push_back(num_embedders_[num_i]->embed(tape, nums[num_i])), ++num_i;
    else
      parts.push_back(cat_embedders_[cat_i]->embed(tape, cats[cat_i])), ++cat_i;
  }
  return ops::concat(tape, parts);
}

Tensor Model::backbone_scores(Tape& tape, const Tensor& flat_rows) const {
  Tensor h = flat_rows;
  for (std::size_t i = 0; i < backbone_.size(); ++i) {
    h = ops::add_rowvec(tape, ops::matmul_nt(tape, h, backbone_[i].weight),
                        backbone_[i].bias);
    if (i + 1 < backbone_.size()) h = ops::relu(tape, h);
  }
  return ops::sigmoid(tape, h);  // [B x 1]
}

Tensor Model::forward(Tape& tape, std::span<const double> nums,
                      std::span<const std::uint32_t> cats) const {
  Tensor row = embed_row(tape, nums, cats);
  Tensor probs = backbone_scores(tape, ops::as_row(tape, row));
  return ops::row_lookup(tape, probs, 0);  // scalar-ish [1] vector
}

Tensor Model::forward_batch(Tape& tape, const Dataset& dataset,
                            std::span<const std::size_t> rows) const {
  if (!dataset.encoded)
    throw DataError("forward_batch: dataset categoricals are not encoded");
  const std::size_t b = rows.size();
  std::vector<Tensor> blocks;
  std::size_t num_i = 0, cat_i = 0;
  std::vector<double> xs(b);
  std::vector<std::uint32_t> is(b);
  for (const Field& field : schema_.fields) {
    if (field.kind == FieldKind::kNumerical) {
      for (std::size_t i = 0; i < b; ++i)
        xs[i] = dataset.num_cols[num_i][rows[i]];
      blocks.push_back(num_embedders_[num_i]->embed_batch(tape, xs));
      ++num_i;
    } else {
      for (std::size_t i = 0; i < b; ++i)
        is[i] = dataset.cat_cols[cat_i][rows[i]];
      blocks.push_back(cat_embedders_[cat_i]->embed_batch(tape, is));
      ++cat_i;
    }
  }
  return backbone_scores(tape, ops::concat_cols(tape, blocks));
}

std::vector<Tensor> Model::parameters() const {
  std::vector<Tensor> params;
  for (const auto& e : num_embedders_)
    for (const Tensor& p : e->parameters()) params.push_back(p);
  for (const auto& e : cat_embedders_)
    for (const Tensor& p : e->parameters()) params.push_back(p);
  for (const Dense& layer : backbone_) {
    params.push_back(layer.weight);
    params.push_back(layer.bias);
  }
  return params;
}

std::vector<std::pair<std::string, Tensor>> Model::named_parameters() const {
  std::vector<std::pair<std::string, Tensor>> named;
  for (std::size_t i = 0; i < num_embedders_.size(); ++i)
    num_embedders_[i]->collect_named("num." + num_field_names_[i], named);
  for (std::size_t i = 0; i < cat_embedders_.size(); ++i)
    cat_embedders_[i]->collect_named("cat." + cat_field_names_[i], named);
  for (std::size_t i = 0; i < backbone_.size(); ++i) {
    named.emplace_back("backbone.layer" + std::to_string(i) + ".weight",
                       backbone_[i].weight);
    named.emplace_back("backbone.layer" + std::to_string(i) + ".bias",
                       backbone_[i].bias);
  }
  return named;
}

std::size_t Model::embedding_param_count() const {
  std::size_t total = 0;
  for (const auto& e : num_embedders_) total += e->allocated_params();
  for (const auto& e : cat_embedders_) total += e->allocated_params();
  return total;
}

std::size_t Model::backbone_param_count() const {
  std::size_t total = 0;
  for (const Dense& layer : backbone_)
    total += layer.weight.numel() + layer.bias.numel();
  return total;
}

DeepCatEmbedder* Model::deep_cat_embedder(std::size_t cat_field) const {
  if (cat_field >= cat_embedders_.size())
    throw ConfigError("model: categorical field index out of range");
  return dynamic_cast<DeepCatEmbedder*>(cat_embedders_[cat_field].get());
}

void Model::bump_version() {
  ++version_;
  for (const auto& e : cat_embedders_)
    if (auto* deep = dynamic_cast<DeepCatEmbedder*>(e.get()))
      deep->bump_version();
}

}  // namespace tabembed
