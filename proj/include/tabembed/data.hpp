// Copyright (c) 2026, the tabembed authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tabembed/errors.hpp"

namespace tabembed {

enum class FieldKind { kNumerical, kCategorical };
enum class Normalization { kMinMax, kZScore };

struct Field {
  std::string name;
  FieldKind kind = FieldKind::kNumerical;
  Normalization normalization = Normalization::kMinMax;
  std::size_t cardinality = 0;  // categorical only, set after encoding
};

struct FeatureSchema {
  std::vector<Field> fields;

  std::size_t numerical_count() const;
  std::size_t categorical_count() const;
  const Field* find(const std::string& name) const;
};

// Parses a flat key-value schema file: one `name = kind[:normalization]`
// line per field, e.g. `age = numerical:zscore` or `city = categorical`.
FeatureSchema parse_schema_file(const std::string& path);
FeatureSchema parse_schema_text(const std::string& text);
std::string schema_to_text(const FeatureSchema& schema);

enum class Split : std::uint8_t { kTrain = 0, kVal = 1, kTest = 2, kNone = 3 };

// Column-major table of numerical values and categorical indices.
// Categorical columns hold raw strings until encode_categoricals() runs.
struct Dataset {
  FeatureSchema schema;
  std::size_t n_rows = 0;

  std::vector<std::vector<double>> num_cols;          // [M][n]
  std::vector<std::vector<std::uint32_t>> cat_cols;   // [N][n]
  std::vector<std::vector<std::string>> raw_cat;      // [N][n] until encoded
  std::vector<double> labels;                         // {0, 1}
  std::vector<Split> split;                           // empty until split()
  std::vector<std::vector<std::string>> vocab;        // [N] index -> string

  bool encoded = false;
  bool normalized = false;

  std::vector<std::size_t> rows_in(Split s) const;
  std::size_t cardinality(std::size_t cat_field) const;
};

// CSV input: UTF-8, comma-separated, header row required, no quoting.
// Columns are matched to the schema by name; `label_column` carries the
// binary target.
Dataset load_csv(const std::string& path, const FeatureSchema& schema,
                 const std::string& label_column);

// Seeded shuffle then 8:1:1 partition, remainder to train. n >= 10.
void split_dataset(Dataset& dataset, std::uint64_t seed);

// Maps categorical strings to indices by first appearance over the
// training rows (all rows when no split is assigned); unseen values get
// the reserved OOV index v.
void encode_categoricals(Dataset& dataset);

// Min-max or z-score per the schema, statistics from the training split
// only. Degenerate (constant / zero-std) columns map to zero.
void normalize(Dataset& dataset);

// Two numerical features, nonlinear decision rule, 5% label noise.
Dataset synth_numeric(std::size_t n, std::uint64_t seed,
                      double noise = 0.05);

// One categorical feature with Zipf(1.2) entity frequencies and a latent
// per-entity propensity.
Dataset synth_categorical(std::size_t n, std::size_t v, std::uint64_t seed);

}  // namespace tabembed
