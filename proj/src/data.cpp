// Copyright (c) 2026, the tabembed authors
// SPDX-License-Identifier: Apache-2.0
#include "tabembed/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "tabembed/rng.hpp"

namespace tabembed {

std::size_t FeatureSchema::numerical_count() const {
  std::size_t n = 0;
  for (const Field& f : fields)
    if (f.kind == FieldKind::kNumerical) ++n;
  return n;
}

std::size_t FeatureSchema::categorical_count() const {
  return fields.size() - numerical_count();
}

const Field* FeatureSchema::find(const std::string& name) const {
  for (const Field& f : fields)
    if (f.name == name) return &f;
  return nullptr;
}

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

FeatureSchema parse_schema_text(const std::string& text) {
  FeatureSchema schema;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("schema: expected `name = kind[:normalization]`: " +
                        line);
    Field field;
    field.name = trim(line.substr(0, eq));
    std::string kind = trim(line.substr(eq + 1));
    std::string norm;
    const auto colon = kind.find(':');
    if (colon != std::string::npos) {
      norm = trim(kind.substr(colon + 1));
      kind = trim(kind.substr(0, colon));
    }
    if (kind == "numerical") {
      field.kind = FieldKind::kNumerical;
      if (norm.empty() || norm == "minmax")
        field.normalization = Normalization::kMinMax;
      else if (norm == "zscore")
        field.normalization = Normalization::kZScore;
      else
        throw ConfigError("schema: unknown normalization: " + norm);
    } else if (kind == "categorical") {
      field.kind = FieldKind::kCategorical;
      if (!norm.empty())
        throw ConfigError("schema: categorical fields take no normalization");
    } else {
      throw ConfigError("schema: unknown field kind: " + kind);
    }
    if (schema.find(field.name))
      throw ConfigError("schema: duplicate field name: " + field.name);
    schema.fields.push_back(std::move(field));
  }
  return schema;
}

std::string schema_to_text(const FeatureSchema& schema) {
  std::ostringstream out;
  for (const Field& f : schema.fields) {
    if (f.kind == FieldKind::kNumerical)
      out << f.name << " = numerical:"
          << (f.normalization == Normalization::kMinMax ? "minmax" : "zscore")
          << "\n";
    else
      out << f.name << " = categorical\n";
  }
  return out.str();
}

FeatureSchema parse_schema_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("schema: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_schema_text(buf.str());
}

std::vector<std::size_t> Dataset::rows_in(Split s) const {
  std::vector<std::size_t> rows;
  if (split.empty()) {
    if (s == Split::kTrain)
      for (std::size_t i = 0; i < n_rows; ++i) rows.push_back(i);
    return rows;
  }
  for (std::size_t i = 0; i < n_rows; ++i)
    if (split[i] == s) rows.push_back(i);
  return rows;
}

std::size_t Dataset::cardinality(std::size_t cat_field) const {
  std::size_t i = 0;
  for (const Field& f : schema.fields) {
    if (f.kind != FieldKind::kCategorical) continue;
    if (i == cat_field) return f.cardinality;
    ++i;
  }
  throw ConfigError("dataset: categorical field index out of range");
}

namespace {

std::vector<std::string> split_line(const std::string& line,
                                    std::size_t line_no) {
  if (line.find('"') != std::string::npos)
    throw DataError("csv line " + std::to_string(line_no) +
                    ": quoting is not supported");
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

double parse_double(const std::string& cell, std::size_t line_no,
                    const std::string& column) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(cell, &pos);
    if (pos != cell.size()) throw std::invalid_argument(cell);
    return v;
  } catch (const std::exception&) {
    throw DataError("csv line " + std::to_string(line_no) +
                    ": unparsable numeric value '" + cell + "' in column " +
                    column);
  }
}

}  // namespace

Dataset load_csv(const std::string& path, const FeatureSchema& schema,
                 const std::string& label_column) {
  std::ifstream in(path);
  if (!in) throw DataError("csv: cannot open " + path);

  std::string line;
  if (!std::getline(in, line)) throw DataError("csv: empty file " + path);
  const auto header = split_line(line, 1);

  std::unordered_map<std::string, std::size_t> column_of;
  for (std::size_t i = 0; i < header.size(); ++i) column_of[header[i]] = i;

  std::vector<std::size_t> field_col;
  for (const Field& f : schema.fields) {
    auto it = column_of.find(f.name);
    if (it == column_of.end())
      throw ConfigError("csv: missing column '" + f.name + "' in " + path);
    field_col.push_back(it->second);
  }
  auto label_it = column_of.find(label_column);
  if (label_it == column_of.end())
    throw ConfigError("csv: missing label column '" + label_column + "'");

  Dataset ds;
  ds.schema = schema;
  ds.num_cols.resize(schema.numerical_count());
  ds.raw_cat.resize(schema.categorical_count());
  ds.cat_cols.resize(schema.categorical_count());

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_line(line, line_no);
    if (cells.size() != header.size())
      throw DataError("csv line " + std::to_string(line_no) +
                      ": expected " + std::to_string(header.size()) +
                      " cells, got " + std::to_string(cells.size()));
    std::size_t num_i = 0, cat_i = 0;
    for (std::size_t f = 0; f < schema.fields.size(); ++f) {
      const std::string& cell = cells[field_col[f]];
      if (schema.fields[f].kind == FieldKind::kNumerical)
        ds.num_cols[num_i++].push_back(
            parse_double(cell, line_no, schema.fields[f].name));
      else
        ds.raw_cat[cat_i++].push_back(cell);
    }
    const double label = parse_double(cells[label_it->second], line_no,
                                      label_column);
    if (label != 0.0 && label != 1.0)
      throw DataError("csv line " + std::to_string(line_no) +
                      ": label must be 0 or 1");
    ds.labels.push_back(label);
    ++ds.n_rows;
  }
  return ds;
}

void split_dataset(Dataset& dataset, std::uint64_t seed) {
  const std::size_t n = dataset.n_rows;
  if (n < 10) throw DataError("split: need at least 10 rows");
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(seed);
  for (std::size_t i = n - 1; i > 0; --i)
    std::swap(order[i], order[rng.below(i + 1)]);
  const std::size_t n_val = n / 10;
  const std::size_t n_test = n / 10;
  dataset.split.assign(n, Split::kTrain);
  for (std::size_t i = 0; i < n_val; ++i) dataset.split[order[i]] = Split::kVal;
  for (std::size_t i = n_val; i < n_val + n_test; ++i)
    dataset.split[order[i]] = Split::kTest;
}

void encode_categoricals(Dataset& dataset) {
  if (dataset.encoded) return;
  const std::size_t n_cat = dataset.raw_cat.size();
  dataset.vocab.assign(n_cat, {});
  std::size_t cat_i = 0;
  for (std::size_t f = 0; f < dataset.schema.fields.size(); ++f) {
    Field& field = dataset.schema.fields[f];
    if (field.kind != FieldKind::kCategorical) continue;
    std::unordered_map<std::string, std::uint32_t> index_of;
    // Vocabulary from training rows in row order (first appearance).
    for (std::size_t i = 0; i < dataset.n_rows; ++i) {
      if (!dataset.split.empty() && dataset.split[i] != Split::kTrain)
        continue;
      const std::string& s = dataset.raw_cat[cat_i][i];
      if (index_of.emplace(s, static_cast<std::uint32_t>(index_of.size()))
              .second)
        dataset.vocab[cat_i].push_back(s);
    }
    const std::uint32_t oov = static_cast<std::uint32_t>(index_of.size());
    dataset.cat_cols[cat_i].resize(dataset.n_rows);
    for (std::size_t i = 0; i < dataset.n_rows; ++i) {
      auto it = index_of.find(dataset.raw_cat[cat_i][i]);
      dataset.cat_cols[cat_i][i] = it == index_of.end() ? oov : it->second;
    }
    field.cardinality = index_of.size();
    ++cat_i;
  }
  dataset.raw_cat.clear();
  dataset.encoded = true;
}

void normalize(Dataset& dataset) {
  if (dataset.normalized) return;
  const auto train_rows = dataset.rows_in(Split::kTrain);
  if (train_rows.empty()) throw DataError("normalize: empty training split");
  std::size_t num_i = 0;
  for (const Field& field : dataset.schema.fields) {
    if (field.kind != FieldKind::kNumerical) continue;
    auto& col = dataset.num_cols[num_i];
    if (field.normalization == Normalization::kMinMax) {
      double lo = col[train_rows.front()], hi = lo;
      for (std::size_t i : train_rows) {
        lo = std::min(lo, col[i]);
        hi = std::max(hi, col[i]);
      }
      const double range = hi - lo;
      for (double& v : col) v = range == 0.0 ? 0.0 : (v - lo) / range;
    } else {
      double mean = 0.0;
      for (std::size_t i : train_rows) mean += col[i];
      mean /= static_cast<double>(train_rows.size());
      double var = 0.0;
      for (std::size_t i : train_rows) var += (col[i] - mean) * (col[i] - mean);
      var /= static_cast<double>(train_rows.size());  // population variance
      const double std = std::sqrt(var);
      for (double& v : col) v = std == 0.0 ? 0.0 : (v - mean) / std;
    }
    ++num_i;
  }
  dataset.normalized = true;
}

Dataset synth_numeric(std::size_t n, std::uint64_t seed, double noise) {
  if (n < 100) throw DataError("synth_numeric: need n >= 100");
  Dataset ds;
  ds.schema = parse_schema_text("x1 = numerical:minmax\nx2 = numerical:minmax");
  ds.n_rows = n;
  ds.num_cols.assign(2, {});
  ds.encoded = true;
  ds.normalized = true;  // generated directly in [0, 1]
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    const double x1 = rng.uniform();
    const double x2 = rng.uniform();
    ds.num_cols[0].push_back(x1);
    ds.num_cols[1].push_back(x2);
    bool label = std::sin(3.0 * M_PI * x1) + 4.0 * (x2 - 0.5) * (x2 - 0.5) >
                 0.5;
    if (noise > 0.0 && rng.bernoulli(noise)) label = !label;
    ds.labels.push_back(label ? 1.0 : 0.0);
  }
  return ds;
}

Dataset synth_categorical(std::size_t n, std::size_t v, std::uint64_t seed) {
  if (v < 10) throw DataError("synth_categorical: need v >= 10");
  Dataset ds;
  ds.schema = parse_schema_text("c1 = categorical");
  ds.schema.fields[0].cardinality = v;
  ds.n_rows = n;
  ds.cat_cols.assign(1, {});
  ds.vocab.assign(1, {});
  ds.encoded = true;
  ds.normalized = true;
  Rng rng(seed);

  // Zipf(s=1.2) over entity ranks.
  std::vector<double> cdf(v);
  double mass = 0.0;
  for (std::size_t k = 0; k < v; ++k) {
    mass += std::pow(static_cast<double>(k + 1), -1.2);
    cdf[k] = mass;
  }
  for (double& c : cdf) c /= mass;

  // Per-entity latent propensity, drawn once.
  std::vector<double> latent(v);
  for (double& l : latent) l = rng.normal(0.0, 2.0);

  for (std::size_t i = 0; i < n; ++i) {
    const double u = rng.uniform();
    const std::size_t entity =
        std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin();
    ds.cat_cols[0].push_back(static_cast<std::uint32_t>(entity));
    const double p = 1.0 / (1.0 + std::exp(-latent[entity]));
    ds.labels.push_back(rng.bernoulli(p) ? 1.0 : 0.0);
  }
  return ds;
}

}  // namespace tabembed
