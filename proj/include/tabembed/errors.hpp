// Copyright (c) 2026, the tabembed authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace tabembed {

// Shape disagreement between tensors handed to an op.
struct DimensionError : std::runtime_error {
  explicit DimensionError(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid embedder/model/run configuration (unknown method, bad widths, ...).
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad input data: malformed CSV rows, empty splits, too-small datasets.
struct DataError : std::runtime_error {
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Scalar outside the documented domain of a deterministic function.
struct DomainError : std::runtime_error {
  explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

// Categorical index at or beyond the table cardinality.
struct OovError : std::runtime_error {
  explicit OovError(const std::string& msg) : std::runtime_error(msg) {}
};

// API contract violation (backward from a non-scalar, missing gradient, ...).
struct ContractError : std::runtime_error {
  explicit ContractError(const std::string& msg) : std::runtime_error(msg) {}
};

// Metric undefined for the given inputs (e.g. single-class AUC).
struct MetricError : std::runtime_error {
  explicit MetricError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace tabembed
