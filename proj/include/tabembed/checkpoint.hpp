// Copyright (c) 2026, the tabembed authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "tabembed/model.hpp"

namespace tabembed {

// Self-describing container: JSON header (names, shapes, schema, config,
// parameter-version stamp) followed by raw little-endian 64-bit floats.
// Round trips are bit-exact.
struct Checkpoint {
  std::uint32_t format_version = 1;
  std::uint64_t param_version = 0;
  std::string schema_text;
  std::map<std::string, std::string> config;
  std::vector<std::string> names;
  std::vector<std::vector<std::size_t>> shapes;
  std::vector<std::vector<double>> arrays;

  const std::vector<double>* find(const std::string& name) const;
};

Checkpoint checkpoint_from_model(const Model& model,
                                 const std::map<std::string, std::string>&
                                     config,
                                 const std::string& schema_text);

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

// Copies arrays back into a structurally identical model.
void restore_model(Model& model, const Checkpoint& ckpt);

}  // namespace tabembed
