// Copyright (c) 2026, the tabembed authors
// SPDX-License-Identifier: Apache-2.0
#include "tabembed/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include <json.hpp>

namespace tabembed {

namespace {
constexpr char kMagic[4] = {'T', 'B', 'C', 'K'};

static_assert(std::endian::native == std::endian::little,
              "checkpoint writer assumes a little-endian host");
}  // namespace

const std::vector<double>* Checkpoint::find(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return &arrays[i];
  return nullptr;
}

Checkpoint checkpoint_from_model(
    const Model& model, const std::map<std::string, std::string>& config,
    const std::string& schema_text) {
  Checkpoint ckpt;
  ckpt.param_version = model.version();
  ckpt.schema_text = schema_text;
  ckpt.config = config;
  for (const auto& [name, tensor] : model.named_parameters()) {
    ckpt.names.push_back(name);
    ckpt.shapes.push_back(tensor.shape());
    ckpt.arrays.push_back(tensor.values());
  }
  return ckpt;
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  nlohmann::json header;
  header["format_version"] = ckpt.format_version;
  header["param_version"] = ckpt.param_version;
  header["schema"] = ckpt.schema_text;
  header["config"] = ckpt.config;
  auto& tensors = header["tensors"] = nlohmann::json::array();
  for (std::size_t i = 0; i < ckpt.names.size(); ++i)
    tensors.push_back({{"name", ckpt.names[i]}, {"shape", ckpt.shapes[i]}});
  const std::string header_text = header.dump();

  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("checkpoint: cannot write " + path);
  out.write(kMagic, 4);
  const std::uint64_t header_len = header_text.size();
  out.write(reinterpret_cast<const char*>(&header_len), sizeof(header_len));
  out.write(header_text.data(), static_cast<std::streamsize>(header_len));
  for (const auto& array : ckpt.arrays)
    out.write(reinterpret_cast<const char*>(array.data()),
              static_cast<std::streamsize>(array.size() * sizeof(double)));
  if (!out) throw DataError("checkpoint: write failed for " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("checkpoint: cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw DataError("checkpoint: bad magic in " + path);
  std::uint64_t header_len = 0;
  in.read(reinterpret_cast<char*>(&header_len), sizeof(header_len));
  std::string header_text(header_len, '\0');
  in.read(header_text.data(), static_cast<std::streamsize>(header_len));
  if (!in) throw DataError("checkpoint: truncated header in " + path);

  const auto header = nlohmann::json::parse(header_text);
  Checkpoint ckpt;
  ckpt.format_version = header.at("format_version").get<std::uint32_t>();
  ckpt.param_version = header.at("param_version").get<std::uint64_t>();
  ckpt.schema_text = header.at("schema").get<std::string>();
  ckpt.config =
      header.at("config").get<std::map<std::string, std::string>>();
  for (const auto& entry : header.at("tensors")) {
    ckpt.names.push_back(entry.at("name").get<std::string>());
    ckpt.shapes.push_back(entry.at("shape").get<std::vector<std::size_t>>());
    std::size_t numel = 1;
    for (std::size_t s : ckpt.shapes.back()) numel *= s;
    std::vector<double> array(numel);
    in.read(reinterpret_cast<char*>(array.data()),
            static_cast<std::streamsize>(numel * sizeof(double)));
    if (!in) throw DataError("checkpoint: truncated data in " + path);
    ckpt.arrays.push_back(std::move(array));
  }
  return ckpt;
}

void restore_model(Model& model, const Checkpoint& ckpt) {
  for (auto& [name, tensor] : model.named_parameters()) {
    const std::vector<double>* array = ckpt.find(name);
    if (!array)
      throw DataError("checkpoint: missing tensor '" + name + "'");
    if (array->size() != tensor.numel())
      throw DataError("checkpoint: shape mismatch for '" + name + "'");
    tensor.values() = *array;
  }
}

}  // namespace tabembed
