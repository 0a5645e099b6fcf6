// Copyright (c) 2026, the tabembed authors
// SPDX-License-Identifier: Apache-2.0
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tabembed/commands.hpp"
#include "tabembed/embed_cat.hpp"
#include "tabembed/embed_num.hpp"

namespace py = pybind11;

namespace {

using namespace tabembed;

std::vector<double> embed_numerical(const std::string& method, double x,
                                    std::size_t d, std::size_t layers,
                                    std::size_t width, std::size_t buckets,
                                    std::uint64_t seed) {
  NumEmbedOptions options;
  options.d = d;
  options.layers = layers;
  options.width = width;
  options.buckets = buckets;
  Rng rng(seed);
  auto embedder = make_num_embedder(parse_num_method(method), options, rng);
  Tape tape;
  return embedder->embed(tape, x).values();
}

std::vector<double> embed_categorical(const std::string& method,
                                      std::uint32_t x, std::size_t v,
                                      std::size_t d, std::size_t d_hat,
                                      std::size_t layers, std::size_t hash_k,
                                      std::size_t hash_vhat,
                                      std::uint64_t seed) {
  CatEmbedOptions options;
  options.d = d;
  options.d_hat = d_hat;
  options.layers = layers;
  options.hash_k = hash_k;
  options.hash_vhat = hash_vhat;
  Rng rng(seed);
  auto embedder = make_cat_embedder(parse_cat_method(method), v, options, rng);
  Tape tape;
  return embedder->embed(tape, x).values();
}

std::vector<std::vector<double>> precompute_table(std::size_t v, std::size_t d,
                                                  std::size_t d_hat,
                                                  std::size_t layers,
                                                  std::uint64_t seed) {
  CatEmbedOptions options;
  options.d = d;
  options.d_hat = d_hat;
  options.layers = layers;
  Rng rng(seed);
  DeepCatEmbedder embedder(v, options, rng);
  PrecomputedCache cache(embedder);
  cache.precompute_all();
  const Tensor& table = cache.full_table();
  std::vector<std::vector<double>> rows(table.rows(),
                                        std::vector<double>(table.cols()));
  for (std::size_t r = 0; r < table.rows(); ++r)
    for (std::size_t c = 0; c < table.cols(); ++c) rows[r][c] = table.at(r, c);
  return rows;
}

py::dict train_synth(const std::string& kind, std::size_t n, std::size_t v,
                     std::size_t d, std::size_t layers, std::size_t width,
                     const std::string& method, std::size_t seeds,
                     std::size_t max_epochs, std::size_t batch,
                     std::uint64_t seed) {
  RunConfig config;
  config.synth = kind;
  config.n = n;
  config.v = v;
  config.d = d;
  config.layers = layers;
  config.width = width;
  config.seed_count = seeds;
  config.max_epochs = max_epochs;
  config.batch_size = batch;
  config.master_seed = seed;
  if (!method.empty()) {
    if (kind == "numeric") {
      config.methods["x1"] = method;
      config.methods["x2"] = method;
    } else {
      config.methods["c1"] = method;
    }
  }
  Dataset dataset = prepare_dataset(config);
  const TrainReport report = train_model(dataset, config.to_train_config());

  py::dict out;
  out["test_auc_mean"] = report.test_auc_mean;
  out["test_auc_std"] = report.test_auc_std;
  out["embedding_params"] = report.embedding_params;
  out["backbone_params"] = report.backbone_params;
  out["total_params"] = report.total_params;
  out["runs"] = report.runs.size();
  return out;
}

}  // namespace

PYBIND11_MODULE(_tabembed, m) {
  m.doc() = "learned feature embeddings for tabular data";

  m.def(
      "param_count_numerical",
      [](const std::string& method, std::size_t d, std::size_t layers,
         std::size_t width, std::size_t buckets) {
        return param_count_numerical(parse_num_method(method), d, layers,
                                     width, buckets);
      },
      py::arg("method"), py::arg("d"), py::arg("layers") = 2,
      py::arg("width") = 500, py::arg("buckets") = 20);

  m.def(
      "param_count_categorical",
      [](const std::string& method, std::size_t v, std::size_t d,
         std::size_t d_hat, std::size_t hash_k, std::size_t hash_vhat,
         std::size_t layers) {
        return param_count_categorical(parse_cat_method(method), v, d, d_hat,
                                       hash_k, hash_vhat, layers);
      },
      py::arg("method"), py::arg("v"), py::arg("d"), py::arg("d_hat") = 0,
      py::arg("hash_k") = 2, py::arg("hash_vhat") = 16, py::arg("layers") = 2);

  m.def("auc", &auc, py::arg("preds"), py::arg("labels"));
  m.def("handcrafted", &handcrafted, py::arg("x"), py::arg("d"));
  m.def("binary_code_length", &binary_code_length, py::arg("v"));
  m.def("default_d_hat", &default_d_hat, py::arg("d"));

  m.def("embed_numerical", &embed_numerical, py::arg("method"), py::arg("x"),
        py::arg("d") = 8, py::arg("layers") = 2, py::arg("width") = 500,
        py::arg("buckets") = 20, py::arg("seed") = 0);

  m.def("embed_categorical", &embed_categorical, py::arg("method"),
        py::arg("x"), py::arg("v"), py::arg("d") = 16, py::arg("d_hat") = 0,
        py::arg("layers") = 2, py::arg("hash_k") = 2,
        py::arg("hash_vhat") = 16, py::arg("seed") = 0);

  m.def("precompute_table", &precompute_table, py::arg("v"), py::arg("d"),
        py::arg("d_hat") = 0, py::arg("layers") = 2, py::arg("seed") = 0);

  m.def("train_synth", &train_synth, py::arg("kind"), py::arg("n") = 2000,
        py::arg("v") = 50, py::arg("d") = 8, py::arg("layers") = 1,
        py::arg("width") = 16, py::arg("method") = std::string(),
        py::arg("seeds") = 1, py::arg("max_epochs") = 3,
        py::arg("batch") = 256, py::arg("seed") = 0);
}
