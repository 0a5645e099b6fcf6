// Copyright (c) 2026, the tabembed authors
// SPDX-License-Identifier: Apache-2.0
//
// Acceptance gate. Runs ten independent checks and prints one PASS/FAIL
// line per criterion; exits nonzero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "support.hpp"
#include "tabembed/checkpoint.hpp"
#include "tabembed/commands.hpp"

using namespace tabembed;
namespace fs = std::filesystem;

namespace {

struct Gate {
  int failures = 0;

  void run(int number, const std::string& title,
           const std::function<bool(std::string&)>& body) {
    std::string detail;
    bool ok = false;
    const auto start = std::chrono::steady_clock::now();
    try {
      ok = body(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    std::printf("%s criterion %2d: %s (%.1fs)%s%s\n", ok ? "PASS" : "FAIL",
                number, title.c_str(), secs, detail.empty() ? "" : " -- ",
                detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
  }
};

Tensor rand_tensor(std::vector<std::size_t> shape, Rng& rng) {
  Tensor t = Tensor::zeros(std::move(shape), true);
  for (std::size_t i = 0; i < t.numel(); ++i) t.at(i) = rng.normal(0.0, 1.0);
  return t;
}

// --- criterion 1: gradient suite -------------------------------------------

bool gradient_suite(std::string& detail) {
  Rng rng(101);
  double worst = 0.0;
  auto check = [&](const std::function<double()>& loss,
                   const std::function<void()>& backward,
                   const std::vector<Tensor>& params) {
    worst = std::max(worst, test::max_grad_error(loss, backward, params));
  };

  for (int point = 0; point < 20; ++point) {
    // expand + numerical deep transform
    {
      NumEmbedOptions o;
      o.d = 4;
      o.layers = 2;
      o.width = 6;
      DeepNumEmbedder e(o, rng);
      const double x = 0.1 + 0.8 * rng.uniform();
      check([&] { Tape t; return ops::sum(t, e.embed(t, x)).at(0); },
            [&] { Tape t; t.backward(ops::sum(t, e.embed(t, x))); },
            e.parameters());
    }
    // categorical deep transform
    {
      CatEmbedOptions o;
      o.d = 6;
      o.d_hat = 2;
      DeepCatEmbedder e(8, o, rng);
      const std::uint32_t x = static_cast<std::uint32_t>(rng.below(8));
      check([&] { Tape t; return ops::sum(t, e.embed(t, x)).at(0); },
            [&] { Tape t; t.backward(ops::sum(t, e.embed(t, x))); },
            e.parameters());
    }
    // exu at interior points
    {
      Tensor x = Tensor::zeros({3}, true), w = Tensor::zeros({3}, true),
             b = Tensor::zeros({3}, true);
      for (std::size_t i = 0; i < 3; ++i) {
        w.at(i) = rng.normal(0.0, 0.3);
        b.at(i) = rng.normal(0.0, 0.3);
        x.at(i) = b.at(i) + (0.1 + 0.8 * rng.uniform()) / std::exp(w.at(i));
      }
      check([&] { Tape t; return ops::sum(t, ops::exu(t, x, w, b, 1.0)).at(0); },
            [&] { Tape t; t.backward(ops::sum(t, ops::exu(t, x, w, b, 1.0))); },
            {x, w, b});
    }
    // affine, matmul, sigmoid, bce
    {
      Tensor W = rand_tensor({3, 4}, rng), bias = rand_tensor({3}, rng),
             x = rand_tensor({4}, rng);
      check([&] { Tape t; return ops::sum(t, ops::affine(t, x, W, bias)).at(0); },
            [&] { Tape t; t.backward(ops::sum(t, ops::affine(t, x, W, bias))); },
            {W, bias, x});
      Tensor A = rand_tensor({3, 4}, rng), B = rand_tensor({4, 2}, rng);
      check([&] { Tape t; return ops::sum(t, ops::matmul(t, A, B)).at(0); },
            [&] { Tape t; t.backward(ops::sum(t, ops::matmul(t, A, B))); },
            {A, B});
      Tensor s = rand_tensor({4}, rng);
      check([&] { Tape t; return ops::sum(t, ops::sigmoid(t, s)).at(0); },
            [&] { Tape t; t.backward(ops::sum(t, ops::sigmoid(t, s))); }, {s});
      Tensor p = Tensor::zeros({4}, true), y = Tensor::zeros({4});
      for (std::size_t i = 0; i < 4; ++i) {
        p.at(i) = 0.05 + 0.9 * rng.uniform();
        y.at(i) = rng.bernoulli(0.5) ? 1.0 : 0.0;
      }
      check([&] { Tape t; return ops::bce_loss(t, p, y).at(0); },
            [&] { Tape t; t.backward(ops::bce_loss(t, p, y)); }, {p});
    }
    // full stack: mixed model, loss -> gamma, beta, id table, backbone
    {
      FeatureSchema schema =
          parse_schema_text("x = numerical\nc = categorical");
      schema.fields[1].cardinality = 5;
      ModelOptions o;
      o.num.d = 3;
      o.num.layers = 1;
      o.num.width = 3;
      o.cat.d = 4;
      o.cat.d_hat = 2;
      o.backbone_width = 4;
      Model model(schema, o, rng);
      std::vector<double> nums = {0.2 + 0.6 * rng.uniform()};
      std::vector<std::uint32_t> cats = {
          static_cast<std::uint32_t>(rng.below(5))};
      Tensor y = Tensor::vector({rng.bernoulli(0.5) ? 1.0 : 0.0});
      check(
          [&] {
            Tape t;
            return ops::bce_loss(t, model.forward(t, nums, cats), y).at(0);
          },
          [&] {
            Tape t;
            t.backward(ops::bce_loss(t, model.forward(t, nums, cats), y));
          },
          model.parameters());
    }
  }
  std::ostringstream os;
  os << "max relative error " << worst;
  detail = os.str();
  return worst < 1e-4;
}

// --- criterion 2: parameter accounting --------------------------------------

bool parameter_accounting(std::string& detail) {
  Rng rng(202);
  std::size_t combinations = 0;
  for (std::size_t d : {4u, 8u, 20u, 50u}) {
    for (std::size_t l : {1u, 2u, 3u}) {
      for (std::size_t width : {d, std::size_t(500)}) {
        NumEmbedOptions o;
        o.d = d;
        o.layers = l;
        o.width = width;
        for (NumMethod m : {NumMethod::kNone, NumMethod::kHandcrafted,
                            NumMethod::kLinear, NumMethod::kDiscretize,
                            NumMethod::kDeep}) {
          auto e = make_num_embedder(m, o, rng);
          const std::size_t formula =
              param_count_numerical(m, d, l, width, o.buckets);
          const std::size_t counted =
              e->allocated_params() - e->extra_params();
          if (formula != counted) {
            detail = "numerical " + num_method_name(m) + " d=" +
                     std::to_string(d) + " mismatch";
            return false;
          }
          ++combinations;
        }
      }
    }
  }
  for (std::size_t v : {std::size_t(10), std::size_t(1000),
                        std::size_t(10000)}) {
    for (std::size_t d_hat : {2u, 4u}) {
      for (std::size_t k : {1u, 2u, 4u}) {
        for (std::size_t vhat : {16u, 256u}) {
          CatEmbedOptions o;
          o.d = 16;
          o.d_hat = d_hat;
          o.hash_k = k;
          o.hash_vhat = vhat;
          for (CatMethod m : {CatMethod::kOnehot, CatMethod::kBinary,
                              CatMethod::kLookup, CatMethod::kHashing,
                              CatMethod::kDeep}) {
            auto e = make_cat_embedder(m, v, o, rng);
            const std::size_t formula = param_count_categorical(
                m, v, o.d, d_hat, k, vhat, o.layers);
            const std::size_t counted =
                e->allocated_params() - e->extra_params();
            if (formula != counted) {
              detail = "categorical " + cat_method_name(m) + " v=" +
                       std::to_string(v) + " mismatch";
              return false;
            }
            if (m == CatMethod::kBinary &&
                e->dim() != binary_code_length(v)) {
              detail = "binary dim mismatch at v=" + std::to_string(v);
              return false;
            }
            ++combinations;
          }
        }
      }
    }
  }
  detail = std::to_string(combinations) + " combinations exact";
  return true;
}

// --- criteria 3 and 4: effectiveness and compression ------------------------

double mean_auc(const Dataset& dataset, const TrainConfig& config) {
  return train_model(dataset, config).test_auc_mean;
}

bool numerical_effectiveness(std::string& detail) {
  Dataset ds = synth_numeric(10000, 1);
  split_dataset(ds, 1);
  TrainConfig config;
  config.model.num.d = 8;
  config.model.methods.by_field = {{"x1", "deep"}, {"x2", "deep"}};
  const double deep = mean_auc(ds, config);
  config.model.methods.by_field = {{"x1", "linear"}, {"x2", "linear"}};
  const double linear = mean_auc(ds, config);
  std::ostringstream os;
  os << "deep " << deep << " vs linear " << linear;
  detail = os.str();
  return deep >= linear + 0.01;
}

bool categorical_compression(std::string& detail) {
  Dataset ds = synth_categorical(100000, 2000, 2);
  split_dataset(ds, 2);
  TrainConfig config;
  config.model.cat.d = 16;
  config.model.cat.d_hat = 2;

  config.model.methods.by_field = {{"c1", "deep"}};
  Rng probe_rng(0);
  Model probe(ds.schema, config.model, probe_rng);
  const std::size_t deep_params = probe.embedding_param_count();
  const std::size_t lookup_params = ds.schema.fields[0].cardinality * 16;
  const double deep = mean_auc(ds, config);

  config.model.methods.by_field = {{"c1", "lookup"}};
  const double lookup = mean_auc(ds, config);

  std::ostringstream os;
  os << "deep " << deep << " (" << deep_params << " params) vs lookup "
     << lookup << " (" << lookup_params << " params)";
  detail = os.str();
  return deep_params * 4 <= lookup_params && deep >= lookup - 0.005;
}

// --- criterion 5: precompute equivalence ------------------------------------

bool precompute_equivalence(std::string& detail) {
  Rng rng(505);
  CatEmbedOptions o;
  o.d = 16;
  o.d_hat = 4;
  DeepCatEmbedder e(1000, o, rng);
  PrecomputedCache cache(e);
  cache.precompute_all();
  Tape tape;
  double worst = 0.0;
  for (std::uint32_t x = 0; x < 1000; ++x) {
    Tensor live = e.embed(tape, x);
    for (std::size_t c = 0; c < 16; ++c)
      worst = std::max(worst,
                       std::abs(cache.full_table().at(x, c) - live.at(c)));
    tape.clear();
  }
  std::ostringstream os;
  os << "max row deviation " << worst;
  detail = os.str();
  return worst < 1e-12;
}

// --- criterion 6: expansion statistics --------------------------------------

bool expansion_statistics(std::string& detail) {
  Rng rng(606);
  NumEmbedOptions o;
  o.d = 8;
  o.layers = 1;
  o.width = 8;
  DeepNumEmbedder e(o, rng);
  for (std::size_t k = 0; k < 8; ++k) {
    e.gamma().at(k) = 0.5 + rng.uniform();
    e.beta().at(k) = rng.normal(0.0, 1.0);
  }
  const std::size_t n = 100000;
  std::vector<double> mean(8, 0.0), sq(8, 0.0);
  Rng sampler(607);
  Tape tape;
  for (std::size_t i = 0; i < n; ++i) {
    Tensor v = e.expand(tape, sampler.uniform());
    for (std::size_t k = 0; k < 8; ++k) {
      mean[k] += v.at(k);
      sq[k] += v.at(k) * v.at(k);
    }
    tape.clear();
  }
  for (std::size_t k = 0; k < 8; ++k) {
    mean[k] /= n;
    const double var = sq[k] / n - mean[k] * mean[k];
    const double want_mean = e.gamma().at(k) * 0.5 + e.beta().at(k);
    const double want_var = e.gamma().at(k) * e.gamma().at(k) / 12.0;
    if (std::abs(mean[k] - want_mean) >
        0.01 * std::max(1.0, std::abs(want_mean))) {
      detail = "mean off at component " + std::to_string(k);
      return false;
    }
    if (std::abs(var - want_var) > 0.01 * want_var) {
      detail = "variance off at component " + std::to_string(k);
      return false;
    }
  }
  detail = "all components within 1%";
  return true;
}

// --- criterion 7: auc oracle -------------------------------------------------

bool auc_oracle(std::string& detail) {
  Rng rng(707);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 4 + rng.below(97);
    std::vector<double> preds(n), labels(n);
    for (std::size_t i = 0; i < n; ++i) {
      preds[i] = std::round(rng.uniform() * 10.0) / 10.0;  // forces ties
      labels[i] = rng.bernoulli(0.5) ? 1.0 : 0.0;
    }
    labels[0] = 1.0;
    labels[1] = 0.0;
    if (auc(preds, labels) != test::pairwise_auc(preds, labels)) {
      detail = "mismatch at trial " + std::to_string(trial);
      return false;
    }
  }
  detail = "100 instances exact, ties included";
  return true;
}

// --- criterion 8: encoder properties ----------------------------------------

bool encoder_properties(std::string& detail) {
  const std::size_t v = 4096;
  BinaryEmbedder bin(v);
  Tape tape;
  std::set<std::vector<double>> codes;
  for (std::uint32_t x = 0; x < v; ++x) {
    codes.insert(bin.embed(tape, x).values());
    if (x % 256 == 0) tape.clear();
  }
  if (codes.size() != v) {
    detail = "binary code collision below v=4096";
    return false;
  }
  // Onehot injectivity is positional; spot-verify the structure.
  OnehotEmbedder one(v);
  for (std::uint32_t x : {0u, 1u, 2048u, 4095u}) {
    Tensor code = one.embed(tape, x);
    for (std::size_t i = 0; i < v; ++i)
      if (code.at(i) != (i == x ? 1.0 : 0.0)) {
        detail = "onehot structure broken";
        return false;
      }
  }

  Rng rng(808);
  CatEmbedOptions o;
  o.d = 8;
  o.hash_k = 2;
  o.hash_vhat = 256;
  HashEmbedder hash(v, o, rng);
  for (std::size_t t = 0; t < hash.table_count(); ++t) {
    std::set<std::size_t> buckets;
    bool collided = false;
    for (std::uint32_t x = 0; x < v; ++x)
      if (!buckets.insert(hash.bucket(t, x)).second) {
        collided = true;
        break;
      }
    if (!collided) {
      detail = "no collision in hash table " + std::to_string(t);
      return false;
    }
  }
  detail = "binary injective, hashing collides, exhaustive v=4096";
  return true;
}

// --- criterion 9: reproducibility -------------------------------------------

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

bool reproducibility(std::string& detail) {
  RunConfig config;
  config.synth = "numeric";
  config.n = 2000;
  config.d = 4;
  config.layers = 1;
  config.width = 8;
  config.seed_count = 2;
  config.max_epochs = 4;
  config.batch_size = 256;

  const fs::path a = "/tmp/tabembed_accept_a", b = "/tmp/tabembed_accept_b";
  fs::remove_all(a);
  fs::remove_all(b);
  config.out_dir = a.string();
  cmd_train(config);
  config.out_dir = b.string();
  cmd_train(config);

  auto strip = [](std::string text) {
    const auto pos = text.find("\"wall_clock_seconds\"");
    if (pos == std::string::npos) return text;
    return text.erase(pos, text.find('\n', pos) - pos);
  };
  const bool reports = strip(slurp(a / "report.json")) ==
                       strip(slurp(b / "report.json"));
  const bool epochs = slurp(a / "epochs.csv") == slurp(b / "epochs.csv");
  const bool ckpts = slurp(a / "model.ckpt") == slurp(b / "model.ckpt");
  fs::remove_all(a);
  fs::remove_all(b);
  detail = std::string("report ") + (reports ? "==" : "!=") + ", checkpoint " +
           (ckpts ? "bit-identical" : "differs");
  return reports && epochs && ckpts;
}

// --- criterion 10: protocol conformance -------------------------------------

bool protocol_conformance(std::string& detail) {
  for (std::size_t n : {std::size_t(10), std::size_t(1000),
                        std::size_t(12345)}) {
    Dataset ds;
    ds.schema = parse_schema_text("x = numerical");
    ds.n_rows = n;
    ds.num_cols.assign(1, std::vector<double>(n, 0.5));
    ds.labels.assign(n, 0.0);
    ds.encoded = true;
    split_dataset(ds, 3);
    std::size_t train = 0, val = 0, test = 0;
    for (Split s : ds.split) {
      if (s == Split::kTrain) ++train;
      else if (s == Split::kVal) ++val;
      else ++test;
    }
    if (val != n / 10 || test != n / 10 || train != n - 2 * (n / 10)) {
      detail = "split sizes wrong at n=" + std::to_string(n);
      return false;
    }
  }

  Dataset ds = synth_numeric(2000, 10);
  split_dataset(ds, 10);
  TrainConfig config;
  config.model.num.d = 4;
  config.model.num.layers = 1;
  config.model.num.width = 8;
  config.model.backbone_width = 8;
  config.max_epochs = 12;
  config.batch_size = 256;
  Rng rng(10);
  Model model(ds.schema, config.model, rng);
  RunResult run = train_once(model, ds, config, 0);
  const auto val_rows = ds.rows_in(Split::kVal);
  std::vector<double> preds = predict(model, ds, val_rows);
  std::vector<double> labels;
  for (std::size_t r : val_rows) labels.push_back(ds.labels[r]);
  const double restored = auc(preds, labels);
  std::ostringstream os;
  os << "restored val AUC " << restored << " vs best " << run.best_val_auc;
  detail = os.str();
  return std::abs(restored - run.best_val_auc) < 1e-12;
}

}  // namespace

int main() {
  Gate gate;
  gate.run(1, "gradient suite, finite-difference oracle", gradient_suite);
  gate.run(2, "parameter accounting, exhaustive grids", parameter_accounting);
  gate.run(3, "numerical deep embedding beats linear by 0.01 AUC",
           numerical_effectiveness);
  gate.run(4, "categorical compression at <= 25% params, AUC held",
           categorical_compression);
  gate.run(5, "precomputed table equals on-the-fly embedding",
           precompute_equivalence);
  gate.run(6, "expansion Monte-Carlo statistics within 1%",
           expansion_statistics);
  gate.run(7, "rank AUC equals pairwise oracle exactly", auc_oracle);
  gate.run(8, "encoder injectivity and hashing collisions",
           encoder_properties);
  gate.run(9, "training artifacts reproduce bit-for-bit", reproducibility);
  gate.run(10, "split ratios and early-stop restore contract",
           protocol_conformance);
  if (gate.failures) {
    std::printf("%d criteria FAILED\n", gate.failures);
    return 1;
  }
  std::printf("all 10 criteria passed\n");
  return 0;
}
