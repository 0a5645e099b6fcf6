// Copyright (c) 2026, the tabembed authors
// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "tabembed/checkpoint.hpp"
#include "tabembed/model.hpp"

using namespace tabembed;
using tabembed::test::max_grad_error;

namespace {

ModelOptions tiny_options() {
  ModelOptions o;
  o.num.d = 3;
  o.num.layers = 1;
  o.num.width = 3;
  o.cat.d = 4;
  o.cat.d_hat = 2;
  o.cat.layers = 1;
  o.backbone_width = 4;
  return o;
}

FeatureSchema mixed_schema(std::size_t v) {
  FeatureSchema schema = parse_schema_text("x = numerical\nc = categorical");
  schema.fields[1].cardinality = v;
  return schema;
}

void zero_all(const std::vector<Tensor>& params) {
  for (const Tensor& p : params)
    for (std::size_t i = 0; i < p.numel(); ++i) p.at(i) = 0.0;
}

}  // namespace

TEST_CASE("embedded row composes per-field embeddings") {
  Rng rng(1);
  Model model(mixed_schema(5), tiny_options(), rng);
  // Zero-weight deep methods: numerical part is beta, categorical part 0.
  zero_all(model.parameters());
  Tape tape;
  std::vector<double> nums = {0.0};
  std::vector<std::uint32_t> cats = {2};
  Tensor row = model.embed_row(tape, nums, cats);
  REQUIRE(row.numel() == 7);
  for (std::size_t i = 0; i < 7; ++i) CHECK(row.at(i) == 0.0);
}

TEST_CASE("flattened width adds per-method dims") {
  Rng rng(2);
  ModelOptions o = tiny_options();
  o.methods.by_field = {{"x", "none"}, {"c", "binary"}};
  Model model(mixed_schema(5), o, rng);  // 1 (none) + 3 (binary for v=5)
  CHECK(model.input_width() == 4);
}

TEST_CASE("consistent field permutation leaves prediction unchanged") {
  Rng rng(3);
  FeatureSchema ab = parse_schema_text("a = numerical\nb = numerical");
  FeatureSchema ba = parse_schema_text("b = numerical\na = numerical");
  ModelOptions o = tiny_options();
  Model m1(ab, o, rng);
  Model m2(ba, o, rng);
  // Copy m1's blocks into m2 under the swapped field order.
  auto n1 = m1.named_parameters();
  auto n2 = m2.named_parameters();
  for (auto& [name, tensor] : n2)
    for (const auto& [name1, tensor1] : n1)
      if (name == name1 && name.rfind("backbone.", 0) != 0)
        tensor.values() = tensor1.values();
  // The backbone consumes [emb(a); emb(b)] in m1 and [emb(b); emb(a)] in
  // m2: swap its first-layer column blocks to match.
  const std::size_t d = o.num.d;
  for (auto& [name, tensor] : n2) {
    if (name.rfind("backbone.", 0) != 0) continue;
    for (const auto& [name1, tensor1] : n1) {
      if (name != name1) continue;
      tensor.values() = tensor1.values();
      if (name == "backbone.layer0.weight")
        for (std::size_t r = 0; r < tensor.rows(); ++r)
          for (std::size_t c = 0; c < d; ++c) {
            tensor.at(r, c) = tensor1.at(r, c + d);
            tensor.at(r, c + d) = tensor1.at(r, c);
          }
    }
  }
  Tape tape;
  std::vector<std::uint32_t> no_cats;
  std::vector<double> xs_ab = {0.3, 0.8};
  std::vector<double> xs_ba = {0.8, 0.3};
  Tensor p1 = m1.forward(tape, xs_ab, no_cats);
  Tensor p2 = m2.forward(tape, xs_ba, no_cats);
  CHECK(std::abs(p1.at(0) - p2.at(0)) < 1e-12);
}

TEST_CASE("zero backbone weights score one half") {
  Rng rng(4);
  Model model(mixed_schema(5), tiny_options(), rng);
  for (auto& [name, tensor] : model.named_parameters())
    if (name.rfind("backbone.", 0) == 0)
      for (std::size_t i = 0; i < tensor.numel(); ++i) tensor.at(i) = 0.0;
  Tape tape;
  std::vector<double> nums = {0.4};
  std::vector<std::uint32_t> cats = {1};
  CHECK(model.forward(tape, nums, cats).at(0) == 0.5);
}

TEST_CASE("hand-set single-unit backbone matches manual arithmetic") {
  Rng rng(5);
  FeatureSchema schema = parse_schema_text("x = numerical");
  ModelOptions o;
  o.num.d = 1;
  o.num.layers = 1;
  o.num.width = 1;
  o.backbone_width = 1;
  o.methods.by_field = {{"x", "none"}};
  Model model(schema, o, rng);
  auto named = model.named_parameters();
  REQUIRE(named.size() == 6);  // 3 backbone layers, weight + bias each
  for (auto& [name, tensor] : named) {
    for (std::size_t i = 0; i < tensor.numel(); ++i)
      tensor.at(i) = name.find("weight") != std::string::npos ? 2.0 : 0.5;
  }
  // x=0.25: h1 = relu(2*0.25+0.5)=1, h2 = relu(2*1+0.5)=2.5,
  // logit = 2*2.5+0.5 = 5.5.
  Tape tape;
  std::vector<double> nums = {0.25};
  std::vector<std::uint32_t> no_cats;
  const double p = model.forward(tape, nums, no_cats).at(0);
  CHECK(p == doctest::Approx(1.0 / (1.0 + std::exp(-5.5))).epsilon(1e-12));
}

TEST_CASE("end-to-end gradient vs finite differences") {
  Rng rng(6);
  Model model(mixed_schema(4), tiny_options(), rng);
  std::vector<double> nums = {0.6};
  std::vector<std::uint32_t> cats = {1};
  Tensor y = Tensor::vector({1.0});
  auto loss_value = [&] {
    Tape t;
    return ops::bce_loss(t, model.forward(t, nums, cats), y).at(0);
  };
  auto backward = [&] {
    Tape t;
    t.backward(ops::bce_loss(t, model.forward(t, nums, cats), y));
  };
  CHECK(max_grad_error(loss_value, backward, model.parameters()) < 1e-4);
}

TEST_CASE("batched forward equals per-row forward") {
  Rng rng(7);
  Dataset ds = synth_categorical(200, 12, 8);
  ModelOptions o = tiny_options();
  Model model(ds.schema, o, rng);
  std::vector<std::size_t> rows = {0, 5, 17, 100};
  Tape tape;
  Tensor batch = model.forward_batch(tape, ds, rows);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::vector<double> no_nums;
    std::vector<std::uint32_t> cats = {ds.cat_cols[0][rows[i]]};
    Tensor single = model.forward(tape, no_nums, cats);
    CHECK(batch.at(i, 0) == doctest::Approx(single.at(0)).epsilon(1e-12));
  }
}

TEST_CASE("parameter counts split embeddings from backbone") {
  Rng rng(9);
  Model model(mixed_schema(10), tiny_options(), rng);
  std::size_t embedding = 0, backbone = 0;
  for (const auto& [name, tensor] : model.named_parameters()) {
    if (name.rfind("backbone.", 0) == 0) backbone += tensor.numel();
    else embedding += tensor.numel();
  }
  CHECK(model.embedding_param_count() == embedding);
  CHECK(model.backbone_param_count() == backbone);
}

TEST_CASE("checkpoint round trip is bit-exact") {
  Rng rng(10);
  Model model(mixed_schema(6), tiny_options(), rng);
  const std::string path = "/tmp/tabembed_test_ckpt.bin";
  Checkpoint saved = checkpoint_from_model(model, {{"d", "3"}}, "x=numerical");
  save_checkpoint(path, saved);
  Checkpoint loaded = load_checkpoint(path);
  CHECK(loaded.param_version == saved.param_version);
  CHECK(loaded.schema_text == saved.schema_text);
  CHECK(loaded.config == saved.config);
  REQUIRE(loaded.names == saved.names);
  for (std::size_t i = 0; i < saved.arrays.size(); ++i)
    CHECK(loaded.arrays[i] == saved.arrays[i]);  // exact doubles

  Rng rng2(99);
  Model other(mixed_schema(6), tiny_options(), rng2);
  restore_model(other, loaded);
  auto a = model.named_parameters();
  auto b = other.named_parameters();
  for (std::size_t i = 0; i < a.size(); ++i)
    CHECK(a[i].second.values() == b[i].second.values());
  std::remove(path.c_str());
}
