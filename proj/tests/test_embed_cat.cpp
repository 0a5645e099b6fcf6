// Copyright (c) 2026, the tabembed authors
// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "support.hpp"
#include "tabembed/embed_cat.hpp"

using namespace tabembed;
using tabembed::test::max_grad_error;

namespace {

CatEmbedOptions small_options(std::size_t d, std::size_t d_hat,
                              std::size_t layers = 2) {
  CatEmbedOptions o;
  o.d = d;
  o.d_hat = d_hat;
  o.layers = layers;
  return o;
}

}  // namespace

TEST_CASE("onehot code") {
  OnehotEmbedder e(4);
  Tape tape;
  Tensor out = e.embed(tape, 2);
  CHECK(out.values() == std::vector<double>{0, 0, 1, 0});
  // Reserved OOV slot embeds to all zeros.
  Tensor oov = e.embed(tape, 4);
  CHECK(oov.values() == std::vector<double>{0, 0, 0, 0});
  CHECK_THROWS_AS(e.embed(tape, 5), OovError);
}

TEST_CASE("binary code length and digits") {
  CHECK(binary_code_length(1) == 1);
  CHECK(binary_code_length(2) == 1);
  CHECK(binary_code_length(5) == 3);
  CHECK(binary_code_length(4096) == 12);
  BinaryEmbedder e(5);
  CHECK(e.dim() == 3);
  Tape tape;
  // 5 in three most-significant-first binary digits.
  Tensor out = e.embed(tape, 5);
  CHECK(out.values() == std::vector<double>{1, 0, 1});
}

TEST_CASE("onehot and binary codes are injective up to 4096") {
  for (std::size_t v : {2u, 3u, 100u, 4096u}) {
    BinaryEmbedder bin(v);
    Tape tape;
    std::set<std::vector<double>> seen;
    for (std::uint32_t x = 0; x < v; ++x)
      seen.insert(bin.embed(tape, x).values());
    CHECK(seen.size() == v);
    tape.clear();
  }
  // Onehot injectivity is structural: position of the single 1.
  OnehotEmbedder one(4096);
  Tape tape;
  for (std::uint32_t x : {0u, 17u, 4095u}) {
    Tensor out = one.embed(tape, x);
    for (std::size_t i = 0; i < 4096; ++i)
      CHECK(out.at(i) == (i == x ? 1.0 : 0.0));
    tape.clear();
  }
}

TEST_CASE("lookup returns table rows") {
  Rng rng(1);
  LookupEmbedder e(5, 3, rng);
  Tape tape;
  Tensor out = e.embed(tape, 3);
  for (std::size_t c = 0; c < 3; ++c) CHECK(out.at(c) == e.table().at(3, c));
  CHECK(e.allocated_params() == 15);
}

TEST_CASE("hashing collides when buckets are scarce") {
  Rng rng(2);
  CatEmbedOptions o = small_options(8, 2);
  o.hash_k = 2;
  o.hash_vhat = 4;
  HashEmbedder e(10, o, rng);
  for (std::size_t t = 0; t < e.table_count(); ++t) {
    std::set<std::size_t> buckets;
    for (std::uint32_t x = 0; x < 10; ++x) buckets.insert(e.bucket(t, x));
    CHECK(buckets.size() < 10);  // pigeonhole: at least one collision
  }
}

TEST_CASE("hashing parameter count") {
  CHECK(param_count_categorical(CatMethod::kHashing, 1000, 8, 0, 2, 16, 2) ==
        256);
  Rng rng(3);
  CatEmbedOptions o = small_options(8, 0);
  o.hash_k = 2;
  o.hash_vhat = 16;
  HashEmbedder e(1000, o, rng);
  CHECK(e.allocated_params() - e.extra_params() == 256);
  CHECK(e.extra_params() == 2);
}

TEST_CASE("identification table lookup") {
  Rng rng(4);
  DeepCatEmbedder e(5, small_options(8, 2), rng);
  Tape tape;
  Tensor row0 = e.identify(tape, 0);
  for (std::size_t c = 0; c < 2; ++c) CHECK(row0.at(c) == e.id_table().at(0, c));
  // Hand-filled table: identification is exact row indexing.
  for (std::size_t r = 0; r < 5; ++r)
    for (std::size_t c = 0; c < 2; ++c)
      e.id_table().at(r, c) = static_cast<double>(10 * r + c);
  Tensor row3 = e.identify(tape, 3);
  CHECK(row3.at(0) == 30.0);
  CHECK(row3.at(1) == 31.0);
  // Distinct entities have distinct identification vectors after init.
  Rng rng2(5);
  DeepCatEmbedder fresh(6, small_options(8, 2), rng2);
  std::set<std::vector<double>> seen;
  for (std::uint32_t x = 0; x < 6; ++x)
    seen.insert(fresh.identify(tape, x).values());
  CHECK(seen.size() == 6);
}

TEST_CASE("deep transformation zero network gives zero vector") {
  Rng rng(6);
  DeepCatEmbedder e(5, small_options(8, 2), rng);
  for (const Tensor& p : e.ffn().parameters())
    for (std::size_t i = 0; i < p.numel(); ++i) p.at(i) = 0.0;
  Tape tape;
  for (std::uint32_t x : {0u, 3u}) {
    Tensor out = e.embed(tape, x);
    for (std::size_t c = 0; c < 8; ++c) CHECK(out.at(c) == 0.0);
  }
}

TEST_CASE("deep transformation manual single-affine arithmetic") {
  Rng rng(7);
  // Single affine layer 2 -> 3, no activation on the last layer.
  DeepCatEmbedder e(4, small_options(3, 2, 1), rng);
  auto params = e.ffn().parameters();  // weight [3x2], bias [3]
  REQUIRE(params.size() == 2);
  params[0].at(0, 0) = 1.0;
  params[0].at(0, 1) = -1.0;
  params[0].at(1, 0) = 0.5;
  params[0].at(1, 1) = 0.25;
  params[0].at(2, 0) = 2.0;
  params[0].at(2, 1) = 0.0;
  params[1].at(0) = 0.1;
  params[1].at(1) = 0.2;
  params[1].at(2) = -0.3;
  Tape tape;
  Tensor out = e.deep_transform(tape, Tensor::vector({0.4, 0.6}));
  CHECK(out.at(0) == doctest::Approx(0.4 - 0.6 + 0.1).epsilon(1e-12));
  CHECK(out.at(1) == doctest::Approx(0.2 + 0.15 + 0.2).epsilon(1e-12));
  CHECK(out.at(2) == doctest::Approx(0.8 - 0.3).epsilon(1e-12));
}

TEST_CASE("deep embedding gradient vs finite differences") {
  Rng rng(8);
  DeepCatEmbedder e(6, small_options(4, 2), rng);
  auto loss_value = [&] {
    Tape t;
    return ops::sum(t, e.embed(t, 2)).at(0);
  };
  auto backward = [&] {
    Tape t;
    t.backward(ops::sum(t, e.embed(t, 2)));
  };
  CHECK(max_grad_error(loss_value, backward, e.parameters()) < 1e-4);
}

TEST_CASE("parameter count formulas match allocation") {
  CHECK(param_count_categorical(CatMethod::kLookup, 1000, 16, 0, 2, 16, 2) ==
        16000);
  CHECK(param_count_categorical(CatMethod::kOnehot, 1000, 16, 0, 2, 16, 2) ==
        0);
  // Single affine 4 -> 16: 1000*4 + (64 + 16) = 4080, about 25.5% of lookup.
  CHECK(param_count_categorical(CatMethod::kDeep, 1000, 16, 4, 2, 16, 1) ==
        4080);

  Rng rng(9);
  for (std::size_t v : {10u, 50u}) {
    for (std::size_t d_hat : {2u, 4u}) {
      CatEmbedOptions o = small_options(16, d_hat);
      for (CatMethod m : {CatMethod::kOnehot, CatMethod::kBinary,
                          CatMethod::kLookup, CatMethod::kHashing,
                          CatMethod::kDeep}) {
        auto e = make_cat_embedder(m, v, o, rng);
        CHECK(param_count_categorical(m, v, 16, d_hat, o.hash_k, o.hash_vhat,
                                      o.layers) ==
              e->allocated_params() - e->extra_params());
      }
    }
  }
}

TEST_CASE("batch embedding equals per-sample embedding") {
  Rng rng(10);
  CatEmbedOptions o = small_options(8, 2);
  std::vector<std::uint32_t> xs = {0, 3, 7, 3, 9};
  for (CatMethod m : {CatMethod::kOnehot, CatMethod::kBinary,
                      CatMethod::kLookup, CatMethod::kHashing,
                      CatMethod::kDeep}) {
    auto e = make_cat_embedder(m, 10, o, rng);
    Tape tape;
    Tensor batch = e->embed_batch(tape, xs);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      Tensor single = e->embed(tape, xs[i]);
      for (std::size_t c = 0; c < e->dim(); ++c)
        CHECK(batch.at(i, c) == doctest::Approx(single.at(c)).epsilon(1e-12));
    }
  }
}

TEST_CASE("precomputed cache equivalence, hits and staleness") {
  Rng rng(11);
  DeepCatEmbedder e(100, small_options(8, 2), rng);
  PrecomputedCache cache(e);
  cache.precompute_all();
  CHECK(cache.full_table().rows() == 100);
  Tape tape;
  for (std::uint32_t x = 0; x < 100; ++x) {
    Tensor live = e.embed(tape, x);
    const auto cached = cache.fetch(x);
    for (std::size_t c = 0; c < 8; ++c)
      CHECK(std::abs(cached[c] - live.at(c)) < 1e-12);
    tape.clear();
  }
  const std::size_t hits_before = cache.hits();
  cache.fetch(42);
  CHECK(cache.hits() == hits_before + 1);

  // A parameter update bumps the version; the cache must recompute.
  e.id_table().at(0, 0) += 0.5;
  e.bump_version();
  const std::size_t misses_before = cache.misses();
  const auto fresh = cache.fetch(0);
  CHECK(cache.misses() == misses_before + 1);
  Tensor live = e.embed(tape, 0);
  for (std::size_t c = 0; c < 8; ++c)
    CHECK(std::abs(fresh[c] - live.at(c)) < 1e-12);
}

TEST_CASE("oov handling across methods") {
  Rng rng(12);
  CatEmbedOptions o = small_options(8, 2);
  DeepCatEmbedder e(10, o, rng);
  Tape tape;
  // The reserved index embeds the frozen zero identification row.
  Tensor oov = e.identify(tape, 10);
  for (std::size_t c = 0; c < 2; ++c) CHECK(oov.at(c) == 0.0);
  CHECK_THROWS_AS(e.embed(tape, 11), OovError);
}
