// Copyright (c) 2026, the tabembed authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tabembed/tensor.hpp"

namespace tabembed {
namespace ops {

// --- elementwise -----------------------------------------------------------

Tensor add(Tape& tape, const Tensor& a, const Tensor& b);
Tensor mul(Tape& tape, const Tensor& a, const Tensor& b);
Tensor scale(Tape& tape, const Tensor& a, double c);
Tensor relu(Tape& tape, const Tensor& x);
Tensor sigmoid(Tape& tape, const Tensor& x);

// ExU activation: min(max((x - b) * exp(w), 0), cap).
// w and b either match x's shape exactly, or x is a matrix and w, b are
// per-column vectors broadcast over rows.
Tensor exu(Tape& tape, const Tensor& x, const Tensor& w, const Tensor& b,
           double cap);

// --- linear algebra --------------------------------------------------------

Tensor matmul(Tape& tape, const Tensor& a, const Tensor& b);

// A [m x k] * B^T with B [n x k]; lets batched layers reuse the
// [d_out x d_in] weight layout of affine().
Tensor matmul_nt(Tape& tape, const Tensor& a, const Tensor& b);

// W [d_out x d_in] * x [d_in] + b [d_out]
Tensor affine(Tape& tape, const Tensor& x, const Tensor& W, const Tensor& b);

// M [B x W] + v [W] broadcast over rows.
Tensor add_rowvec(Tape& tape, const Tensor& m, const Tensor& v);

// out[i, k] = xs[i] * gamma[k] + beta[k].  The scalar column xs is data,
// not a differentiable input.
Tensor expand_batch(Tape& tape, std::span<const double> xs,
                    const Tensor& gamma, const Tensor& beta);

// --- reductions / reshaping ------------------------------------------------

Tensor sum(Tape& tape, const Tensor& x);
// Vector [n] viewed as a [1 x n] matrix (gradient passes through).
Tensor as_row(Tape& tape, const Tensor& x);
Tensor concat(Tape& tape, const std::vector<Tensor>& parts);
// Horizontal concatenation of matrices with equal row counts.
Tensor concat_cols(Tape& tape, const std::vector<Tensor>& parts);

// --- indexing --------------------------------------------------------------

Tensor row_lookup(Tape& tape, const Tensor& table, std::size_t index);
Tensor gather_rows(Tape& tape, const Tensor& table,
                   std::span<const std::uint32_t> indices);

// --- softmax ---------------------------------------------------------------

Tensor softmax(Tape& tape, const Tensor& x);
Tensor softmax_rows(Tape& tape, const Tensor& m);

// out = s[index] * a, with s a tracked vector (e.g. softmaxed agg weights).
Tensor scale_by_element(Tape& tape, const Tensor& a, const Tensor& s,
                        std::size_t index);

// --- loss ------------------------------------------------------------------

// -mean(y log p + (1-y) log(1-p)) with p clamped to [eps, 1-eps], eps=1e-7.
// y is data (not differentiated).
Tensor bce_loss(Tape& tape, const Tensor& p, const Tensor& y);

inline constexpr double kBceEps = 1e-7;

}  // namespace ops
}  // namespace tabembed
