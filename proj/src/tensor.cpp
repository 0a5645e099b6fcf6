// Copyright (c) 2026, the tabembed authors
// SPDX-License-Identifier: Apache-2.0
#include "tabembed/tensor.hpp"

#include <numeric>

namespace tabembed {

namespace {
std::size_t product(const std::vector<std::size_t>& shape) {
  std::size_t n = 1;
  for (std::size_t s : shape) n *= s;
  return n;
}
}  // namespace

Tensor Tensor::zeros(std::vector<std::size_t> shape, bool tracked) {
  return full(std::move(shape), 0.0, tracked);
}

Tensor Tensor::full(std::vector<std::size_t> shape, double value,
                    bool tracked) {
  Tensor t;
  t.impl_ = std::make_shared<Impl>();
  t.impl_->values.assign(product(shape), value);
  t.impl_->shape = std::move(shape);
  t.impl_->tracked = tracked;
  return t;
}

Tensor Tensor::from(std::vector<std::size_t> shape, std::vector<double> values,
                    bool tracked) {
  if (product(shape) != values.size())
    throw DimensionError("tensor: shape does not match value count");
  Tensor t;
  t.impl_ = std::make_shared<Impl>();
  t.impl_->shape = std::move(shape);
  t.impl_->values = std::move(values);
  t.impl_->tracked = tracked;
  return t;
}

Tensor Tensor::scalar(double value, bool tracked) {
  return from({1}, {value}, tracked);
}

Tensor Tensor::vector(std::vector<double> values, bool tracked) {
  const std::size_t n = values.size();
  return from({n}, std::move(values), tracked);
}

std::size_t Tensor::rows() const {
  if (rank() != 2) throw DimensionError("tensor: rows() on non-matrix");
  return impl_->shape[0];
}

std::size_t Tensor::cols() const {
  if (rank() != 2) throw DimensionError("tensor: cols() on non-matrix");
  return impl_->shape[1];
}

double& Tensor::at(std::size_t r, std::size_t c) const {
  return impl_->values[r * impl_->shape[1] + c];
}

std::vector<double>& Tensor::grad() const {
  ensure_grad();
  return impl_->grad;
}

void Tensor::ensure_grad() const {
  if (impl_->grad.empty()) impl_->grad.assign(impl_->values.size(), 0.0);
}

void Tensor::zero_grad() const {
  impl_->grad.assign(impl_->values.size(), 0.0);
}

Tensor Tensor::clone() const {
  Tensor t;
  t.impl_ = std::make_shared<Impl>(*impl_);
  return t;
}

void Tape::record(const Tensor& output, std::function<void()> fn) {
  nodes_.push_back(Node{output, std::move(fn)});
  outputs_.insert(output.id());
}

void Tape::backward(Tensor loss) {
  if (loss.numel() != 1)
    throw ContractError("backward: loss must be a scalar");
  if (!produced(loss))
    throw ContractError("backward: loss was not produced on this tape");
  loss.ensure_grad();
  loss.grad()[0] += 1.0;
  for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) {
    it->output.ensure_grad();
    it->fn();
  }
}

void Tape::clear() {
  nodes_.clear();
  outputs_.clear();
}

}  // namespace tabembed
