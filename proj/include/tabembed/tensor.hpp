// Copyright (c) 2026, the tabembed authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <unordered_set>
#include <vector>

#include "tabembed/errors.hpp"

namespace tabembed {

// Dense row-major tensor of doubles. Copies share storage (handle semantics);
// use clone() for a deep copy.
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(std::vector<std::size_t> shape, bool tracked = false);
  static Tensor full(std::vector<std::size_t> shape, double value,
                     bool tracked = false);
  static Tensor from(std::vector<std::size_t> shape,
                     std::vector<double> values, bool tracked = false);
  static Tensor scalar(double value, bool tracked = false);
  static Tensor vector(std::vector<double> values, bool tracked = false);

  bool defined() const { return impl_ != nullptr; }
  const std::vector<std::size_t>& shape() const { return impl_->shape; }
  std::size_t numel() const { return impl_->values.size(); }
  std::size_t rank() const { return impl_->shape.size(); }
  std::size_t rows() const;
  std::size_t cols() const;

  // Accessors mutate the shared storage, so they stay usable through a
  // const handle, like shared_ptr.
  std::vector<double>& values() const { return impl_->values; }
  double& at(std::size_t i) const { return impl_->values[i]; }
  double& at(std::size_t r, std::size_t c) const;

  bool tracked() const { return impl_->tracked; }
  void set_tracked(bool t) const { impl_->tracked = t; }

  bool has_grad() const { return !impl_->grad.empty(); }
  std::vector<double>& grad() const;
  void ensure_grad() const;
  void zero_grad() const;

  Tensor clone() const;

  // Identity of the underlying storage; used by the tape.
  const void* id() const { return impl_.get(); }

 private:
  struct Impl {
    std::vector<std::size_t> shape;
    std::vector<double> values;
    std::vector<double> grad;  // empty until first needed
    bool tracked = false;
  };
  std::shared_ptr<Impl> impl_;
};

// Records the forward pass as an ordered list of nodes; backward() replays
// them in reverse. Confined to one execution context at a time.
class Tape {
 public:
  // fn pulls the output gradient and accumulates into the input gradients.
  void record(const Tensor& output, std::function<void()> fn);

  bool produced(const Tensor& t) const {
    return outputs_.count(t.id()) != 0;
  }

  // Populates grad for every tracked tensor reachable from `loss`.
  // Gradients accumulate; callers reset them between passes.
  void backward(Tensor loss);

  void clear();
  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Tensor output;
    std::function<void()> fn;
  };
  std::vector<Node> nodes_;
  std::unordered_set<const void*> outputs_;
};

}  // namespace tabembed
