// Copyright 2026 The hero-desk Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "hero/autodiff/tensor.hpp"

namespace hero::ad {

/// Handle to a node recorded on a Tape.
struct Var {
  std::size_t index = 0;
};

/// Record-on-evaluate computation graph over dense double tensors.
///
/// Every op evaluates eagerly and appends a node carrying its value and a
/// backward closure. Matrices are row-major [rows, cols]; a 1-D tensor [n] is
/// treated as a single row wherever a 2-D operand is expected. Shape errors
/// throw std::invalid_argument naming the op and the offending shapes.
///
/// A tape is single-threaded and meant to be discarded after one backward pass.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  /// Leaf that never receives gradients.
  Var constant(Tensor value);
  /// Leaf bound to a ParamStore entry. Trainable entries receive gradients
  /// on backward(); frozen entries act as constants.
  Var param(const ParamStore& store, const std::string& name);

  const Tensor& value(Var v) const { return nodes_[v.index].value; }
  const std::vector<double>& grad(Var v) const { return nodes_[v.index].grad; }
  bool requires_grad(Var v) const { return nodes_[v.index].requires_grad; }
  std::size_t size() const { return nodes_.size(); }

  // --- ops -----------------------------------------------------------------
  Var matmul(Var a, Var b);
  /// Elementwise sum. `b` may also be a row vector [n] broadcast over the rows of `a` [m, n].
  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var mul(Var a, Var b);
  Var scale(Var a, double factor);
  Var add_scalar(Var a, double offset);
  Var relu(Var a);
  Var tanh(Var a);
  Var exp(Var a);
  Var sum(Var a);
  Var mean(Var a);
  /// Per-row sum of a matrix [m, n] -> [m].
  Var row_sum(Var a);
  /// Mean of squared differences, a scalar.
  Var squared_error(Var a, Var b);
  /// Row-wise cosine similarity of two [m, n] operands -> [m].
  Var cosine_similarity(Var a, Var b);
  Var max_const(Var a, double c);
  Var min_const(Var a, double c);
  Var clamp(Var a, double lo, double hi);
  Var minimum(Var a, Var b);
  /// Column-wise concatenation of matrices sharing a row count.
  Var concat(std::span<const Var> parts);
  Var concat(Var a, Var b);
  /// Selects rows of a matrix (repeats allowed).
  Var gather_rows(Var a, std::span<const std::size_t> rows);

  /// Reverse pass from a scalar loss. Every trainable entry of `store` gets
  /// its grad overwritten: ∂loss/∂entry, or zeros if the entry was unused.
  void backward(Var loss, ParamStore& store);
  /// Same as above for parameters split over several stores.
  void backward(Var loss, std::span<ParamStore* const> stores);

 private:
  struct Node {
    Tensor value;
    std::vector<double> grad;
    std::vector<std::size_t> parents;
    std::function<void(Tape&, Node&)> backward;
    bool requires_grad = false;
    const ParamStore* store = nullptr;
    std::string param_name;
  };

  Node& node(Var v) { return nodes_[v.index]; }
  const Node& node(Var v) const { return nodes_[v.index]; }
  std::vector<double>& grad_buffer(std::size_t index);
  Var push(Tensor value, std::vector<std::size_t> parents,
           std::function<void(Tape&, Node&)> backward);

  std::vector<Node> nodes_;
};

}  // namespace hero::ad
