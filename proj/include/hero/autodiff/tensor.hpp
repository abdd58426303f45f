// Copyright 2026 The hero-desk Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hero::ad {

using Shape = std::vector<std::size_t>;

std::size_t shape_numel(const Shape& shape);
std::string shape_str(const Shape& shape);

/// Dense row-major tensor of doubles. A scalar has an empty shape.
struct Tensor {
  Shape shape;
  std::vector<double> data;
  std::optional<std::vector<double>> grad;

  Tensor() = default;
  Tensor(Shape shape, std::vector<double> data);

  static Tensor zeros(Shape shape);
  static Tensor scalar(double value) { return Tensor({}, {value}); }
  static Tensor vector(std::vector<double> values);
  static Tensor matrix(std::size_t rows, std::size_t cols, std::vector<double> values);

  std::size_t numel() const { return data.size(); }
  std::size_t rank() const { return shape.size(); }
  /// Rows/cols of the 2-D view: a vector [n] is viewed as [1, n], a scalar as [1, 1].
  std::size_t rows() const;
  std::size_t cols() const;

  double item() const;
  double& at(std::size_t r, std::size_t c) { return data[r * cols() + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols() + c]; }
};

/// Named parameter collection. Iteration order is the lexicographic order of
/// names, so serialization and optimizer state are stable.
class ParamStore {
 public:
  struct Entry {
    Tensor tensor;
    bool trainable = true;
  };

  void add(const std::string& name, Tensor tensor, bool trainable = true);
  bool contains(const std::string& name) const { return entries_.count(name) > 0; }

  Tensor& at(const std::string& name);
  const Tensor& at(const std::string& name) const;

  bool trainable(const std::string& name) const;
  void set_trainable(const std::string& name, bool trainable);
  /// Sets the flag on every entry whose name starts with `prefix`.
  void set_trainable_prefix(const std::string& prefix, bool trainable);
  void set_all_trainable(bool trainable);

  void zero_grads();
  /// Copy with every entry frozen; used for the old-policy snapshot.
  ParamStore frozen_copy() const;

  const std::map<std::string, Entry>& entries() const { return entries_; }
  std::map<std::string, Entry>& entries() { return entries_; }
  std::size_t size() const { return entries_.size(); }

 private:
  std::map<std::string, Entry> entries_;
};

}  // namespace hero::ad
