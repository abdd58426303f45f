// Copyright 2026 The hero-desk Authors
// SPDX-License-Identifier: Apache-2.0

#include "hero/autodiff/tensor.hpp"

#include <sstream>
#include <stdexcept>

namespace hero::ad {

std::size_t shape_numel(const Shape& shape) {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

std::string shape_str(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) os << (i ? "," : "") << shape[i];
  os << ']';
  return os.str();
}

Tensor::Tensor(Shape s, std::vector<double> d) : shape(std::move(s)), data(std::move(d)) {
  if (shape_numel(shape) != data.size()) {
    throw std::invalid_argument("Tensor: shape " + shape_str(shape) + " does not hold " +
                                std::to_string(data.size()) + " values");
  }
}

Tensor Tensor::zeros(Shape shape) {
  const auto n = shape_numel(shape);
  return Tensor(std::move(shape), std::vector<double>(n, 0.0));
}

Tensor Tensor::vector(std::vector<double> values) {
  const auto n = values.size();
  return Tensor({n}, std::move(values));
}

Tensor Tensor::matrix(std::size_t rows, std::size_t cols, std::vector<double> values) {
  return Tensor({rows, cols}, std::move(values));
}

std::size_t Tensor::rows() const {
  if (shape.size() <= 1) return 1;
  if (shape.size() == 2) return shape[0];
  throw std::logic_error("Tensor: rank " + std::to_string(shape.size()) + " has no 2-D view");
}

std::size_t Tensor::cols() const {
  if (shape.empty()) return 1;
  if (shape.size() == 1) return shape[0];
  if (shape.size() == 2) return shape[1];
  throw std::logic_error("Tensor: rank " + std::to_string(shape.size()) + " has no 2-D view");
}

double Tensor::item() const {
  if (data.size() != 1) {
    throw std::logic_error("Tensor::item on tensor of shape " + shape_str(shape));
  }
  return data[0];
}

void ParamStore::add(const std::string& name, Tensor tensor, bool trainable) {
  if (contains(name)) throw std::invalid_argument("ParamStore: duplicate entry '" + name + "'");
  entries_.emplace(name, Entry{std::move(tensor), trainable});
}

Tensor& ParamStore::at(const std::string& name) {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw std::out_of_range("ParamStore: no entry '" + name + "'");
  return it->second.tensor;
}

const Tensor& ParamStore::at(const std::string& name) const {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw std::out_of_range("ParamStore: no entry '" + name + "'");
  return it->second.tensor;
}

bool ParamStore::trainable(const std::string& name) const {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw std::out_of_range("ParamStore: no entry '" + name + "'");
  return it->second.trainable;
}

void ParamStore::set_trainable(const std::string& name, bool trainable) {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw std::out_of_range("ParamStore: no entry '" + name + "'");
  it->second.trainable = trainable;
}

void ParamStore::set_trainable_prefix(const std::string& prefix, bool trainable) {
  for (auto& [name, entry] : entries_) {
    if (name.compare(0, prefix.size(), prefix) == 0) entry.trainable = trainable;
  }
}

void ParamStore::set_all_trainable(bool trainable) {
  for (auto& [_, entry] : entries_) entry.trainable = trainable;
}

void ParamStore::zero_grads() {
  for (auto& [_, entry] : entries_) entry.tensor.grad.reset();
}

ParamStore ParamStore::frozen_copy() const {
  ParamStore copy;
  for (const auto& [name, entry] : entries_) {
    Tensor t(entry.tensor.shape, entry.tensor.data);
    copy.add(name, std::move(t), false);
  }
  return copy;
}

}  // namespace hero::ad
