// Copyright 2026 The hero-desk Authors
// SPDX-License-Identifier: Apache-2.0

#include "hero/representation/embedding.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace hero::repr {

namespace {

// He-style init for ReLU layers.
ad::Tensor he_normal(std::size_t in, std::size_t out, Rng& rng) {
  ad::Tensor t = ad::Tensor::zeros({in, out});
  const double std = std::sqrt(2.0 / static_cast<double>(in));
  for (auto& x : t.data) x = std * rng.normal();
  return t;
}

}  // namespace

EmbeddingNet::EmbeddingNet(const EmbeddingConfig& config, Rng& rng) : config_(config) {
  if (config.input_dim == 0 || config.width == 0) {
    throw std::invalid_argument("EmbeddingNet: input and output widths must be positive");
  }
  std::vector<std::size_t> widths{config.input_dim};
  widths.insert(widths.end(), config.hidden.begin(), config.hidden.end());
  widths.push_back(config.width);
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    const auto prefix = "embed.l" + std::to_string(l);
    const bool last = l + 2 == widths.size();
    params_.add(prefix + ".w", last && config.zero_init_output
                                   ? ad::Tensor::zeros({widths[l], widths[l + 1]})
                                   : he_normal(widths[l], widths[l + 1], rng));
    params_.add(prefix + ".b", ad::Tensor::zeros({widths[l + 1]}));
  }
}

ad::Var EmbeddingNet::forward(ad::Tape& tape, ad::Var z) const {
  const auto& zv = tape.value(z);
  if (zv.cols() != config_.input_dim) {
    throw std::invalid_argument("EmbeddingNet: input width " + std::to_string(zv.cols()) +
                                ", expected " + std::to_string(config_.input_dim));
  }
  const std::size_t layers = config_.hidden.size() + 1;
  ad::Var h = z;
  for (std::size_t l = 0; l < layers; ++l) {
    const auto prefix = "embed.l" + std::to_string(l);
    h = tape.add(tape.matmul(h, tape.param(params_, prefix + ".w")), tape.param(params_, prefix + ".b"));
    if (l + 1 < layers) h = tape.relu(h);
  }
  return h;
}

std::vector<double> EmbeddingNet::embed(std::span<const double> z0) const {
  if (z0.size() != config_.input_dim) {
    throw std::invalid_argument("embed: input has dimension " + std::to_string(z0.size()) +
                                ", expected " + std::to_string(config_.input_dim));
  }
  ad::Tape tape;
  const ad::Var z = tape.constant(ad::Tensor::matrix(1, z0.size(), {z0.begin(), z0.end()}));
  return tape.value(forward(tape, z)).data;
}

std::vector<std::vector<double>> EmbeddingNet::embed_rows(const std::vector<std::vector<double>>& z0) const {
  std::vector<std::vector<double>> out;
  out.reserve(z0.size());
  for (const auto& z : z0) out.push_back(embed(z));
  return out;
}

ProjectionHead::ProjectionHead(std::size_t width, std::size_t projection, Rng& rng) {
  params_.add("proj.w", he_normal(width, projection, rng));
  params_.add("proj.b", ad::Tensor::zeros({projection}));
}

ad::Var ProjectionHead::forward(ad::Tape& tape, ad::Var e) const {
  return tape.add(tape.matmul(tape.relu(e), tape.param(params_, "proj.w")), tape.param(params_, "proj.b"));
}

}  // namespace hero::repr
