// Copyright 2026 The hero-desk Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hero/autodiff/tape.hpp"
#include "hero/common/rng.hpp"

namespace hero::repr {

struct EmbeddingConfig {
  std::size_t input_dim = 2;
  std::vector<std::size_t> hidden{64, 64};
  std::size_t width = 32;        // representation width R
  std::size_t projection = 16;   // projection width P
  bool zero_init_output = false; // zero the last embedding layer
};

/// Representation map E: [input_dim -> hidden... -> width], ReLU between
/// layers, linear output. Parameters under "embed.l{i}.{w,b}".
class EmbeddingNet {
 public:
  EmbeddingNet() = default;
  EmbeddingNet(const EmbeddingConfig& config, Rng& rng);

  const EmbeddingConfig& config() const { return config_; }
  std::size_t width() const { return config_.width; }
  ad::ParamStore& params() { return params_; }
  const ad::ParamStore& params() const { return params_; }

  /// z: [m, input_dim] -> [m, width]
  ad::Var forward(ad::Tape& tape, ad::Var z) const;
  std::vector<double> embed(std::span<const double> z0) const;
  std::vector<std::vector<double>> embed_rows(const std::vector<std::vector<double>>& z0) const;

 private:
  EmbeddingConfig config_;
  ad::ParamStore params_;
};

/// Projection head g: Linear(ReLU(e)) from width R to width P; parameters
/// "proj.{w,b}". Used only inside the triplet loss.
class ProjectionHead {
 public:
  ProjectionHead() = default;
  ProjectionHead(std::size_t width, std::size_t projection, Rng& rng);

  ad::ParamStore& params() { return params_; }
  const ad::ParamStore& params() const { return params_; }

  ad::Var forward(ad::Tape& tape, ad::Var e) const;

 private:
  ad::ParamStore params_;
};

}  // namespace hero::repr
