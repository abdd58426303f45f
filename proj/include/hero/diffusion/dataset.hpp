// Copyright 2026 The hero-desk Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "hero/common/rng.hpp"

namespace hero::diffusion {

/// Generator parameters for the synthetic training distributions.
///
///  - eight-gaussians-2d: eight isotropic modes evenly spaced on a circle.
///  - checker-2d: uniform mass on the dark cells of a square checkerboard.
///  - shapes-8x8: 8x8 grayscale images holding one shape at a random place;
///    the label names the shape (0 square, 1 horizontal bar, 2 vertical bar).
///    Pixels are stored in [-1, 1].
struct DatasetSpec {
  std::string name = "eight-gaussians-2d";
  double radius = 2.0;      // eight-gaussians: circle radius
  double mode_std = 0.1;    // eight-gaussians: per-mode std
  int cells = 4;            // checker: cells per side
  double extent = 2.0;      // checker: half-width of the board
  std::size_t size = 20000; // number of materialized samples
};

struct ToyDataset {
  DatasetSpec spec;
  std::size_t dim = 0;
  int num_labels = 1;
  std::vector<std::vector<double>> samples;
  std::vector<int> labels;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
};

std::size_t dataset_dim(const std::string& name);
int dataset_num_labels(const std::string& name);

/// Draws spec.size samples. Throws on an unknown dataset name.
ToyDataset make_dataset(const DatasetSpec& spec, Rng& rng);

/// Centers of the eight-gaussians modes, mode k at angle 2*pi*k/8.
std::vector<std::vector<double>> eight_gaussians_modes(double radius);

}  // namespace hero::diffusion
