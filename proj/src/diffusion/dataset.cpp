// Copyright 2026 The hero-desk Authors
// SPDX-License-Identifier: Apache-2.0

#include "hero/diffusion/dataset.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hero::diffusion {

namespace {

std::vector<double> shape_image(int label, Rng& rng) {
  constexpr int kSide = 8;
  int h = 3, w = 3;
  if (label == 1) h = 1, w = 4;
  if (label == 2) h = 4, w = 1;
  const int top = static_cast<int>(rng.index(static_cast<std::size_t>(kSide - h + 1)));
  const int left = static_cast<int>(rng.index(static_cast<std::size_t>(kSide - w + 1)));
  std::vector<double> img(kSide * kSide, -1.0);
  for (int r = top; r < top + h; ++r)
    for (int c = left; c < left + w; ++c) img[static_cast<std::size_t>(r * kSide + c)] = 1.0;
  return img;
}

}  // namespace

std::size_t dataset_dim(const std::string& name) {
  if (name == "eight-gaussians-2d" || name == "checker-2d") return 2;
  if (name == "shapes-8x8") return 64;
  throw std::invalid_argument("unknown dataset '" + name + "'");
}

int dataset_num_labels(const std::string& name) {
  if (name == "shapes-8x8") return 3;
  dataset_dim(name);
  return 1;
}

std::vector<std::vector<double>> eight_gaussians_modes(double radius) {
  std::vector<std::vector<double>> modes;
  for (int k = 0; k < 8; ++k) {
    const double a = 2.0 * std::numbers::pi * k / 8.0;
    modes.push_back({radius * std::cos(a), radius * std::sin(a)});
  }
  return modes;
}

ToyDataset make_dataset(const DatasetSpec& spec, Rng& rng) {
  ToyDataset ds;
  ds.spec = spec;
  ds.dim = dataset_dim(spec.name);
  ds.num_labels = dataset_num_labels(spec.name);
  ds.samples.reserve(spec.size);
  ds.labels.reserve(spec.size);

  const auto modes = eight_gaussians_modes(spec.radius);
  for (std::size_t i = 0; i < spec.size; ++i) {
    if (spec.name == "eight-gaussians-2d") {
      const auto& m = modes[rng.index(modes.size())];
      ds.samples.push_back({m[0] + spec.mode_std * rng.normal(), m[1] + spec.mode_std * rng.normal()});
      ds.labels.push_back(0);
    } else if (spec.name == "checker-2d") {
      const double cell = 2.0 * spec.extent / spec.cells;
      // pick a dark cell (row + col even), then a uniform point inside it
      int r = 0, c = 0;
      do {
        r = static_cast<int>(rng.index(static_cast<std::size_t>(spec.cells)));
        c = static_cast<int>(rng.index(static_cast<std::size_t>(spec.cells)));
      } while ((r + c) % 2 != 0);
      ds.samples.push_back({-spec.extent + (c + rng.uniform()) * cell,
                            -spec.extent + (r + rng.uniform()) * cell});
      ds.labels.push_back(0);
    } else {
      const int label = static_cast<int>(rng.index(3));
      ds.samples.push_back(shape_image(label, rng));
      ds.labels.push_back(label);
    }
  }
  return ds;
}

}  // namespace hero::diffusion
