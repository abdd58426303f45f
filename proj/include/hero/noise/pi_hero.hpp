// Copyright 2026 The hero-desk Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "hero/common/rng.hpp"

namespace hero::noise {

/// Refined initial-noise distribution: a Gaussian mixture over the initial
/// noises of the latest epoch's best and good samples.
///
/// With probability beta a draw comes from N(best, eps2 I), otherwise from a
/// uniformly chosen good mean. At beta = 0 the best mean joins the goods as
/// one more uniform component. Before any update the distribution is N(0, I).
struct PiHeroState {
  std::size_t dim = 2;
  bool first_iteration = true;
  std::optional<std::vector<double>> best;
  std::vector<std::vector<double>> goods;  // excludes the best
  double beta = 0.5;
  double eps2 = 0.1;

  /// Throws std::invalid_argument if the invariants are broken.
  void validate() const;
  bool operator==(const PiHeroState&) const = default;
};

/// Component identifiers reported by pi_hero_sample.
inline constexpr int kPriorComponent = -1;
inline constexpr int kBestComponent = 0;
/// Good mean i is reported as i + 1.

/// Draws n initial noises. Every draw consumes the same amount of randomness
/// (two uniforms, then dim normals) whatever the state, so runs that differ
/// only in beta see common random numbers.
std::vector<std::vector<double>> pi_hero_sample(const PiHeroState& state, std::size_t n, Rng& rng,
                                                std::vector<int>* components = nullptr);

/// Replaces the stored means with this epoch's noises. Empty input leaves the
/// state untouched.
PiHeroState pi_hero_update(const PiHeroState& state, const std::vector<std::vector<double>>& goods,
                           const std::optional<std::vector<double>>& best);

}  // namespace hero::noise
