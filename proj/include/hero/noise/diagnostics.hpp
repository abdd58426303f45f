// Copyright 2026 The hero-desk Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <vector>

#include "hero/common/rng.hpp"
#include "hero/diffusion/sampler.hpp"

namespace hero::noise {

enum class MeansSource {
  prior,   // means drawn from N(0, I)
  sphere,  // prior draws rescaled onto the radius sqrt(D) sphere
};

struct ConcentrationReport {
  std::size_t dim = 0;
  double eps2 = 0.0;
  std::size_t n = 0;
  std::size_t components = 0;
  double fraction = 0.0;  // share of samples with |y| / sqrt(D) in [1 - eps0, 1 + eps0]
};

/// Samples an equal-weight mixture of `components` Gaussians N(m_k, eps2 I)
/// and measures how many draws land in the shell around radius sqrt(D).
/// Shell bounds carry a 1e-12 relative slack so eps2 = 0 on the sphere is exact.
ConcentrationReport concentration_diagnostic(std::size_t dim, double eps2, std::size_t n, Rng& rng,
                                             MeansSource source = MeansSource::prior,
                                             std::size_t components = 8);

/// Mean over coordinates of |Pearson r| between paired rows of a and b.
/// Constant coordinates contribute 0.
double dependence_score(const std::vector<std::vector<double>>& a,
                        const std::vector<std::vector<double>>& b);

struct InfoLinkReport {
  std::size_t n = 0;
  int steps = 0;
  double score = 0.0;           // z_T against its own z_0
  double shuffled_score = 0.0;  // z_T against a permuted z_0
  double threshold = 0.0;       // 3 / sqrt(n)
};

/// Samples n trajectories from the standard prior and measures how much of
/// z_T survives into z_0.
InfoLinkReport info_link_diagnostic(const diffusion::DenoiserNet& net,
                                    const diffusion::NoiseSchedule& schedule,
                                    const diffusion::SamplerConfig& sampler, std::size_t n,
                                    int condition, Rng& rng);

}  // namespace hero::noise
