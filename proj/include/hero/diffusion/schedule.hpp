// Copyright 2026 The hero-desk Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

namespace hero::diffusion {

/// Variance-preserving noise schedule. Index t runs over [0, T]; t = 0 is the
/// clean sample (alpha = 1, sigma = 0).
struct NoiseSchedule {
  int steps = 0;
  double beta_min = 0.0;
  double beta_max = 0.0;
  std::vector<double> betas;      // betas[0] == 0
  std::vector<double> alpha_bar;  // cumulative products, alpha_bar[0] == 1

  double alpha(int t) const;
  double sigma(int t) const;
};

/// Linear beta ramp from beta_min (t = 1) to beta_max (t = T).
NoiseSchedule schedule_linear(int steps, double beta_min, double beta_max);

/// alpha_t * z0 + sigma_t * eps.
std::vector<double> forward_noise(std::span<const double> z0, int t, std::span<const double> eps,
                                  const NoiseSchedule& schedule);

}  // namespace hero::diffusion
