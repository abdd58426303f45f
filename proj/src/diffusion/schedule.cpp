// Copyright 2026 The hero-desk Authors
// SPDX-License-Identifier: Apache-2.0

#include "hero/diffusion/schedule.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace hero::diffusion {

double NoiseSchedule::alpha(int t) const {
  if (t < 0 || t > steps) throw std::out_of_range("NoiseSchedule: t=" + std::to_string(t));
  return std::sqrt(alpha_bar[static_cast<std::size_t>(t)]);
}

double NoiseSchedule::sigma(int t) const {
  if (t < 0 || t > steps) throw std::out_of_range("NoiseSchedule: t=" + std::to_string(t));
  return std::sqrt(1.0 - alpha_bar[static_cast<std::size_t>(t)]);
}

NoiseSchedule schedule_linear(int steps, double beta_min, double beta_max) {
  if (steps < 1) throw std::invalid_argument("schedule_linear: steps must be >= 1");
  if (!(beta_min > 0.0 && beta_min <= beta_max && beta_max < 1.0)) {
    throw std::invalid_argument("schedule_linear: need 0 < beta_min <= beta_max < 1");
  }
  NoiseSchedule s;
  s.steps = steps;
  s.beta_min = beta_min;
  s.beta_max = beta_max;
  s.betas.assign(static_cast<std::size_t>(steps) + 1, 0.0);
  s.alpha_bar.assign(static_cast<std::size_t>(steps) + 1, 1.0);
  for (int t = 1; t <= steps; ++t) {
    const double frac = steps == 1 ? 0.0 : static_cast<double>(t - 1) / (steps - 1);
    const auto i = static_cast<std::size_t>(t);
    s.betas[i] = beta_min + (beta_max - beta_min) * frac;
    s.alpha_bar[i] = s.alpha_bar[i - 1] * (1.0 - s.betas[i]);
  }
  return s;
}

std::vector<double> forward_noise(std::span<const double> z0, int t, std::span<const double> eps,
                                  const NoiseSchedule& schedule) {
  if (t < 1 || t > schedule.steps) {
    throw std::out_of_range("forward_noise: t=" + std::to_string(t) + " outside [1, " +
                            std::to_string(schedule.steps) + "]");
  }
  if (z0.size() != eps.size()) throw std::invalid_argument("forward_noise: z0/eps size mismatch");
  const double a = schedule.alpha(t), s = schedule.sigma(t);
  std::vector<double> out(z0.size());
  for (std::size_t i = 0; i < z0.size(); ++i) out[i] = a * z0[i] + s * eps[i];
  return out;
}

}  // namespace hero::diffusion
