// Copyright 2026 The hero-desk Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "hero/autodiff/tape.hpp"
#include "hero/common/rng.hpp"
#include "hero/diffusion/denoiser.hpp"
#include "hero/diffusion/schedule.hpp"

namespace hero::diffusion {

struct SamplerConfig {
  int steps = 50;
  double eta = 1.0;
  double guidance_weight = 1.0;
  bool guidance = false;
  /// Predicted clean samples are clamped to [-clip, clip]^D.
  double clip = 4.0;
};

void validate(const SamplerConfig& config);

/// Evenly spaced integer timesteps from T down to 0, steps + 1 entries.
std::vector<int> step_grid(int total_steps, int steps);

/// The DDIM transition from t to t_prev is affine in (z0_hat, z_t):
///   mean = x0_coef * z0_hat + z_coef * z_t,  std = eta-scaled posterior std.
/// eta = 1 gives the ancestral (DDPM) posterior; eta = 0 is deterministic.
struct StepCoefficients {
  double x0_coef = 0.0;
  double z_coef = 0.0;
  double std = 0.0;
};

StepCoefficients ddim_coefficients(const NoiseSchedule& schedule, int t, int t_prev, double eta);

/// Guided and clamped z0_hat for a batch z [m, D]; differentiable w.r.t. the
/// trainable entries of `store`.
ad::Var predict_clean(ad::Tape& tape, const DenoiserNet& net, const ad::ParamStore& store,
                      ad::Var z, std::span<const int> timesteps, std::span<const int> conditions,
                      const SamplerConfig& config);

struct StepResult {
  std::vector<double> z_prev;
  std::vector<double> mean;
  double std = 0.0;
};

StepResult ddim_step(const DenoiserNet& net, const NoiseSchedule& schedule,
                     std::span<const double> z_t, int t, int t_prev, int condition,
                     const SamplerConfig& config, Rng& rng);

/// A recorded denoising path. states[0] is z_T and states.back() is z_0;
/// transition k maps states[k] at timesteps[k] to states[k + 1] at
/// timesteps[k + 1] and was drawn from N(means[k], stds[k]^2 I).
struct Trajectory {
  int condition = 0;
  std::vector<int> timesteps;
  std::vector<std::vector<double>> states;
  std::vector<std::vector<double>> means;
  std::vector<double> stds;
  std::vector<double> z_T;

  std::size_t transitions() const { return means.size(); }
  const std::vector<double>& z0() const { return states.back(); }
};

Trajectory sample_trajectory(const DenoiserNet& net, const NoiseSchedule& schedule,
                             std::span<const double> z_T, int condition,
                             const SamplerConfig& config, Rng& rng);

/// Batched sampling; noise for step k is drawn row by row, so a batch of one
/// consumes the stream exactly like sample_trajectory.
std::vector<Trajectory> sample_trajectories(const DenoiserNet& net, const NoiseSchedule& schedule,
                                            const std::vector<std::vector<double>>& z_T,
                                            int condition, const SamplerConfig& config, Rng& rng);

/// Isotropic Gaussian log density of z_next under N(mean, std^2 I).
double transition_logprob(std::span<const double> mean, double std, std::span<const double> z_next);

}  // namespace hero::diffusion
