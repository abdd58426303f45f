// Copyright 2026 The hero-desk Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "hero/autodiff/tape.hpp"
#include "hero/common/rng.hpp"
#include "hero/diffusion/dataset.hpp"
#include "hero/diffusion/denoiser.hpp"
#include "hero/diffusion/schedule.hpp"

namespace hero::diffusion {

struct PretrainConfig {
  int epochs = 200;
  int batch = 256;
  double lr = 2e-3;
  double cond_dropout = 0.1;
  /// Cosine decay from lr to lr * final_lr_ratio over all steps; 1 keeps lr constant.
  double final_lr_ratio = 0.05;
  /// Per-sample loss weight min(1 / sigma_t^2, max_weight). Every weighting
  /// shares the same optimum; this one spends more capacity on low-noise
  /// steps, which decide sample sharpness. 1 gives the unweighted loss.
  double max_weight = 50.0;
};

struct PretrainResult {
  std::vector<double> loss_history;  // one entry per minibatch
};

/// Denoising loss for one minibatch: mean ||z0_hat(a_t z0 + s_t eps, t, c) - z0||^2,
/// optionally weighted per row (empty `weights` means all ones).
ad::Var denoising_loss(ad::Tape& tape, const DenoiserNet& net, const NoiseSchedule& schedule,
                       const std::vector<std::vector<double>>& z0, std::span<const int> timesteps,
                       const std::vector<std::vector<double>>& eps, std::span<const int> conditions,
                       std::span<const double> weights = {});

/// min(1 / sigma_t^2, max_weight) for t >= 1.
double loss_weight(const NoiseSchedule& schedule, int t, double max_weight);

/// Supervised pretraining of the base weights with Adam; t ~ U{1..T},
/// eps ~ N(0, I), labels swapped for the null condition with probability
/// cond_dropout. Adapters are bypassed and stay untouched.
PretrainResult pretrain(DenoiserNet& net, const NoiseSchedule& schedule, const ToyDataset& data,
                        const PretrainConfig& config, Rng& rng);

}  // namespace hero::diffusion
