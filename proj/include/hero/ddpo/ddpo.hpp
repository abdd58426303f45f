// Copyright 2026 The hero-desk Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "hero/autodiff/adam.hpp"
#include "hero/autodiff/tape.hpp"
#include "hero/common/rng.hpp"
#include "hero/diffusion/sampler.hpp"

namespace hero::ddpo {

struct DdpoConfig {
  double clip = 1e-4;       // PPO clip range
  int truncation = 5;       // K: the loss covers the last K + 1 transitions
  double lr = 3e-4;
  double weight_decay = 1e-4;
  int batch_size = 2;       // trajectories per micro-batch
  int grad_accum = 4;       // micro-batches per optimizer step
  int inner_epochs = 1;     // passes over the trajectory set per call
  bool normalize_advantages = true;
};

void validate(const DdpoConfig& config);

/// (r - mean) / max(std, 1e-8) with the population std; identity when `normalize` is false.
std::vector<double> normalize_advantages(std::span<const double> rewards, bool normalize = true);

/// Per-transition quantities behind one ddpo_k_loss evaluation.
struct SurrogateTerms {
  std::vector<double> ratios;
  std::vector<double> log_prob_new;
  std::vector<double> log_prob_old;
};

/// Clipped surrogate over the last K + 1 transitions of one trajectory:
///   -sum_t min(rho_t A, clip(rho_t, 1 - eps, 1 + eps) A),
///   rho_t = exp(log p_cur(z_{t-1} | z_t, c) - log p_old(z_{t-1} | z_t, c)).
/// Both log-probs re-evaluate the transition mean through their network with
/// the recorded std; transitions with zero std are skipped. Gradients reach
/// the trainable entries of `net.params()`; `old_params` is a snapshot.
ad::Var ddpo_k_loss(ad::Tape& tape, const diffusion::DenoiserNet& net,
                    const ad::ParamStore& old_params, const diffusion::NoiseSchedule& schedule,
                    const diffusion::Trajectory& traj, double advantage,
                    const diffusion::SamplerConfig& sampler, const DdpoConfig& config,
                    SurrogateTerms* terms = nullptr);

/// Sum over the truncated window of log p(z_{t-1} | z_t, c) under `params`.
double truncated_log_likelihood(const diffusion::DenoiserNet& net, const ad::ParamStore& params,
                                const diffusion::NoiseSchedule& schedule,
                                const diffusion::Trajectory& traj,
                                const diffusion::SamplerConfig& sampler, int truncation);

struct DdpoStats {
  double mean_loss = 0.0;
  double mean_ratio = 1.0;
  double clip_fraction = 0.0;  // share of terms with |rho - 1| > clip
  std::vector<double> ratios;  // every evaluated term, in evaluation order
  int optimizer_steps = 0;
};

/// Adam updates of the adapter weights on accumulated ddpo_k_loss gradients.
/// The old policy is snapshotted on entry. `adam` persists across calls.
DdpoStats ddpo_update(diffusion::DenoiserNet& net, const diffusion::NoiseSchedule& schedule,
                      const std::vector<diffusion::Trajectory>& trajectories,
                      std::span<const double> advantages, const diffusion::SamplerConfig& sampler,
                      const DdpoConfig& config, ad::AdamState& adam, Rng& rng);

}  // namespace hero::ddpo
