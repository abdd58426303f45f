// Copyright 2026 The hero-desk Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hero/autodiff/tape.hpp"
#include "hero/common/rng.hpp"
#include "hero/diffusion/schedule.hpp"

namespace hero::diffusion {

struct DenoiserConfig {
  std::size_t dim = 2;
  std::size_t hidden = 128;
  std::size_t time_embedding = 32;
  std::size_t condition_embedding = 8;
  int num_labels = 1;
  std::size_t lora_rank = 4;
  /// Output z0_hat = alpha_t z_t - sigma_t F(z_t, t, c) instead of F itself.
  /// Identity at low noise then comes for free and F only has to model the
  /// residual, which a small tanh MLP does far more precisely.
  bool skip_connection = true;
};

/// Sinusoidal embedding of integer timesteps, one row per entry -> [m, width].
ad::Tensor time_embedding(std::span<const int> timesteps, std::size_t width);

/// Clean-sample predictor z0_hat(z_t, t, c): an MLP
/// [dim + time_embedding + condition_embedding -> hidden -> hidden -> dim]
/// with tanh activations.
///
/// Every linear layer carries a low-rank adapter pair (A: [in, r], B: [r, out]);
/// when adapters are enabled the layer computes x W + b + (x A) B. B starts at
/// zero so the adapted network reproduces the base network exactly.
///
/// Parameters live in a ParamStore under "base.*" (W, b, condition table) and
/// "lora.*" (A, B). The condition table has num_labels + 1 rows; the last row
/// is the null condition used for classifier-free guidance.
class DenoiserNet {
 public:
  static constexpr std::size_t kLayers = 3;

  DenoiserNet() = default;
  /// The schedule supplies alpha_t and sigma_t for the skip connection.
  DenoiserNet(const DenoiserConfig& config, const NoiseSchedule& schedule, Rng& rng);

  const DenoiserConfig& config() const { return config_; }
  int null_condition() const { return config_.num_labels; }

  ad::ParamStore& params() { return params_; }
  const ad::ParamStore& params() const { return params_; }

  bool adapters_enabled() const { return adapters_enabled_; }
  void set_adapters_enabled(bool enabled) { adapters_enabled_ = enabled; }

  /// Base trainable, adapters frozen and bypassed.
  void prepare_pretraining();
  /// Base frozen, adapters trainable and enabled.
  void prepare_finetuning();

  /// z: [m, dim]; timesteps and conditions have m entries each. Parameters are
  /// read from `store`, which must have this network's layout (it may be a
  /// frozen snapshot of params()).
  ad::Var predict(ad::Tape& tape, const ad::ParamStore& store, ad::Var z,
                  std::span<const int> timesteps, std::span<const int> conditions) const;
  ad::Var predict(ad::Tape& tape, ad::Var z, std::span<const int> timesteps,
                  std::span<const int> conditions) const {
    return predict(tape, params_, z, timesteps, conditions);
  }

  /// Convenience non-differentiable evaluation on plain rows.
  std::vector<std::vector<double>> predict_rows(const std::vector<std::vector<double>>& z,
                                                std::span<const int> timesteps,
                                                std::span<const int> conditions) const;

 private:
  DenoiserConfig config_;
  std::vector<double> alpha_, sigma_;  // indexed by t in [0, T]
  ad::ParamStore params_;
  bool adapters_enabled_ = false;
};

/// Packs equally sized rows into an [m, n] tensor.
ad::Tensor rows_to_tensor(const std::vector<std::vector<double>>& rows, std::size_t width);
std::vector<std::vector<double>> tensor_to_rows(const ad::Tensor& t);

}  // namespace hero::diffusion
