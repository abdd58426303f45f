// Copyright 2026 The hero-desk Authors
// SPDX-License-Identifier: Apache-2.0

#include "hero/diffusion/pretrain.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "hero/autodiff/adam.hpp"

namespace hero::diffusion {

ad::Var denoising_loss(ad::Tape& tape, const DenoiserNet& net, const NoiseSchedule& schedule,
                       const std::vector<std::vector<double>>& z0, std::span<const int> timesteps,
                       const std::vector<std::vector<double>>& eps, std::span<const int> conditions,
                       std::span<const double> weights) {
  const std::size_t dim = net.config().dim;
  std::vector<std::vector<double>> noisy(z0.size());
  for (std::size_t i = 0; i < z0.size(); ++i) noisy[i] = forward_noise(z0[i], timesteps[i], eps[i], schedule);
  const ad::Var zt = tape.constant(rows_to_tensor(noisy, dim));
  const ad::Var target = tape.constant(rows_to_tensor(z0, dim));
  const ad::Var pred = net.predict(tape, zt, timesteps, conditions);
  if (weights.empty()) return tape.squared_error(pred, target);
  if (weights.size() != z0.size()) throw std::invalid_argument("denoising_loss: one weight per row required");
  const ad::Var diff = tape.sub(pred, target);
  const ad::Var per_row = tape.row_sum(tape.mul(diff, diff));
  const ad::Var weighted = tape.mul(per_row, tape.constant(ad::Tensor::vector({weights.begin(), weights.end()})));
  return tape.scale(tape.sum(weighted), 1.0 / static_cast<double>(z0.size() * dim));
}

double loss_weight(const NoiseSchedule& schedule, int t, double max_weight) {
  const double s = schedule.sigma(t);
  return std::min(1.0 / (s * s), max_weight);
}

PretrainResult pretrain(DenoiserNet& net, const NoiseSchedule& schedule, const ToyDataset& data,
                        const PretrainConfig& config, Rng& rng) {
  if (data.empty()) throw std::invalid_argument("pretrain: empty dataset");
  if (data.dim != net.config().dim) throw std::invalid_argument("pretrain: dataset/denoiser dimension mismatch");
  if (config.batch < 1) throw std::invalid_argument("pretrain: batch must be >= 1");

  net.prepare_pretraining();
  ad::AdamState adam;
  adam.config.lr = config.lr;

  PretrainResult result;
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  const auto batch = static_cast<std::size_t>(config.batch);
  const std::size_t per_epoch = (order.size() + batch - 1) / batch;
  const double total = static_cast<double>(per_epoch) * std::max(config.epochs, 1);
  std::size_t step = 0;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng.engine());
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t end = std::min(order.size(), start + batch);
      std::vector<std::vector<double>> z0, eps;
      std::vector<int> ts, cs;
      std::vector<double> ws;
      for (std::size_t k = start; k < end; ++k) {
        const auto idx = order[k];
        z0.push_back(data.samples[idx]);
        eps.push_back(rng.normal_vector(data.dim));
        ts.push_back(1 + static_cast<int>(rng.index(static_cast<std::size_t>(schedule.steps))));
        cs.push_back(rng.uniform() < config.cond_dropout ? net.null_condition() : data.labels[idx]);
        if (config.max_weight != 1.0) ws.push_back(loss_weight(schedule, ts.back(), config.max_weight));
      }
      ad::Tape tape;
      const ad::Var loss = denoising_loss(tape, net, schedule, z0, ts, eps, cs, ws);
      tape.backward(loss, net.params());
      const double cosine = 0.5 * (1.0 + std::cos(std::numbers::pi * static_cast<double>(step++) / total));
      adam.config.lr = config.lr * (config.final_lr_ratio + (1.0 - config.final_lr_ratio) * cosine);
      ad::adam_step(net.params(), adam);
      result.loss_history.push_back(tape.value(loss).item());
    }
  }
  net.params().zero_grads();
  return result;
}

}  // namespace hero::diffusion
