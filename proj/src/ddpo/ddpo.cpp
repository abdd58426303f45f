// Copyright 2026 The hero-desk Authors
// SPDX-License-Identifier: Apache-2.0

#include "hero/ddpo/ddpo.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

namespace hero::ddpo {

using diffusion::Trajectory;

void validate(const DdpoConfig& c) {
  if (!(c.clip > 0.0)) throw std::invalid_argument("DdpoConfig: clip must be positive");
  if (c.truncation < 0) throw std::invalid_argument("DdpoConfig: truncation K must be >= 0");
  if (c.batch_size < 1 || c.grad_accum < 1 || c.inner_epochs < 0) {
    throw std::invalid_argument("DdpoConfig: batch_size, grad_accum must be >= 1");
  }
}

std::vector<double> normalize_advantages(std::span<const double> rewards, bool normalize) {
  if (rewards.empty()) throw std::invalid_argument("normalize_advantages: empty reward vector");
  std::vector<double> out(rewards.begin(), rewards.end());
  if (!normalize) return out;
  const double n = static_cast<double>(out.size());
  const double mean = std::accumulate(out.begin(), out.end(), 0.0) / n;
  double var = 0.0;
  for (double r : out) var += (r - mean) * (r - mean);
  const double std = std::sqrt(var / n);
  for (auto& r : out) r = (r - mean) / std::max(std, 1e-8);
  return out;
}

namespace {

struct Window {
  std::vector<std::size_t> steps;  // transition indices with positive std
};

Window truncation_window(const Trajectory& traj, int truncation) {
  const std::size_t n = traj.transitions();
  if (static_cast<std::size_t>(truncation) >= n) {
    throw std::invalid_argument("ddpo: K=" + std::to_string(truncation) +
                                " must be smaller than the trajectory's " + std::to_string(n) + " transitions");
  }
  Window w;
  for (std::size_t k = n - static_cast<std::size_t>(truncation) - 1; k < n; ++k) {
    if (traj.stds[k] > 0.0) w.steps.push_back(k);
  }
  return w;
}

// Per-row log N(z_next; mean(params), s^2 I) over the window, as a [rows] Var.
ad::Var window_log_prob(ad::Tape& tape, const diffusion::DenoiserNet& net, const ad::ParamStore& params,
                        const diffusion::NoiseSchedule& schedule, const Trajectory& traj,
                        const Window& w, const diffusion::SamplerConfig& sampler) {
  const std::size_t dim = net.config().dim, rows = w.steps.size();
  std::vector<std::vector<double>> z, z_next;
  std::vector<int> ts, cs(rows, traj.condition);
  ad::Tensor x0_coef = ad::Tensor::zeros({rows, dim});
  ad::Tensor z_term = ad::Tensor::zeros({rows, dim});
  ad::Tensor inv_two_var = ad::Tensor::zeros({rows, dim});
  std::vector<double> log_norm(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t k = w.steps[r];
    const auto coef = diffusion::ddim_coefficients(schedule, traj.timesteps[k], traj.timesteps[k + 1], sampler.eta);
    const double s = traj.stds[k];
    z.push_back(traj.states[k]);
    z_next.push_back(traj.states[k + 1]);
    ts.push_back(traj.timesteps[k]);
    for (std::size_t j = 0; j < dim; ++j) {
      x0_coef.data[r * dim + j] = coef.x0_coef;
      z_term.data[r * dim + j] = coef.z_coef * traj.states[k][j] - traj.states[k + 1][j];
      inv_two_var.data[r * dim + j] = 1.0 / (2.0 * s * s);
    }
    log_norm[r] = static_cast<double>(dim) * std::log(s * std::sqrt(2.0 * std::numbers::pi));
  }
  const ad::Var zin = tape.constant(diffusion::rows_to_tensor(z, dim));
  const ad::Var x0 = diffusion::predict_clean(tape, net, params, zin, ts, cs, sampler);
  // mean - z_next = x0_coef * x0 + (z_coef * z - z_next)
  const ad::Var diff = tape.add(tape.mul(x0, tape.constant(std::move(x0_coef))), tape.constant(std::move(z_term)));
  const ad::Var sq = tape.mul(tape.mul(diff, diff), tape.constant(std::move(inv_two_var)));
  const ad::Var neg_lp = tape.add(tape.row_sum(sq), tape.constant(ad::Tensor::vector(log_norm)));
  return tape.scale(neg_lp, -1.0);
}

}  // namespace

ad::Var ddpo_k_loss(ad::Tape& tape, const diffusion::DenoiserNet& net, const ad::ParamStore& old_params,
                    const diffusion::NoiseSchedule& schedule, const Trajectory& traj, double advantage,
                    const diffusion::SamplerConfig& sampler, const DdpoConfig& config,
                    SurrogateTerms* terms) {
  const Window w = truncation_window(traj, config.truncation);
  if (w.steps.empty()) return tape.constant(ad::Tensor::scalar(0.0));

  const ad::Var lp_new = window_log_prob(tape, net, net.params(), schedule, traj, w, sampler);
  ad::Tensor old_values;
  {
    ad::Tape old_tape;
    old_values = old_tape.value(window_log_prob(old_tape, net, old_params, schedule, traj, w, sampler));
  }
  const ad::Var lp_old = tape.constant(old_values);
  const ad::Var ratio = tape.exp(tape.sub(lp_new, lp_old));
  const ad::Var unclipped = tape.scale(ratio, advantage);
  const ad::Var clipped = tape.scale(tape.clamp(ratio, 1.0 - config.clip, 1.0 + config.clip), advantage);
  const ad::Var loss = tape.scale(tape.sum(tape.minimum(unclipped, clipped)), -1.0);

  if (terms) {
    terms->ratios = tape.value(ratio).data;
    terms->log_prob_new = tape.value(lp_new).data;
    terms->log_prob_old = old_values.data;
  }
  return loss;
}

double truncated_log_likelihood(const diffusion::DenoiserNet& net, const ad::ParamStore& params,
                                const diffusion::NoiseSchedule& schedule, const Trajectory& traj,
                                const diffusion::SamplerConfig& sampler, int truncation) {
  const Window w = truncation_window(traj, truncation);
  if (w.steps.empty()) return 0.0;
  ad::Tape tape;
  const auto& lp = tape.value(window_log_prob(tape, net, params, schedule, traj, w, sampler));
  return std::accumulate(lp.data.begin(), lp.data.end(), 0.0);
}

DdpoStats ddpo_update(diffusion::DenoiserNet& net, const diffusion::NoiseSchedule& schedule,
                      const std::vector<Trajectory>& trajectories, std::span<const double> advantages,
                      const diffusion::SamplerConfig& sampler, const DdpoConfig& config,
                      ad::AdamState& adam, Rng& rng) {
  validate(config);
  if (trajectories.empty()) throw std::invalid_argument("ddpo_update: no trajectories");
  if (advantages.size() != trajectories.size()) {
    throw std::invalid_argument("ddpo_update: one advantage per trajectory required");
  }
  const ad::ParamStore old_params = net.params().frozen_copy();
  adam.config.lr = config.lr;
  adam.config.weight_decay = config.weight_decay;

  DdpoStats stats;
  double loss_sum = 0.0;
  std::size_t loss_count = 0, clipped = 0;
  std::map<std::string, std::vector<double>> accum;
  int pending = 0;

  auto flush = [&] {
    if (pending == 0) return;
    for (auto& [name, entry] : net.params().entries()) {
      if (!entry.trainable) continue;
      auto& g = accum[name];
      for (auto& x : g) x /= pending;
      entry.tensor.grad = std::move(g);
    }
    accum.clear();
    ad::adam_step(net.params(), adam);
    stats.optimizer_steps += 1;
    pending = 0;
  };

  std::vector<std::size_t> order(trajectories.size());
  std::iota(order.begin(), order.end(), 0);
  const auto micro = static_cast<std::size_t>(config.batch_size);
  for (int epoch = 0; epoch < config.inner_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng.engine());
    for (std::size_t start = 0; start < order.size(); start += micro) {
      const std::size_t end = std::min(order.size(), start + micro);
      ad::Tape tape;
      std::vector<ad::Var> losses;
      for (std::size_t k = start; k < end; ++k) {
        SurrogateTerms terms;
        const auto idx = order[k];
        losses.push_back(ddpo_k_loss(tape, net, old_params, schedule, trajectories[idx], advantages[idx],
                                     sampler, config, &terms));
        for (double r : terms.ratios) {
          stats.ratios.push_back(r);
          if (std::abs(r - 1.0) > config.clip) ++clipped;
        }
      }
      ad::Var total = losses.front();
      for (std::size_t i = 1; i < losses.size(); ++i) total = tape.add(total, losses[i]);
      const ad::Var loss = tape.scale(total, 1.0 / static_cast<double>(losses.size()));
      tape.backward(loss, net.params());
      for (const auto& [name, entry] : net.params().entries()) {
        if (!entry.trainable) continue;
        auto& g = accum[name];
        if (g.empty()) g.assign(entry.tensor.numel(), 0.0);
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += (*entry.tensor.grad)[i];
      }
      loss_sum += tape.value(loss).item();
      ++loss_count;
      if (++pending == config.grad_accum) flush();
    }
    flush();
  }
  net.params().zero_grads();

  stats.mean_loss = loss_count ? loss_sum / static_cast<double>(loss_count) : 0.0;
  if (!stats.ratios.empty()) {
    stats.mean_ratio = std::accumulate(stats.ratios.begin(), stats.ratios.end(), 0.0) /
                       static_cast<double>(stats.ratios.size());
    stats.clip_fraction = static_cast<double>(clipped) / static_cast<double>(stats.ratios.size());
  }
  return stats;
}

}  // namespace hero::ddpo
