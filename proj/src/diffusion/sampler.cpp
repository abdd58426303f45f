// Copyright 2026 The hero-desk Authors
// SPDX-License-Identifier: Apache-2.0

#include "hero/diffusion/sampler.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace hero::diffusion {

void validate(const SamplerConfig& config) {
  if (config.steps < 1) throw std::invalid_argument("SamplerConfig: steps must be >= 1");
  if (config.eta < 0.0 || config.eta > 1.0) throw std::invalid_argument("SamplerConfig: eta must lie in [0, 1]");
  if (config.clip <= 0.0) throw std::invalid_argument("SamplerConfig: clip must be positive");
}

std::vector<int> step_grid(int total_steps, int steps) {
  if (steps < 1 || steps > total_steps) {
    throw std::invalid_argument("step_grid: steps=" + std::to_string(steps) + " must lie in [1, " +
                                std::to_string(total_steps) + "]");
  }
  std::vector<int> grid(static_cast<std::size_t>(steps) + 1);
  for (int k = 0; k <= steps; ++k) {
    grid[static_cast<std::size_t>(k)] = static_cast<int>(
        std::lround(static_cast<double>(total_steps) * (steps - k) / steps));
  }
  return grid;
}

StepCoefficients ddim_coefficients(const NoiseSchedule& schedule, int t, int t_prev, double eta) {
  if (!(t > t_prev && t_prev >= 0 && t <= schedule.steps)) {
    throw std::invalid_argument("ddim_coefficients: need T >= t > t_prev >= 0, got t=" +
                                std::to_string(t) + " t_prev=" + std::to_string(t_prev));
  }
  const double ab_t = schedule.alpha_bar[static_cast<std::size_t>(t)];
  const double ab_prev = schedule.alpha_bar[static_cast<std::size_t>(t_prev)];
  const double sigma_t = std::sqrt(1.0 - ab_t);
  const double var = eta * eta * ((1.0 - ab_prev) / (1.0 - ab_t)) * (1.0 - ab_t / ab_prev);
  const double dir = std::sqrt(std::max(0.0, 1.0 - ab_prev - var));
  StepCoefficients c;
  c.x0_coef = std::sqrt(ab_prev) - dir * std::sqrt(ab_t) / sigma_t;
  c.z_coef = dir / sigma_t;
  c.std = std::sqrt(std::max(0.0, var));
  return c;
}

ad::Var predict_clean(ad::Tape& tape, const DenoiserNet& net, const ad::ParamStore& store,
                      ad::Var z, std::span<const int> timesteps, std::span<const int> conditions,
                      const SamplerConfig& config) {
  ad::Var x0 = net.predict(tape, store, z, timesteps, conditions);
  if (config.guidance) {
    std::vector<int> null_rows(conditions.size(), net.null_condition());
    const ad::Var x0_null = net.predict(tape, store, z, timesteps, null_rows);
    x0 = tape.sub(tape.scale(x0, 1.0 + config.guidance_weight),
                  tape.scale(x0_null, config.guidance_weight));
  }
  return tape.clamp(x0, -config.clip, config.clip);
}

StepResult ddim_step(const DenoiserNet& net, const NoiseSchedule& schedule,
                     std::span<const double> z_t, int t, int t_prev, int condition,
                     const SamplerConfig& config, Rng& rng) {
  if (z_t.size() != net.config().dim) {
    throw std::invalid_argument("ddim_step: z_t has dimension " + std::to_string(z_t.size()) +
                                ", expected " + std::to_string(net.config().dim));
  }
  const auto coef = ddim_coefficients(schedule, t, t_prev, config.eta);
  ad::Tape tape;
  const ad::Var z = tape.constant(ad::Tensor::matrix(1, z_t.size(), {z_t.begin(), z_t.end()}));
  const int ts[] = {t};
  const int cs[] = {condition};
  const auto& x0 = tape.value(predict_clean(tape, net, net.params(), z, ts, cs, config));
  StepResult r;
  r.std = coef.std;
  r.mean.resize(z_t.size());
  r.z_prev.resize(z_t.size());
  for (std::size_t i = 0; i < z_t.size(); ++i) {
    r.mean[i] = coef.x0_coef * x0.data[i] + coef.z_coef * z_t[i];
    r.z_prev[i] = coef.std > 0.0 ? r.mean[i] + coef.std * rng.normal() : r.mean[i];
  }
  return r;
}

std::vector<Trajectory> sample_trajectories(const DenoiserNet& net, const NoiseSchedule& schedule,
                                            const std::vector<std::vector<double>>& z_T,
                                            int condition, const SamplerConfig& config, Rng& rng) {
  validate(config);
  const std::size_t dim = net.config().dim;
  const auto grid = step_grid(schedule.steps, config.steps);
  const std::size_t m = z_T.size();
  std::vector<Trajectory> trajs(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (z_T[i].size() != dim) {
      throw std::invalid_argument("sample_trajectories: z_T has dimension " +
                                  std::to_string(z_T[i].size()) + ", expected " + std::to_string(dim));
    }
    trajs[i].condition = condition;
    trajs[i].timesteps = grid;
    trajs[i].z_T = z_T[i];
    trajs[i].states.push_back(z_T[i]);
  }
  if (m == 0) return trajs;

  std::vector<std::vector<double>> current = z_T;
  const std::vector<int> conds(m, condition);
  for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
    const int t = grid[k], t_prev = grid[k + 1];
    const auto coef = ddim_coefficients(schedule, t, t_prev, config.eta);
    ad::Tape tape;
    const ad::Var z = tape.constant(rows_to_tensor(current, dim));
    const std::vector<int> ts(m, t);
    const auto& x0 = tape.value(predict_clean(tape, net, net.params(), z, ts, conds, config));
    for (std::size_t i = 0; i < m; ++i) {
      std::vector<double> mean(dim), next(dim);
      for (std::size_t j = 0; j < dim; ++j) {
        mean[j] = coef.x0_coef * x0.data[i * dim + j] + coef.z_coef * current[i][j];
        next[j] = coef.std > 0.0 ? mean[j] + coef.std * rng.normal() : mean[j];
      }
      trajs[i].means.push_back(std::move(mean));
      trajs[i].stds.push_back(coef.std);
      trajs[i].states.push_back(next);
      current[i] = std::move(next);
    }
  }
  return trajs;
}

Trajectory sample_trajectory(const DenoiserNet& net, const NoiseSchedule& schedule,
                             std::span<const double> z_T, int condition,
                             const SamplerConfig& config, Rng& rng) {
  std::vector<std::vector<double>> batch{{z_T.begin(), z_T.end()}};
  return std::move(sample_trajectories(net, schedule, batch, condition, config, rng).front());
}

double transition_logprob(std::span<const double> mean, double std, std::span<const double> z_next) {
  if (!(std > 0.0)) throw std::invalid_argument("transition_logprob: std must be positive");
  if (mean.size() != z_next.size()) throw std::invalid_argument("transition_logprob: size mismatch");
  const double log_norm = std::log(std * std::sqrt(2.0 * std::numbers::pi));
  const double inv_two_var = 1.0 / (2.0 * std * std);
  double lp = 0.0;
  for (std::size_t i = 0; i < mean.size(); ++i) {
    const double d = z_next[i] - mean[i];
    lp -= log_norm + d * d * inv_two_var;
  }
  return lp;
}

}  // namespace hero::diffusion
