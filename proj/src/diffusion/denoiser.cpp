// Copyright 2026 The hero-desk Authors
// SPDX-License-Identifier: Apache-2.0

#include "hero/diffusion/denoiser.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace hero::diffusion {

namespace {

std::string layer_name(const char* group, std::size_t layer, const char* field) {
  return std::string(group) + ".l" + std::to_string(layer) + "." + field;
}

ad::Tensor gaussian(std::size_t rows, std::size_t cols, double std, Rng& rng) {
  ad::Tensor t = ad::Tensor::zeros({rows, cols});
  for (auto& x : t.data) x = std * rng.normal();
  return t;
}

}  // namespace

ad::Tensor time_embedding(std::span<const int> timesteps, std::size_t width) {
  const std::size_t half = width / 2;
  ad::Tensor out = ad::Tensor::zeros({timesteps.size(), width});
  for (std::size_t i = 0; i < timesteps.size(); ++i) {
    const double t = timesteps[i];
    for (std::size_t k = 0; k < half; ++k) {
      const double freq = std::exp(-std::log(10000.0) * static_cast<double>(k) / half);
      out.data[i * width + k] = std::sin(t * freq);
      out.data[i * width + half + k] = std::cos(t * freq);
    }
  }
  return out;
}

ad::Tensor rows_to_tensor(const std::vector<std::vector<double>>& rows, std::size_t width) {
  ad::Tensor t = ad::Tensor::zeros({rows.size(), width});
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != width) {
      throw std::invalid_argument("rows_to_tensor: row " + std::to_string(i) + " has width " +
                                  std::to_string(rows[i].size()) + ", expected " +
                                  std::to_string(width));
    }
    std::copy(rows[i].begin(), rows[i].end(), t.data.begin() + i * width);
  }
  return t;
}

std::vector<std::vector<double>> tensor_to_rows(const ad::Tensor& t) {
  const std::size_t m = t.rows(), n = t.cols();
  std::vector<std::vector<double>> rows(m);
  for (std::size_t i = 0; i < m; ++i) rows[i].assign(t.data.begin() + i * n, t.data.begin() + (i + 1) * n);
  return rows;
}

DenoiserNet::DenoiserNet(const DenoiserConfig& config, const NoiseSchedule& schedule, Rng& rng)
    : config_(config) {
  if (config.dim == 0 || config.hidden == 0 || config.num_labels < 1) {
    throw std::invalid_argument("DenoiserNet: dim, hidden and num_labels must be positive");
  }
  for (int t = 0; t <= schedule.steps; ++t) {
    alpha_.push_back(schedule.alpha(t));
    sigma_.push_back(schedule.sigma(t));
  }
  const std::size_t in = config.dim + config.time_embedding + config.condition_embedding;
  const std::size_t widths[kLayers + 1] = {in, config.hidden, config.hidden, config.dim};
  for (std::size_t l = 0; l < kLayers; ++l) {
    const std::size_t fan_in = widths[l], fan_out = widths[l + 1];
    params_.add(layer_name("base", l, "w"), gaussian(fan_in, fan_out, 1.0 / std::sqrt(fan_in), rng));
    params_.add(layer_name("base", l, "b"), ad::Tensor::zeros({fan_out}));
    params_.add(layer_name("lora", l, "a"),
                gaussian(fan_in, config.lora_rank, 1.0 / std::sqrt(fan_in), rng), false);
    params_.add(layer_name("lora", l, "b"), ad::Tensor::zeros({config.lora_rank, fan_out}), false);
  }
  params_.add("base.cond_emb",
              gaussian(static_cast<std::size_t>(config.num_labels) + 1, config.condition_embedding, 1.0, rng));
}

void DenoiserNet::prepare_pretraining() {
  params_.set_trainable_prefix("base.", true);
  params_.set_trainable_prefix("lora.", false);
  adapters_enabled_ = false;
}

void DenoiserNet::prepare_finetuning() {
  params_.set_trainable_prefix("base.", false);
  params_.set_trainable_prefix("lora.", true);
  adapters_enabled_ = true;
}

ad::Var DenoiserNet::predict(ad::Tape& tape, const ad::ParamStore& store, ad::Var z,
                             std::span<const int> timesteps,
                             std::span<const int> conditions) const {
  const auto& zv = tape.value(z);
  const std::size_t m = zv.rows();
  if (zv.cols() != config_.dim || timesteps.size() != m || conditions.size() != m) {
    throw std::invalid_argument("DenoiserNet::predict: expected z [m, " + std::to_string(config_.dim) +
                                "] with m timesteps/conditions, got z " + ad::shape_str(zv.shape) +
                                ", " + std::to_string(timesteps.size()) + " timesteps, " +
                                std::to_string(conditions.size()) + " conditions");
  }
  std::vector<std::size_t> cond_rows(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (conditions[i] < 0 || conditions[i] > config_.num_labels) {
      throw std::invalid_argument("DenoiserNet::predict: condition " + std::to_string(conditions[i]) +
                                  " out of range");
    }
    if (timesteps[i] < 0 || static_cast<std::size_t>(timesteps[i]) >= alpha_.size()) {
      throw std::invalid_argument("DenoiserNet::predict: timestep " + std::to_string(timesteps[i]) +
                                  " outside the schedule");
    }
    cond_rows[i] = static_cast<std::size_t>(conditions[i]);
  }
  const ad::Var temb = tape.constant(time_embedding(timesteps, config_.time_embedding));
  const ad::Var cemb = tape.gather_rows(tape.param(store, "base.cond_emb"), cond_rows);
  const ad::Var parts[] = {z, temb, cemb};
  ad::Var h = tape.concat(std::span<const ad::Var>(parts));

  for (std::size_t l = 0; l < kLayers; ++l) {
    ad::Var y = tape.add(tape.matmul(h, tape.param(store, layer_name("base", l, "w"))),
                         tape.param(store, layer_name("base", l, "b")));
    if (adapters_enabled_) {
      const ad::Var down = tape.matmul(h, tape.param(store, layer_name("lora", l, "a")));
      y = tape.add(y, tape.matmul(down, tape.param(store, layer_name("lora", l, "b"))));
    }
    h = l + 1 < kLayers ? tape.tanh(y) : y;
  }
  if (!config_.skip_connection) return h;
  ad::Tensor a = ad::Tensor::zeros({m, config_.dim}), s = ad::Tensor::zeros({m, config_.dim});
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < config_.dim; ++j) {
      a.data[i * config_.dim + j] = alpha_[static_cast<std::size_t>(timesteps[i])];
      s.data[i * config_.dim + j] = sigma_[static_cast<std::size_t>(timesteps[i])];
    }
  }
  return tape.sub(tape.mul(z, tape.constant(std::move(a))), tape.mul(h, tape.constant(std::move(s))));
}

std::vector<std::vector<double>> DenoiserNet::predict_rows(
    const std::vector<std::vector<double>>& z, std::span<const int> timesteps,
    std::span<const int> conditions) const {
  ad::Tape tape;
  const ad::Var in = tape.constant(rows_to_tensor(z, config_.dim));
  return tensor_to_rows(tape.value(predict(tape, params_, in, timesteps, conditions)));
}

}  // namespace hero::diffusion
