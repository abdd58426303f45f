// Copyright 2026 The hero-desk Authors
// SPDX-License-Identifier: Apache-2.0

#include "hero/autodiff/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace hero::ad {

void adam_step(ParamStore& params, AdamState& state) {
  for (const auto& [name, entry] : params.entries()) {
    if (!entry.trainable) continue;
    if (!entry.tensor.grad || entry.tensor.grad->size() != entry.tensor.numel()) {
      throw std::logic_error("adam_step: trainable entry '" + name + "' has no gradient");
    }
  }

  state.step += 1;
  const auto& cfg = state.config;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));

  for (auto& [name, entry] : params.entries()) {
    if (!entry.trainable) continue;
    auto& w = entry.tensor.data;
    const auto& g = *entry.tensor.grad;
    auto& m = state.m[name];
    auto& v = state.v[name];
    if (m.size() != w.size()) m.assign(w.size(), 0.0);
    if (v.size() != w.size()) v.assign(w.size(), 0.0);
    for (std::size_t i = 0; i < w.size(); ++i) {
      m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
      v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
      const double mhat = m[i] / bc1;
      const double vhat = v[i] / bc2;
      if (cfg.weight_decay != 0.0) w[i] -= cfg.lr * cfg.weight_decay * w[i];
      w[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
    }
  }
}

}  // namespace hero::ad
