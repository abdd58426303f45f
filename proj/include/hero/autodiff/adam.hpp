// Copyright 2026 The hero-desk Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <string>
#include <vector>

#include "hero/autodiff/tensor.hpp"

namespace hero::ad {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  /// Decoupled (AdamW-style) decay applied directly to the weights.
  double weight_decay = 0.0;
};

struct AdamState {
  AdamConfig config;
  long step = 0;
  std::map<std::string, std::vector<double>> m;
  std::map<std::string, std::vector<double>> v;
};

/// One bias-corrected Adam update of every trainable entry. Frozen entries are
/// left untouched. Throws if a trainable entry has no gradient.
void adam_step(ParamStore& params, AdamState& state);

}  // namespace hero::ad
