// Copyright 2026 The hero-desk Authors
// SPDX-License-Identifier: Apache-2.0

#include "hero/autodiff/gradcheck.hpp"

#include <algorithm>
#include <cmath>

namespace hero::ad {

namespace {

double eval_loss(const LossProgram& f, const ParamStore& params) {
  Tape tape;
  return tape.value(f(tape, params)).item();
}

}  // namespace

double finite_diff_gradcheck(const LossProgram& f, ParamStore& params, double h) {
  {
    Tape tape;
    tape.backward(f(tape, params), params);
  }
  double worst = 0.0;
  for (auto& [name, entry] : params.entries()) {
    if (!entry.trainable) continue;
    const auto analytic = *entry.tensor.grad;
    auto& w = entry.tensor.data;
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double saved = w[i];
      w[i] = saved + h;
      const double up = eval_loss(f, params);
      w[i] = saved - h;
      const double down = eval_loss(f, params);
      w[i] = saved;
      const double numeric = (up - down) / (2.0 * h);
      const double scale = std::max({std::abs(analytic[i]), std::abs(numeric), kGradcheckFloor});
      const double err = std::abs(analytic[i] - numeric) / scale;
      worst = std::max(worst, err);
    }
  }
  return worst;
}

}  // namespace hero::ad
