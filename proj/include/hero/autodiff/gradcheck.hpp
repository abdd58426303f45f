// Copyright 2026 The hero-desk Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>

#include "hero/autodiff/tape.hpp"

namespace hero::ad {

/// Builds a scalar loss on `tape` from the parameters in `store`.
inline constexpr double kGradcheckFloor = 1e-6;

using LossProgram = std::function<Var(Tape& tape, const ParamStore& store)>;

/// Compares backward() gradients with central differences of step h over every
/// coordinate of every trainable entry. Returns the max over coordinates of
/// |analytic - numeric| / max(|analytic|, |numeric|, kGradcheckFloor); the floor
/// keeps round-off on vanishing gradients from reading as relative error.
/// `params` is restored on exit.
double finite_diff_gradcheck(const LossProgram& f, ParamStore& params, double h = 1e-5);

}  // namespace hero::ad
