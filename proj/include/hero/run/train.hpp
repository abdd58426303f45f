// Copyright 2026 The hero-desk Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <vector>

#include "hero/feedback/source.hpp"
#include "hero/noise/pi_hero.hpp"
#include "hero/run/checkpoint.hpp"
#include "hero/run/config.hpp"
#include "hero/run/metrics.hpp"

namespace hero::run {

struct TrainOptions {
  /// Annotation source; null means an oracle built from config.feedback.oracle.
  feedback::FeedbackSource* source = nullptr;
  /// When set, receives a status snapshot at every phase change.
  feedback::FeedbackHub* hub = nullptr;
  /// Stop after this many epochs in this call (>= 0), leaving a resumable run.
  int max_epochs = -1;
  std::function<void(const EpochMetrics&)> on_epoch;
  bool verbose = false;
};

struct RunResult {
  RunState state;
  noise::PiHeroState pi;
  std::vector<EpochMetrics> metrics;  // every row of metrics.csv, resumed epochs included
  std::optional<double> final_success;
  bool interrupted = false;  // feedback aborted or max_epochs reached before the budget
};

/// The online loop: sample, collect feedback, train the embedding, reward,
/// update the adapters, refine the noise prior, persist. Resumes from
/// <run_dir>/checkpoint.json when present; otherwise starts fresh.
RunResult hero_train(const RunConfig& config, const TrainOptions& options = {});

/// RunState and prior rebuilt purely from feedback.jsonl and metrics.csv.
struct ReplayedRun {
  RunState state;
  noise::PiHeroState pi;
};
ReplayedRun replay_run(const RunConfig& config, const std::filesystem::path& run_dir);

/// Base model with a run's adapters applied, plus the run's refined prior.
struct FineTunedModel {
  RunConfig config;
  BaseModel base;
  noise::PiHeroState pi;
  RunState state;
};
FineTunedModel load_run(const std::filesystem::path& run_dir);

/// Deterministic stream for post-training sampling, independent of training.
Rng evaluation_rng(std::uint64_t seed);

}  // namespace hero::run
